#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace greeks::math {

struct NeumaierSum {
  double s = 0.0;
  double c = 0.0;

  void add(double x) {
    double t = s + x;
    if (std::fabs(s) >= std::fabs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  void merge(const NeumaierSum& o) {
    add(o.s);
    add(o.c);
  }
  double value() const { return s + c; }
};

struct SampleStats {
  NeumaierSum sum, sumsq;
  std::uint64_t n = 0;

  void add(double x) {
    sum.add(x);
    sumsq.add(x * x);
    ++n;
  }
  void merge(const SampleStats& o) {
    sum.merge(o.sum);
    sumsq.merge(o.sumsq);
    n += o.n;
  }
  double mean() const { return n ? sum.value() / static_cast<double>(n) : 0.0; }
  double variance() const {
    if (n < 2) return 0.0;
    double m = mean();
    double v = (sumsq.value() - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return v > 0.0 ? v : 0.0;
  }
};

// Threads used when a caller passes 0.
int default_threads();
void set_default_threads(int k);

inline constexpr std::uint64_t kPathBlock = 2048;

struct PathRunOutput {
  std::vector<SampleStats> stats;
  std::uint64_t rejected = 0;
};

// Deterministic map-reduce over paths [0, M).  `make_worker()` is called once
// per thread and must return a callable bool(uint64_t path, span<double> out)
// that fills `width` per-path contributions (false rejects the path).  Paths
// are grouped in fixed blocks whose partial sums are merged in block order,
// so the result is bitwise independent of the thread count.
template <class Factory>
PathRunOutput run_paths(std::uint64_t M, int width, int threads, Factory&& make_worker) {
  if (threads <= 0) threads = default_threads();
  const std::uint64_t nblocks = (M + kPathBlock - 1) / kPathBlock;
  std::vector<std::vector<SampleStats>> block_stats(nblocks, std::vector<SampleStats>(width));
  std::vector<std::uint64_t> block_rejected(nblocks, 0);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto run_blocks = [&] {
    auto worker = make_worker();
    std::vector<double> out(width);
    for (;;) {
      std::uint64_t b = next.fetch_add(1);
      if (b >= nblocks) break;
      std::uint64_t end = std::min(M, (b + 1) * kPathBlock);
      for (std::uint64_t p = b * kPathBlock; p < end; ++p) {
        if (!worker(p, std::span<double>(out))) {
          ++block_rejected[b];
          continue;
        }
        for (int k = 0; k < width; ++k) block_stats[b][k].add(out[k]);
      }
    }
  };

  auto body = [&] {
    try {
      run_blocks();
    } catch (...) {
      std::lock_guard<std::mutex> lk(error_mu);
      if (!error) error = std::current_exception();
      next.store(nblocks);
    }
  };
  int nt = static_cast<int>(std::min<std::uint64_t>(threads, nblocks ? nblocks : 1));
  if (nt <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  PathRunOutput res;
  res.stats.assign(width, SampleStats{});
  for (std::uint64_t b = 0; b < nblocks; ++b) {
    for (int k = 0; k < width; ++k) res.stats[k].merge(block_stats[b][k]);
    res.rejected += block_rejected[b];
  }
  return res;
}

}  // namespace greeks::math
