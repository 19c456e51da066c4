#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace greeks::math {

// Philox4x32-10 block function (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key);

// Inverse of the standard normal CDF, Wichura's AS241 (relative error ~1e-16).
double inverse_normal_cdf(double p);

// Counter-based stream keyed by (seed, stream_index).  Every draw consumes
// exactly one 64-bit word of Philox output, so `position` counts draws and
// the k-th draw of a stream depends only on (seed, stream_index, k).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index, std::uint64_t position = 0)
      : seed_(seed), stream_(stream_index), pos_(position) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_; }
  std::uint64_t position() const { return pos_; }

  std::uint64_t next_u64();
  // Uniform on the open interval (0,1) with 53 random bits.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() { return inverse_normal_cdf(uniform()); }

  void skip(std::uint64_t draws) { pos_ += draws; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t pos_;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<std::uint32_t, 4> cache_{};
};

std::vector<double> sample_normal(RngStream& stream, std::size_t n);

}  // namespace greeks::math
