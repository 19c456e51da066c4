#include "greeks/math/parallel.hpp"

namespace greeks::math {

namespace {
std::atomic<int> g_threads{1};
}

int default_threads() { return g_threads.load(); }

void set_default_threads(int k) {
  if (k <= 0) k = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  g_threads.store(k);
}

}  // namespace greeks::math
