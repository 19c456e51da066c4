#pragma once

#include <array>
#include <string>
#include <type_traits>
#include <vector>

namespace greeks::models {

inline constexpr int kMaxDim = 8;
inline constexpr int kNoParam = -1;

// Small fixed-capacity state vector and row-major matrix (leading dim kMaxDim).
template <class S>
using Vec = std::array<S, kMaxDim>;
template <class S>
using Mat = std::array<S, kMaxDim * kMaxDim>;

inline constexpr int at(int r, int c) { return r * kMaxDim + c; }

// Storage that skips element construction.  Hot loops use it for Vec/Mat
// temporaries whose live entries are always written before being read;
// with tape scalars the default constructors would otherwise dominate.
template <class T>
struct Scratch {
  static_assert(std::is_trivially_destructible_v<T>);
  union {
    T v;
  };
  Scratch() {}
};

// A model supplies, for any scalar kind S and parameter array th:
//   initial_state / initial_tangent / initial_second
//   drift b(th,x), diffusion s(th,x) (d x d, lower triangular in the noise)
//   drift_tangent(i, y)        = b_{th_i} + b_x y          (i may be kNoParam)
//   diffusion_tangent(i, y)    = s_{th_i} + s_x y
//   drift_second(i, j, yi, yj) = b_{ij} + b_{ix} yj + b_{jx} yi + b_xx[yi, yj]
//   diffusion_second           likewise
//   rate(th)                   short rate used for discounting
// All coefficients are in calendar time; maturity enters through Sde.
struct ParamInfo {
  std::vector<std::string> names;
  int index_of(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return static_cast<int>(k);
    return kNoParam;
  }
};

}  // namespace greeks::models
