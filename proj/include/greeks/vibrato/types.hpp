#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "greeks/math/parallel.hpp"

namespace greeks::vibrato {

enum class Antithetic { Off, TwoPoint, ThreePoint };

// How AD sees the last step.  Pathwise differentiates V(mu + sig Z) with Z
// frozen.  LikelihoodRatio freezes the sample x = mu + sig Z and
// differentiates the Gaussian density ratio instead; its derivatives coincide
// path by path with the explicit second-order weights.
enum class LastStepMode { Pathwise, LikelihoodRatio };

struct VibratoConfig {
  std::uint64_t M = 100000;
  int MZ = 1;
  int n = 25;
  Antithetic antithetic = Antithetic::ThreePoint;
  std::uint64_t seed = 1;
  int threads = 0;
  LastStepMode mode = LastStepMode::Pathwise;
  // Fraction of rejected (singular) paths tolerated before failing.
  double max_rejected_fraction = 1e-3;
};

struct EstimatorResult {
  double estimate = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  std::uint64_t M = 0;
  int MZ = 1;
  int n = 0;
  std::uint64_t rejected = 0;
  double wall_time = 0.0;

  static EstimatorResult from(const math::SampleStats& s) {
    EstimatorResult r;
    r.estimate = s.mean();
    r.variance = s.variance();
    r.M = s.n;
    r.std_error = s.n ? std::sqrt(r.variance / static_cast<double>(s.n)) : 0.0;
    return r;
  }
};

const char* to_string(Antithetic a);
const char* to_string(LastStepMode m);

}  // namespace greeks::vibrato
