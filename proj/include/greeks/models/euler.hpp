#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "greeks/ad/tape.hpp"
#include "greeks/errors.hpp"
#include "greeks/math/rng.hpp"
#include "greeks/models/sde.hpp"

namespace greeks::models {

// One Euler step on the unit horizon with h = 1/n:
//   x' = x + b~(x) h + s~(x) sqrt(h) z
template <class M, class S>
void euler_step(const Sde<M>& sde, const S* th, double h, const S* x, const double* z, S* xn) {
  const int d = sde.dim();
  Scratch<Vec<S>> bb;
  Scratch<Mat<S>> ss;
  auto& b = bb.v;
  auto& s = ss.v;
  sde.drift(th, x, b.data());
  sde.diffusion(th, x, s.data());
  const double rh = std::sqrt(h);
  for (int a = 0; a < d; ++a) {
    S noise(0.0);
    for (int c = 0; c <= a; ++c) noise += s[at(a, c)] * z[c];
    xn[a] = x[a] + b[a] * h + noise * rh;
  }
}

// Y' = Y + (b_i + b_x Y) h + (s_i + s_x Y) sqrt(h) z
template <class M, class S>
void tangent_step(const Sde<M>& sde, const S* th, double h, const S* x, int i, const S* y, const double* z,
                  S* yn) {
  const int d = sde.dim();
  Scratch<Vec<S>> dbb;
  Scratch<Mat<S>> dss;
  auto& db = dbb.v;
  auto& ds = dss.v;
  sde.drift_tangent(th, x, i, y, db.data());
  sde.diffusion_tangent(th, x, i, y, ds.data());
  const double rh = std::sqrt(h);
  for (int a = 0; a < d; ++a) {
    S noise(0.0);
    for (int c = 0; c <= a; ++c) noise += ds[at(a, c)] * z[c];
    yn[a] = y[a] + db[a] * h + noise * rh;
  }
}

// Second tangent: the same recursion with the second directional
// derivatives plus the linear term acting on Y^{ij}.
template <class M, class S>
void second_tangent_step(const Sde<M>& sde, const S* th, double h, const S* x, int i, int j, const S* yi,
                         const S* yj, const S* yij, const double* z, S* out) {
  const int d = sde.dim();
  Vec<S> b2, b1;
  Mat<S> s2, s1;
  sde.drift_second(th, x, i, j, yi, yj, b2.data());
  sde.drift_tangent(th, x, kNoParam, yij, b1.data());
  sde.diffusion_second(th, x, i, j, yi, yj, s2.data());
  sde.diffusion_tangent(th, x, kNoParam, yij, s1.data());
  const double rh = std::sqrt(h);
  for (int a = 0; a < d; ++a) {
    S noise(0.0);
    for (int c = 0; c <= a; ++c) noise += (s2[at(a, c)] + s1[at(a, c)]) * z[c];
    out[a] = yij[a] + (b2[a] + b1[a]) * h + noise * rh;
  }
}

inline constexpr double kBlowupGuard = 1e150;

template <class S>
void check_state(const S* x, int d) {
  for (int a = 0; a < d; ++a) {
    double v = ad::value_of(x[a]);
    if (!std::isfinite(v) || std::fabs(v) > kBlowupGuard) throw StateBlowup("Euler state overflow");
  }
}

// Whole-path storage, used by the public path API and tests.  Estimators use
// the streaming engine in vibrato/engine.hpp instead.
struct PathBundle {
  int n = 0;
  int d = 0;
  double h = 0.0;  // calendar step T/n
  std::vector<double> theta;
  std::vector<double> states;      // (n+1) x d
  std::vector<double> increments;  // n x d
  std::map<int, std::vector<double>> tangents;
  std::map<std::pair<int, int>, std::vector<double>> second_tangents;

  double x(int k, int a) const { return states[k * d + a]; }
  double z(int k, int a) const { return increments[(k - 1) * d + a]; }  // k = 1..n
};

template <class M>
PathBundle euler_path(const Sde<M>& sde, int n, math::RngStream& stream) {
  if (n < 1) throw DomainError("euler_path needs n >= 1");
  if (!(sde.maturity > 0.0)) throw DomainError("euler_path needs T > 0");
  PathBundle pb;
  pb.n = n;
  pb.d = sde.dim();
  pb.h = sde.maturity / n;
  pb.theta = sde.params();
  pb.states.resize((n + 1) * pb.d);
  pb.increments.resize(n * pb.d);
  const double* th = pb.theta.data();
  sde.initial_state(th, pb.states.data());
  for (int k = 1; k <= n; ++k) {
    for (int a = 0; a < pb.d; ++a) pb.increments[(k - 1) * pb.d + a] = stream.normal();
    euler_step(sde, th, 1.0 / n, &pb.states[(k - 1) * pb.d], &pb.increments[(k - 1) * pb.d],
               &pb.states[k * pb.d]);
    check_state(&pb.states[k * pb.d], pb.d);
  }
  return pb;
}

template <class M>
std::vector<double> tangent_path(const Sde<M>& sde, const PathBundle& pb, int i) {
  std::vector<double> y((pb.n + 1) * pb.d);
  const double* th = pb.theta.data();
  sde.initial_tangent(th, i, y.data());
  for (int k = 1; k <= pb.n; ++k)
    tangent_step(sde, th, 1.0 / pb.n, &pb.states[(k - 1) * pb.d], i, &y[(k - 1) * pb.d],
                 &pb.increments[(k - 1) * pb.d], &y[k * pb.d]);
  return y;
}

template <class M>
std::vector<double> second_tangent_path(const Sde<M>& sde, const PathBundle& pb, int i, int j) {
  if constexpr (!M::kHasSecond) throw MissingSecondPartials("model has no second partials");
  auto yi = pb.tangents.find(i), yj = pb.tangents.find(j);
  if (yi == pb.tangents.end() || yj == pb.tangents.end())
    throw DomainError("second_tangent_path needs both first tangents on the bundle");
  std::vector<double> y((pb.n + 1) * pb.d);
  const double* th = pb.theta.data();
  sde.initial_second(th, i, j, y.data());
  for (int k = 1; k <= pb.n; ++k) {
    const int o = (k - 1) * pb.d;
    second_tangent_step(sde, th, 1.0 / pb.n, &pb.states[o], i, j, &yi->second[o], &yj->second[o], &y[o],
                        &pb.increments[o], &y[k * pb.d]);
  }
  return y;
}

// Conditional law of the last step: X_n = mu + sig Z.
struct LastStepStats {
  int d = 0;
  std::vector<double> mu;                   // d
  std::vector<double> sig;                  // d x d row-major, already times sqrt(h)
  std::vector<double> Sigma;                // sig sig^T
  std::map<int, std::vector<double>> dmu, dsig, dSigma;
  std::map<std::pair<int, int>, std::vector<double>> d2mu, d2sig;
};

template <class M>
LastStepStats last_step_stats(const Sde<M>& sde, const PathBundle& pb, int order, const std::vector<int>& params) {
  const int d = pb.d, n = pb.n;
  const double h = 1.0 / n, rh = std::sqrt(h);
  const double* th = pb.theta.data();
  const double* x = &pb.states[(n - 1) * d];
  LastStepStats ls;
  ls.d = d;
  Vec<double> b;
  Mat<double> s;
  sde.drift(th, x, b.data());
  sde.diffusion(th, x, s.data());
  ls.mu.resize(d);
  ls.sig.assign(d * d, 0.0);
  for (int a = 0; a < d; ++a) {
    ls.mu[a] = x[a] + b[a] * h;
    for (int c = 0; c <= a; ++c) ls.sig[a * d + c] = s[at(a, c)] * rh;
  }
  auto outer = [d](const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> r(d * d, 0.0);
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c)
        for (int k = 0; k < d; ++k) r[a * d + c] += p[a * d + k] * q[c * d + k];
    return r;
  };
  ls.Sigma = outer(ls.sig, ls.sig);
  for (int i : params) {
    auto it = pb.tangents.find(i);
    if (it == pb.tangents.end()) throw DomainError("last_step_stats needs the tangent for every parameter");
    const double* y = &it->second[(n - 1) * d];
    Vec<double> db;
    Mat<double> ds;
    sde.drift_tangent(th, x, i, y, db.data());
    sde.diffusion_tangent(th, x, i, y, ds.data());
    std::vector<double> m(d), sg(d * d, 0.0);
    for (int a = 0; a < d; ++a) {
      m[a] = y[a] + db[a] * h;
      for (int c = 0; c <= a; ++c) sg[a * d + c] = ds[at(a, c)] * rh;
    }
    std::vector<double> dS = outer(sg, ls.sig), t = outer(ls.sig, sg);
    for (int k = 0; k < d * d; ++k) dS[k] += t[k];
    ls.dmu[i] = m;
    ls.dsig[i] = sg;
    ls.dSigma[i] = dS;
  }
  if (order >= 2) {
    for (std::size_t p = 0; p < params.size(); ++p)
      for (std::size_t q = p; q < params.size(); ++q) {
        int i = params[p], j = params[q];
        auto key = std::make_pair(std::min(i, j), std::max(i, j));
        auto it = pb.second_tangents.find(key);
        if (it == pb.second_tangents.end()) throw DomainError("last_step_stats needs second tangents for order 2");
        const double* yi = &pb.tangents.at(i)[(n - 1) * d];
        const double* yj = &pb.tangents.at(j)[(n - 1) * d];
        const double* yij = &it->second[(n - 1) * d];
        Vec<double> b2, b1;
        Mat<double> s2, s1;
        sde.drift_second(th, x, i, j, yi, yj, b2.data());
        sde.drift_tangent(th, x, kNoParam, yij, b1.data());
        sde.diffusion_second(th, x, i, j, yi, yj, s2.data());
        sde.diffusion_tangent(th, x, kNoParam, yij, s1.data());
        std::vector<double> m(d), sg(d * d, 0.0);
        for (int a = 0; a < d; ++a) {
          m[a] = yij[a] + (b2[a] + b1[a]) * h;
          for (int c = 0; c <= a; ++c) sg[a * d + c] = (s2[at(a, c)] + s1[at(a, c)]) * rh;
        }
        ls.d2mu[key] = m;
        ls.d2sig[key] = sg;
      }
  }
  return ls;
}

}  // namespace greeks::models
