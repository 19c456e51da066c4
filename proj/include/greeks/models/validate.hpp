#pragma once

// Spot-check of analytic model partials against complex-step derivatives of
// the coefficient functions themselves, at random (theta, x, y) points.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "greeks/errors.hpp"
#include "greeks/math/rng.hpp"
#include "greeks/models/sde.hpp"

namespace greeks::models {

struct ValidationReport {
  double max_rel_error = 0.0;
  std::string worst;
};

namespace detail {

inline double rel_err(double a, double b) {
  double scale = std::max({std::fabs(a), std::fabs(b), 1e-8});
  return std::fabs(a - b) / scale;
}

}  // namespace detail

// `perturb` maps a uniform draw to a plausible (theta, x) point around the
// model's own parameters.  Used by the built-in constructors.
template <class M>
ValidationReport validate_partials(const M& model, int points = 10, std::uint64_t seed = 7) {
  using C = std::complex<double>;
  const int d = model.dim(), p = model.num_params();
  const double hs = 1e-20;
  ValidationReport rep;
  auto note = [&](double a, double b, const std::string& what) {
    double e = detail::rel_err(a, b);
    if (e > rep.max_rel_error) {
      rep.max_rel_error = e;
      rep.worst = what;
    }
  };
  math::RngStream rs(seed, 0);
  std::vector<double> base = model.params();
  for (int pt = 0; pt < points; ++pt) {
    std::vector<double> th(p);
    for (int k = 0; k < p; ++k) th[k] = base[k] * (1.0 + 0.1 * (rs.uniform() - 0.5));
    Vec<double> x0, x, yi, yj;
    model.initial_state(th.data(), x0.data());
    for (int a = 0; a < d; ++a) {
      x[a] = x0[a] * (1.0 + 0.2 * (rs.uniform() - 0.5));
      if (x[a] == 0.0) x[a] = 0.1 + rs.uniform();
      yi[a] = rs.normal();
      yj[a] = rs.normal();
    }
    for (int i = kNoParam; i < p; ++i) {
      // First partials: direction (e_i, yi).
      std::vector<C> tc(th.begin(), th.end());
      Vec<C> xc;
      for (int a = 0; a < d; ++a) xc[a] = C(x[a], hs * yi[a]);
      if (i >= 0) tc[i] += C(0.0, hs);
      Vec<C> bc;
      Mat<C> sc;
      model.drift(tc.data(), xc.data(), bc.data());
      model.diffusion(tc.data(), xc.data(), sc.data());
      Vec<double> db;
      Mat<double> ds;
      model.drift_tangent(th.data(), x.data(), i, yi.data(), db.data());
      model.diffusion_tangent(th.data(), x.data(), i, yi.data(), ds.data());
      for (int a = 0; a < d; ++a) {
        note(db[a], bc[a].imag() / hs, "drift_tangent " + std::to_string(i));
        for (int c = 0; c <= a; ++c) note(ds[at(a, c)], sc[at(a, c)].imag() / hs, "diffusion_tangent " + std::to_string(i));
      }
      // Second partials: differentiate the tangent along (e_j, yj).
      for (int j = kNoParam; j < p; ++j) {
        std::vector<C> tj(th.begin(), th.end());
        Vec<C> xj, yic;
        for (int a = 0; a < d; ++a) {
          xj[a] = C(x[a], hs * yj[a]);
          yic[a] = C(yi[a], 0.0);
        }
        if (j >= 0) tj[j] += C(0.0, hs);
        Vec<C> bt;
        Mat<C> st;
        model.drift_tangent(tj.data(), xj.data(), i, yic.data(), bt.data());
        model.diffusion_tangent(tj.data(), xj.data(), i, yic.data(), st.data());
        Vec<double> b2;
        Mat<double> s2;
        model.drift_second(th.data(), x.data(), i, j, yi.data(), yj.data(), b2.data());
        model.diffusion_second(th.data(), x.data(), i, j, yi.data(), yj.data(), s2.data());
        for (int a = 0; a < d; ++a) {
          note(b2[a], bt[a].imag() / hs, "drift_second " + std::to_string(i) + "," + std::to_string(j));
          for (int c = 0; c <= a; ++c)
            note(s2[at(a, c)], st[at(a, c)].imag() / hs,
                 "diffusion_second " + std::to_string(i) + "," + std::to_string(j));
        }
      }
    }
  }
  return rep;
}

template <class M>
void require_valid_partials(const M& model) {
  ValidationReport rep = validate_partials(model);
  if (rep.max_rel_error > 1e-6)
    throw DomainError("model partials disagree with complex step (" + rep.worst + ", rel " +
                      std::to_string(rep.max_rel_error) + ")");
}

}  // namespace greeks::models
