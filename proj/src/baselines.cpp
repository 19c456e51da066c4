#include "greeks/estimators/baselines.hpp"

#include <cmath>

#include "greeks/models/builtin.hpp"

namespace greeks::estimators {

double BumpScheme::step(double theta) const {
  if (!(bump > 0.0)) throw DomainError("bump must be positive");
  if (!relative) return bump;
  double h = bump * std::fabs(theta);
  if (!(h > 0.0)) throw DomainError("relative bump of a zero parameter");
  return h;
}

const std::vector<double>& BumpedEvaluator::at(const std::vector<std::pair<int, double>>& offsets) {
  std::vector<double> th = theta_;
  for (auto [k, dv] : offsets) th[k] += dv;
  auto it = cache_.find(th);
  if (it != cache_.end()) return it->second;
  std::vector<double> s;
  pricer_(th, s);
  ++evaluations_;
  return cache_.emplace(th, std::move(s)).first->second;
}

namespace {

// Combines sample vectors path by path: sum_k w_k * s_k.
EstimatorResult combine(const std::vector<const std::vector<double>*>& s, const std::vector<double>& w) {
  math::SampleStats st;
  const std::size_t m = s.front()->size();
  for (std::size_t p = 0; p < m; ++p) {
    double v = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) v += w[k] * (*s[k])[p];
    st.add(v);
  }
  return EstimatorResult::from(st);
}

}  // namespace

EstimatorResult fd_greek(BumpedEvaluator& ev, int i, int j, const BumpScheme& sc) {
  vibrato::detail::Stopwatch sw;
  const auto& th = ev.theta();
  const double hi = sc.step(th[i]);
  const bool central = sc.mode == BumpScheme::Mode::Central;
  EstimatorResult r;
  if (j < 0) {
    if (central) {
      const auto* up = &ev.at({{i, hi}});
      const auto* dn = &ev.at({{i, -hi}});
      r = combine({up, dn}, {0.5 / hi, -0.5 / hi});
    } else {
      const auto* up = &ev.at({{i, hi}});
      const auto* c0 = &ev.at({});
      r = combine({up, c0}, {1.0 / hi, -1.0 / hi});
    }
  } else if (i == j) {
    const double h2 = hi * hi;
    if (central) {
      const auto* up = &ev.at({{i, hi}});
      const auto* c0 = &ev.at({});
      const auto* dn = &ev.at({{i, -hi}});
      r = combine({up, c0, dn}, {1.0 / h2, -2.0 / h2, 1.0 / h2});
    } else {
      const auto* u2 = &ev.at({{i, 2.0 * hi}});
      const auto* u1 = &ev.at({{i, hi}});
      const auto* c0 = &ev.at({});
      r = combine({u2, u1, c0}, {1.0 / h2, -2.0 / h2, 1.0 / h2});
    }
  } else {
    const double hj = sc.step(th[j]);
    const double f = 1.0 / (hi * hj);
    if (central) {
      const auto* pp = &ev.at({{i, hi}, {j, hj}});
      const auto* pm = &ev.at({{i, hi}, {j, -hj}});
      const auto* mp = &ev.at({{i, -hi}, {j, hj}});
      const auto* mm = &ev.at({{i, -hi}, {j, -hj}});
      r = combine({pp, pm, mp, mm}, {0.25 * f, -0.25 * f, -0.25 * f, 0.25 * f});
    } else {
      const auto* pp = &ev.at({{i, hi}, {j, hj}});
      const auto* p0 = &ev.at({{i, hi}});
      const auto* p1 = &ev.at({{j, hj}});
      const auto* c0 = &ev.at({});
      r = combine({pp, p0, p1, c0}, {f, -f, -f, f});
    }
  }
  r.wall_time = sw.seconds();
  return r;
}

EstimatorResult fd_greek(const PathPricer& pricer, const std::vector<double>& theta, int i, int j,
                         const BumpScheme& scheme, int* evaluations) {
  BumpedEvaluator ev(pricer, theta);
  EstimatorResult r = fd_greek(ev, i, j, scheme);
  if (evaluations) *evaluations = ev.evaluations();
  return r;
}

FdHessian fd_hessian(const PathPricer& pricer, const std::vector<double>& theta, const std::vector<int>& params,
                     const BumpScheme& scheme) {
  vibrato::detail::Stopwatch sw;
  BumpedEvaluator ev(pricer, theta);
  const std::size_t np = params.size();
  FdHessian h;
  h.params = params;
  h.entries.assign(np, std::vector<EstimatorResult>(np));
  for (std::size_t a = 0; a < np; ++a)
    for (std::size_t b = a; b < np; ++b) {
      h.entries[a][b] = fd_greek(ev, params[a], params[b], scheme);
      h.entries[b][a] = h.entries[a][b];
    }
  h.evaluations = ev.evaluations();
  h.wall_time = sw.seconds();
  return h;
}

// ---------------------------------------------------------------------------

namespace {

void check_case(const BsCase& c) {
  if (!(c.x0 > 0.0) || !(c.sigma > 0.0) || !(c.t > 0.0) || !(c.k >= 0.0))
    throw DomainError("Black-Scholes Gamma needs x0, sigma, T > 0 and K >= 0");
}

template <class F>
EstimatorResult run_exact(const BsCase& c, const GammaRun& run, F weight) {
  check_case(c);
  vibrato::detail::Stopwatch sw;
  auto out = math::run_paths(run.M, 1, run.threads, [&] {
    return [&](std::uint64_t p, std::span<double> o) {
      math::RngStream rs(run.seed, p);
      o[0] = weight(rs.normal());
      return true;
    };
  });
  EstimatorResult r = EstimatorResult::from(out.stats[0]);
  r.n = 1;
  r.wall_time = sw.seconds();
  return r;
}

double terminal(const BsCase& c, double x0, double z) {
  return x0 * std::exp((c.r - 0.5 * c.sigma * c.sigma) * c.t + c.sigma * std::sqrt(c.t) * z);
}

}  // namespace

EstimatorResult lrm_gamma_bs(const BsCase& c, const GammaRun& run) {
  const double disc = std::exp(-c.r * c.t), srt = c.sigma * std::sqrt(c.t), x2 = c.x0 * c.x0;
  return run_exact(c, run, [&](double z) {
    double v = std::max(terminal(c, c.x0, z) - c.k, 0.0);
    return disc * v * ((z * z - 1.0) / (x2 * srt * srt) - z / (x2 * srt));
  });
}

EstimatorResult lrm_weight_mean(const BsCase& c, const GammaRun& run) {
  const double srt = c.sigma * std::sqrt(c.t), x2 = c.x0 * c.x0;
  return run_exact(c, run, [&](double z) { return (z * z - 1.0) / (x2 * srt * srt) - z / (x2 * srt); });
}

EstimatorResult lrpw_gamma_bs(const BsCase& c, const GammaRun& run) {
  const double disc = std::exp(-c.r * c.t), srt = c.sigma * std::sqrt(c.t);
  const double f = disc * c.k / (c.x0 * c.x0 * srt);
  return run_exact(c, run, [&](double z) { return terminal(c, c.x0, z) > c.k ? f * z : 0.0; });
}

EstimatorResult malliavin_gamma_bs(const BsCase& c, const GammaRun& run) {
  const double disc = std::exp(-c.r * c.t), s = c.sigma, t = c.t;
  const double f = disc / (c.x0 * c.x0 * s * t);
  return run_exact(c, run, [&](double z) {
    const double w = std::sqrt(t) * z;
    double v = std::max(terminal(c, c.x0, z) - c.k, 0.0);
    return f * v * (w * w / (s * t) - 1.0 / s - w);
  });
}

EstimatorResult fd_gamma_bs(const BsCase& c, const GammaRun& run, double h) {
  if (!(h > 0.0) || !(h < c.x0)) throw DomainError("FD bump must lie in (0, x0)");
  const double disc = std::exp(-c.r * c.t);
  return run_exact(c, run, [&](double z) {
    auto v = [&](double x) { return std::max(terminal(c, x, z) - c.k, 0.0); };
    return disc * (v(c.x0 + h) - 2.0 * v(c.x0) + v(c.x0 - h)) / (h * h);
  });
}

EstimatorResult vad_gamma_bs(const BsCase& c, const GammaRun& run) {
  check_case(c);
  auto sde = models::make_sde(models::Bs1d{c.x0, c.r, c.sigma}, c.t);
  VibratoConfig cfg;
  cfg.M = run.M;
  cfg.n = 1;
  cfg.seed = run.seed;
  cfg.threads = run.threads;
  cfg.antithetic = vibrato::Antithetic::ThreePoint;
  Payoff pay = Payoff::call(c.k);
  return vibrato::vibrato_second_vad(sde, pay, models::Bs1d::X0, models::Bs1d::X0, cfg);
}

const char* to_string(GammaMethod m) {
  switch (m) {
    case GammaMethod::Vad: return "vad";
    case GammaMethod::Fd: return "fd";
    case GammaMethod::Lrpw: return "lrpw";
    case GammaMethod::Malliavin: return "malliavin";
    case GammaMethod::Lrm: return "lrm";
  }
  return "?";
}

std::vector<VarianceRow> variance_table(const std::vector<double>& maturities, const std::vector<GammaMethod>& methods,
                                        BsCase base, const GammaRun& run) {
  std::vector<VarianceRow> rows;
  for (double t : maturities) {
    BsCase c = base;
    c.t = t;
    VarianceRow row;
    row.t = t;
    for (GammaMethod m : methods) {
      switch (m) {
        case GammaMethod::Vad: row.results.push_back(vad_gamma_bs(c, run)); break;
        case GammaMethod::Fd: row.results.push_back(fd_gamma_bs(c, run, c.x0 * c.sigma * std::sqrt(t))); break;
        case GammaMethod::Lrpw: row.results.push_back(lrpw_gamma_bs(c, run)); break;
        case GammaMethod::Malliavin: row.results.push_back(malliavin_gamma_bs(c, run)); break;
        case GammaMethod::Lrm: row.results.push_back(lrm_gamma_bs(c, run)); break;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace greeks::estimators
