// End-to-end acceptance checks.  Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
//   acceptance --configs DIR

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "greeks/ad/tape.hpp"
#include "greeks/analytics/black_scholes.hpp"
#include "greeks/analytics/levy.hpp"
#include "greeks/cli/experiment.hpp"
#include "greeks/estimators/baselines.hpp"
#include "greeks/math/complex_step.hpp"
#include "greeks/models/builtin.hpp"
#include "greeks/vibrato/estimators.hpp"

using namespace greeks;
using cli::CsvRow;
using cli::ExperimentConfig;
using vibrato::EstimatorResult;

namespace {

std::string g_dir;

ExperimentConfig load(const std::string& name) { return cli::load_experiment_file(g_dir + "/" + name); }

ExperimentConfig single_point(ExperimentConfig c) {
  c.sweep_param.clear();
  c.sweep_values.clear();
  return c;
}

struct Report {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    lines.push_back(std::string(ok ? "    ok   " : "    MISS ") + buf);
    pass = pass && ok;
  }
  void note(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    lines.push_back(std::string("         ") + buf);
  }
};

// Every criterion renders its Monte Carlo output as CSV through one of these.
// The first call (one thread) feeds the criterion; a replay with three
// threads is compared byte for byte and reported under determinism.
using Producer = std::function<std::string(int threads)>;
struct Replay {
  int criterion;
  bool same;
  std::size_t bytes;
};
std::vector<Replay> g_replays;

void remember(int criterion, const Producer& p) {
  const std::string first = p(1);
  const std::string again = p(3);
  g_replays.push_back({criterion, first == again, first.size()});
}

std::vector<CsvRow> run_cfg(ExperimentConfig c, int threads) {
  c.threads = threads;
  return cli::run_experiment(c);
}

CsvRow row(const ExperimentConfig& c, int threads) { return run_cfg(c, threads).at(0); }

double zscore(double a, double b, double se) { return se > 0.0 ? std::fabs(a - b) / se : (a == b ? 0.0 : 1e300); }

// ---------------------------------------------------------------------------

Report european_gamma() {
  Report r;
  auto c = single_point(load("gamma_bs.cfg"));
  c.x0 = {120.0};
  CsvRow res;
  double secs = 0.0;
  remember(1, [&](int t) {
    vibrato::detail::Stopwatch sw;
    auto rows = run_cfg(c, t);
    if (t == 1) {
      secs = sw.seconds();
      res = rows.at(0);
    }
    return cli::csv_string(rows, false);
  });
  const double ref = 0.0075003;
  const double cf = analytics::bs_closed_form(120, 100, 0.2, 0.05, 1.0, analytics::BsGreek::Gamma);
  r.note("closed form %.10f, reference %.7f", cf, ref);
  const double z = zscore(res.result.estimate, ref, res.result.std_error);
  r.check(z <= 3.0, "VAD Gamma %.7f +- %.2e, %.2f se from reference", res.result.estimate, res.result.std_error, z);
  r.check(secs < 10.0, "single-threaded wall time %.2f s (limit 10 s)", secs);
  return r;
}

Report structural_equivalence() {
  Report r;
  auto c = single_point(load("gamma_bs.cfg"));
  auto sde = models::make_sde(models::bs1d(c.x0[0], c.r, c.sigma[0]), c.maturity);
  auto payoff = vibrato::Payoff::call(c.strike);
  vibrato::VibratoConfig vc;
  vc.n = c.n;
  vc.seed = c.seed;
  vc.M = 1000;
  vc.mode = vibrato::LastStepMode::LikelihoodRatio;
  const std::vector<std::pair<int, int>> pairs{{0, 0}, {0, 2}, {2, 2}, {0, 1}, {0, 3}, {1, 3}};
  const char* names[] = {"gamma", "vanna", "vomma", "d2/dx0/dr", "d2/dx0/dT", "d2/dr/dT"};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [i, j] = pairs[k];
    double worst = 0.0;
    for (std::uint64_t p = 0; p < vc.M; ++p) {
      double e = 0.0, v = 0.0;
      const bool ok_e = vibrato::vibrato_second_explicit_path(sde, payoff, i, j, vc, p, e);
      const bool ok_v = vibrato::vibrato_second_vad_path(sde, payoff, i, j, vc, p, v);
      if (!ok_e || !ok_v) {
        worst = 1e300;
        continue;
      }
      const double scale = std::max(std::fabs(e), std::fabs(v));
      if (scale > 0.0) worst = std::max(worst, std::fabs(e - v) / scale);
    }
    r.check(worst <= 1e-10, "%-10s max per-path relative difference %.2e over %llu paths", names[k], worst,
            static_cast<unsigned long long>(vc.M));
  }
  remember(2, [=](int t) {
    auto v = vc;
    v.threads = t;
    std::vector<CsvRow> rows;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      rows.push_back({0.0, false, std::string("explicit:") + names[k],
                      vibrato::vibrato_second_explicit(sde, payoff, pairs[k].first, pairs[k].second, v)});
      rows.push_back({0.0, false, std::string("vad:") + names[k],
                      vibrato::vibrato_second_vad(sde, payoff, pairs[k].first, pairs[k].second, v)});
    }
    return cli::csv_string(rows, false);
  });
  return r;
}

Report variance_table() {
  Report r;
  const auto c = load("variance_table.cfg");
  // Variances by maturity: VAD, FD, LRPW, Malliavin.
  const std::map<double, std::array<double, 4>> table{
      {1.0, {3.63e-5, 1.76e-4, 3.40e-4, 9.19e-3}},  {0.5, {8.55e-5, 3.11e-4, 7.79e-4, 1.62e-2}},
      {0.1, {6.64e-4, 1.50e-3, 4.00e-3, 6.54e-2}},  {0.05, {1.49e-3, 2.80e-3, 7.51e-3, 1.21e-1}},
      {0.01, {8.78e-3, 1.84e-2, 3.76e-2, 5.44e-1}}, {5e-3, {1.86e-2, 3.95e-2, 7.55e-2, 1.10e+0}},
      {1e-3, {9.62e-2, 1.77e-1, 3.76e-1, 5.74e+0}}, {5e-4, {1.85e-1, 3.34e-1, 7.56e-1, 1.07e+1}},
      {1e-4, {1.01e+0, 1.63e+0, 3.77e+0, 5.26e+1}}, {5e-5, {1.98e+0, 3.46e+0, 7.54e+0, 1.09e+2}},
      {1e-5, {1.03e+1, 1.78e+1, 3.79e+1, 5.40e+2}}};
  std::vector<CsvRow> rows;
  remember(3, [&](int t) {
    auto out = run_cfg(c, t);
    if (t == 1) rows = out;
    return cli::csv_string(out, false);
  });
  const std::vector<std::string> order{"vad:gamma", "fd:gamma", "lrpw:gamma", "malliavin:gamma"};
  r.check(c.M == 100000 && c.maturities.size() == table.size(), "M = %llu common samples, %zu maturities",
          static_cast<unsigned long long>(c.M), c.maturities.size());
  for (const auto& [t, ref] : table) {
    std::array<double, 4> var{};
    int found = 0;
    for (const auto& row : rows)
      if (row.sweep == t)
        for (int k = 0; k < 4; ++k)
          if (row.greek == order[k]) {
            var[k] = row.result.variance;
            ++found;
          }
    bool ordered = found == 4 && var[0] < var[1] && var[1] < var[2] && var[2] < var[3];
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) worst = std::max(worst, std::max(var[k] / ref[k], ref[k] / var[k]));
    r.check(ordered && worst <= 2.0, "T=%-7g VAD %.3g FD %.3g LRPW %.3g Malliavin %.3g (worst ratio to table %.2f)",
            t, var[0], var[1], var[2], var[3], worst);
  }
  return r;
}

// Significant digits as printed, e.g. "0.55226" -> 5, "4.65557e-3" -> 6.
int printed_digits(const std::string& s) {
  int n = 0;
  bool started = false;
  for (char ch : s) {
    if (ch == 'e' || ch == 'E') break;
    if (ch < '0' || ch > '9') continue;
    if (ch != '0') started = true;
    if (started) ++n;
  }
  return n;
}

bool agrees_to_printed(double x, const std::string& ref) {
  const double v = std::stod(ref);
  const int digits = printed_digits(ref);
  const double unit = std::pow(10.0, std::floor(std::log10(std::fabs(v))) - (digits - 1));
  return std::fabs(x - v) <= 0.5 * unit * (1.0 + 1e-9);
}

Report basket() {
  Report r;
  const auto base = single_point(load("basket_7d.cfg"));
  struct AmmRow {
    int d;
    double t;
    const char *price, *delta, *gamma;
  };
  const std::vector<AmmRow> amm{
      {1, 0.1, "38.4285", "0.55226", "4.65557e-3"}, {2, 0.1, "34.4401", "0.27452", "1.28903e-3"},
      {3, 0.1, "46.0780", "0.18319", "4.29144e-4"}, {4, 0.1, "59.6741", "0.13750", "1.86107e-4"},
      {5, 0.1, "92.8481", "0.10974", "7.64516e-5"}, {6, 0.1, "139.235", "0.09128", "3.54213e-5"},
      {7, 0.1, "155.492", "0.07820", "2.31624e-5"}, {1, 1.0, "155.389", "0.66111", "1.30807e-3"},
      {2, 1.0, "135.441", "0.32583", "3.80685e-4"}, {3, 1.0, "181.935", "0.21775", "1.26546e-4"},
      {4, 1.0, "234.985", "0.16304", "5.49161e-5"}, {5, 1.0, "364.651", "0.13023", "2.25892e-5"},
      {6, 1.0, "543.629", "0.10794", "1.04115e-5"}, {7, 1.0, "603.818", "0.92420", "6.87063e-6"}};

  const int full = static_cast<int>(base.x0.size());
  auto sub = [&](int d) {
    std::vector<double> x0(base.x0.begin(), base.x0.begin() + d), s(base.sigma.begin(), base.sigma.begin() + d);
    Eigen::MatrixXd m(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) m(a, b) = base.correlation[a * full + b];
    double k = 0.0;
    for (double x : x0) k += x / d;
    return std::tuple{x0, s, math::CorrelationMatrix(m), k};
  };
  int matched[3] = {0, 0, 0};
  for (const auto& a : amm) {
    auto [x0, s, corr, k] = sub(a.d);
    std::vector<double> w(a.d, 1.0 / a.d);
    double v[3];
    const analytics::LevyGreek gs[] = {analytics::LevyGreek::Price, analytics::LevyGreek::Delta,
                                       analytics::LevyGreek::Gamma};
    const char* refs[] = {a.price, a.delta, a.gamma};
    bool all = true;
    for (int g = 0; g < 3; ++g) {
      v[g] = analytics::levy_basket(w, x0, s, corr, base.r, a.t, k, gs[g], 0);
      const bool ok = agrees_to_printed(v[g], refs[g]);
      matched[g] += ok;
      all = all && ok;
    }
    r.check(all, "AMM d=%d T=%-3g price %.6g (%s) delta %.6g (%s) gamma %.6g (%s)", a.d, a.t, v[0], a.price, v[1],
            a.delta, v[2], a.gamma);
  }
  r.note("AMM agreement to printed precision: price %d/14, delta %d/14, gamma %d/14", matched[0], matched[1],
         matched[2]);

  struct Case {
    int d;
    double t;
    const char* greek;
    double ref;
  };
  std::vector<Case> cases;
  for (int d : {4, 7})
    for (double t : {0.1, 1.0})
      for (const auto& a : amm)
        if (a.d == d && a.t == t) {
          cases.push_back({d, t, "delta", std::stod(a.delta)});
          cases.push_back({d, t, "gamma", std::stod(a.gamma)});
        }
  std::vector<CsvRow> rows;
  remember(4, [&](int t) {
    std::vector<CsvRow> out;
    for (const auto& cs : cases) {
      auto c = base;
      c.dim = cs.d;
      c.maturity = cs.t;
      c.greek = cs.greek;
      auto rr = row(c, t);
      rr.sweep = cs.d * 10 + cs.t;
      rr.has_sweep = true;
      out.push_back(rr);
    }
    if (t == 1) rows = out;
    return cli::csv_string(out, false);
  });
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& e = rows[k].result;
    const double z = zscore(e.estimate, cases[k].ref, e.std_error);
    r.check(z <= 3.0, "VAD d=%d T=%-3g %s %.6g +- %.2e vs AMM %.6g (%.2f se)", cases[k].d, cases[k].t, cases[k].greek,
            e.estimate, e.std_error, cases[k].ref, z);
  }
  return r;
}

// CRR binomial put with early exercise allowed only on `dates` equally spaced
// dates, i.e. the Bermudan that a `dates`-step LSMC approximates.
double bermudan_put_binomial(double s0, double k, double r, double sigma, double t, int dates, int per_date = 100) {
  const int n = dates * per_date;
  const double dt = t / n, u = std::exp(sigma * std::sqrt(dt)), d = 1.0 / u;
  const double p = (std::exp(r * dt) - d) / (u - d), disc = std::exp(-r * dt);
  std::vector<double> v(n + 1);
  for (int j = 0; j <= n; ++j) v[j] = std::max(k - s0 * std::pow(u, n - 2 * j), 0.0);
  for (int i = n - 1; i >= 0; --i) {
    for (int j = 0; j <= i; ++j) {
      v[j] = disc * (p * v[j] + (1.0 - p) * v[j + 1]);
      if (i > 0 && i % per_date == 0) v[j] = std::max(v[j], k - s0 * std::pow(u, i - 2 * j));
    }
  }
  return v[0];
}

Report american_put() {
  Report r;
  const auto base = single_point(load("american_put.cfg"));
  // S, sigma, T, reference price, published MC price, published price se, reference
  // delta (magnitude), published delta, published delta se, reference gamma, published
  // gamma, published gamma se.
  const double tab[20][12] = {
      {36, 0.2, 1, 4.47919, 4.46289, 0.013, 0.68559, 0.68123, 1.820e-3, 0.08732, 0.06745, 6.947e-5},
      {36, 0.2, 2, 4.83852, 4.81523, 0.016, 0.61860, 0.59934, 1.813e-3, 0.07381, 0.06398, 6.846e-5},
      {36, 0.4, 1, 7.07132, 7.07985, 0.016, 0.51019, 0.51187, 1.674e-3, 0.03305, 0.03546, 4.852e-5},
      {36, 0.4, 2, 8.44139, 8.45612, 0.024, 0.44528, 0.44102, 1.488e-3, 0.02510, 0.02591, 5.023e-5},
      {38, 0.2, 1, 3.24164, 3.23324, 0.013, 0.53781, 0.53063, 1.821e-3, 0.07349, 0.07219, 1.198e-4},
      {38, 0.2, 2, 3.74004, 3.72705, 0.015, 0.48612, 0.46732, 1.669e-3, 0.05907, 0.05789, 1.111e-4},
      {38, 0.4, 1, 6.11553, 6.11209, 0.016, 0.44726, 0.45079, 1.453e-3, 0.02989, 0.03081, 5.465e-5},
      {38, 0.4, 2, 7.59964, 7.61031, 0.025, 0.39786, 0.39503, 1.922e-3, 0.02233, 0.02342, 4.827e-5},
      {40, 0.2, 1, 2.31021, 2.30565, 0.012, 0.41106, 0.40780, 1.880e-3, 0.06014, 0.05954, 1.213e-4},
      {40, 0.2, 2, 2.87877, 2.86072, 0.014, 0.38017, 0.39266, 1.747e-3, 0.04717, 0.04567, 5.175e-4},
      {40, 0.4, 1, 5.27933, 5.28741, 0.015, 0.39051, 0.39485, 1.629e-3, 0.02689, 0.02798, 1.249e-5},
      {40, 0.4, 2, 6.84733, 6.85873, 0.026, 0.35568, 0.35446, 1.416e-3, 0.01987, 0.02050, 3.989e-5},
      {42, 0.2, 1, 1.61364, 1.60788, 0.011, 0.30614, 0.29712, 1.734e-3, 0.04764, 0.04563, 4.797e-5},
      {42, 0.2, 2, 2.20694, 2.19079, 0.014, 0.29575, 0.28175, 1.601e-3, 0.03749, 0.03601, 5.560e-5},
      {42, 0.4, 1, 4.55055, 4.57191, 0.015, 0.33973, 0.34385, 1.517e-3, 0.02391, 0.02426, 3.194e-5},
      {42, 0.4, 2, 6.17459, 6.18424, 0.023, 0.31815, 0.29943, 1.347e-3, 0.01768, 0.01748, 2.961e-5},
      {44, 0.2, 1, 1.10813, 1.09648, 0.009, 0.21302, 0.20571, 1.503e-3, 0.03653, 0.03438, 1.486e-4},
      {44, 0.2, 2, 1.68566, 1.66903, 0.012, 0.22883, 0.21972, 1.487e-3, 0.02960, 0.02765, 2.363e-4},
      {44, 0.4, 1, 3.91751, 3.90838, 0.015, 0.29466, 0.29764, 1.403e-3, 0.02116, 0.02086, 1.274e-4},
      {44, 0.4, 2, 5.57268, 5.58252, 0.028, 0.28474, 0.28447, 1.325e-3, 0.01574, 0.01520, 2.162e-4}};
  std::vector<CsvRow> rows;
  remember(5, [&](int t) {
    std::vector<CsvRow> out;
    for (const auto& q : tab) {
      auto c = base;
      c.x0 = {q[0]};
      c.sigma = {q[1]};
      c.maturity = q[2];
      for (auto rr : run_cfg(c, t)) {
        rr.sweep = q[0] + q[1] + 100 * q[2];
        rr.has_sweep = true;
        out.push_back(rr);
      }
    }
    if (t == 1) rows = out;
    return cli::csv_string(out, false);
  });
  int price_ok = 0, greek_ok = 0, greek_rows = 0, oracle_ok = 0;
  double oracle_gap = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto* q = tab[k];
    const auto& price = rows[3 * k].result;
    const auto& delta = rows[3 * k + 1].result;
    const auto& gamma = rows[3 * k + 2].result;
    const bool p_ok = std::fabs(price.estimate - q[3]) <= 3.0 * q[5];
    price_ok += p_ok;
    const double berm = bermudan_put_binomial(q[0], base.strike, base.r, q[1], q[2], base.n);
    oracle_ok += zscore(price.estimate, berm, price.std_error) <= 3.0;
    oracle_gap = std::max(oracle_gap, berm - q[3]);
    const bool flagged = q[1] == 0.2 && (q[0] == 36 || q[0] == 38);
    const double zd = zscore(-delta.estimate, q[6], std::hypot(q[8], delta.std_error));
    const double zg = zscore(gamma.estimate, q[9], std::hypot(q[11], gamma.std_error));
    const bool g_ok = flagged || (zd <= 3.0 && zg <= 3.0);
    if (!flagged) {
      ++greek_rows;
      greek_ok += zd <= 3.0 && zg <= 3.0;
    }
    r.check(p_ok && g_ok, "S=%g sigma=%g T=%g price %.5f (%.5f) delta %.5f (%.5f, %.1f se) gamma %.5f (%.5f, %.1f se)%s",
            q[0], q[1], q[2], price.estimate, q[3], -delta.estimate, q[6], zd, gamma.estimate, q[9], zg,
            flagged ? " [greeks not scored]" : "");
  }
  r.note("prices within 3 published se: %d/20; Delta and Gamma within 3 combined se: %d/%d", price_ok, greek_ok,
         greek_rows);
  r.note("unscored: prices within 3 own se of a %d-date Bermudan binomial tree: %d/20; the tree exceeds the", base.n,
         oracle_ok);
  r.note("tabulated reference price by up to %.4f, and an American price can never be below its Bermudan", oracle_gap);
  return r;
}

Report heston() {
  Report r;
  auto base = single_point(load("heston_gamma.cfg"));
  base.x0 = {85.0};
  r.note("x0 %.0f v0 %g M %llu n %d", base.x0[0], base.v0, static_cast<unsigned long long>(base.M), base.n);
  std::vector<CsvRow> rows;
  remember(6, [&](int t) {
    std::vector<CsvRow> out;
    for (const char* m : {"vad", "fd"})
      for (const char* g : {"gamma", "vanna"}) {
        auto c = base;
        c.method = m;
        c.greek = g;
        out.push_back(row(c, t));
      }
    if (t == 1) rows = out;
    return cli::csv_string(out, false);
  });
  for (int k = 0; k < 2; ++k) {
    const auto &v = rows[k].result, &f = rows[k + 2].result;
    const double z = zscore(v.estimate, f.estimate, std::hypot(v.std_error, f.std_error));
    r.check(z <= 3.0, "%-6s VAD %.6g +- %.2e  FD %.6g +- %.2e  (%.2f combined se)", k == 0 ? "gamma" : "vanna",
            v.estimate, v.std_error, f.estimate, f.std_error, z);
  }
  return r;
}

Report hessian() {
  Report r;
  auto c = single_point(load("hessian_bs.cfg"));
  c.threads = 1;
  cli::BenchReport rep;
  remember(7, [&](int t) {
    auto cc = c;
    cc.threads = t;
    auto b = cli::bench_hessian(cc);
    if (t == 1) rep = b;
    std::vector<CsvRow> out;
    for (std::size_t a = 0; a < b.params.size(); ++a)
      for (std::size_t q = a; q < b.params.size(); ++q) {
        const std::string e = "d2/d" + b.params[a] + "/d" + b.params[q];
        out.push_back({0.0, false, "vrad:" + e, b.vrad[a][q]});
        out.push_back({0.0, false, "fd:" + e, b.fd[a][q]});
      }
    return cli::csv_string(out, false);
  });
  int within = 0, total = 0;
  for (std::size_t a = 0; a < rep.params.size(); ++a)
    for (std::size_t q = a; q < rep.params.size(); ++q) {
      const auto& e = rep.vrad[a][q];
      const double z = zscore(e.estimate, rep.closed_form[a][q], e.std_error);
      ++total;
      within += z <= 3.0;
      r.check(z <= 3.0, "d2/d%s/d%s  VRAD %.8g +- %.2e  closed form %.8g  (%.2f se)", rep.params[a].c_str(),
              rep.params[q].c_str(), e.estimate, e.std_error, rep.closed_form[a][q], z);
    }
  r.check(total == 10, "%d distinct entries, %d within 3 se", total, within);
  r.check(rep.vrad_seconds <= 0.5 * rep.fd_seconds, "VRAD %.3f s vs FD %.3f s, speedup %.2fx (need >= 2)",
          rep.vrad_seconds, rep.fd_seconds, rep.speedup());
  r.check(rep.fd_evaluations >= 33, "FD used %d pricer evaluations, VRAD one pass", rep.fd_evaluations);
  auto smoke = c;
  smoke.M = 1;
  bool smoke_ok = true;
  try {
    cli::bench_hessian(smoke);
  } catch (const std::exception&) {
    smoke_ok = false;
  }
  r.check(smoke_ok, "%s", "M = 1 smoke run completes");
  return r;
}

Report third_order() {
  Report r;
  auto base = single_point(load("third_order.cfg"));
  r.note("x0 %.0f M %llu n %d MZ %d", base.x0[0], static_cast<unsigned long long>(base.M), base.n, base.MZ);
  std::vector<CsvRow> rows;
  remember(8, [&](int t) {
    std::vector<CsvRow> out;
    for (const char* g : {"speed", "third_cross"}) {
      auto c = base;
      c.greek = g;
      out.push_back(row(c, t));
    }
    if (t == 1) rows = out;
    return cli::csv_string(out, false);
  });
  const double ref[2] = {
      analytics::bs_closed_form(base.x0[0], base.strike, base.sigma[0], base.r, base.maturity, analytics::BsGreek::Speed),
      analytics::bs_closed_form(base.x0[0], base.strike, base.sigma[0], base.r, base.maturity,
                                analytics::BsGreek::ThirdCross)};
  const char* names[2] = {"d3/dx0^3", "d3/dx0/dsigma/dr"};
  for (int k = 0; k < 2; ++k) {
    const auto& e = rows[k].result;
    const double rel = std::fabs(e.estimate - ref[k]) / std::fabs(ref[k]);
    r.check(rel <= 0.05, "%-17s VVAD %.6g +- %.2e  closed form %.6g  (%.2f%% off)", names[k], e.estimate, e.std_error,
            ref[k], 100.0 * rel);
  }
  return r;
}

template <class S>
S smooth_test(const S& x, const S& y) {
  using std::exp, std::log, std::sin, std::sqrt;
  using ad::exp, ad::log, ad::sin, ad::sqrt;
  return exp(S(0.2) * x * y) * sin(x) + log(S(2.0) + y * y) / sqrt(S(1.0) + x * x);
}

Report ad_suite() {
  Report r;
  // Forward mode against complex step.
  double fw_cs = 0.0;
  for (double x : {-1.3, -0.2, 0.4, 1.7})
    for (double y : {-0.8, 0.5, 2.1}) {
      auto d = smooth_test(ad::Dual<double, 1>::variable(x, 0), ad::Dual<double, 1>(y));
      double cs = math::complex_step_derivative(
          [&](std::complex<double> u) { return smooth_test(u, std::complex<double>(y)); }, x);
      fw_cs = std::max(fw_cs, std::fabs(d.d[0] - cs) / std::max(1.0, std::fabs(cs)));
    }
  double partials = 0.0;
  Eigen::MatrixXd c3(3, 3);
  c3 << 1.0, 0.5, 0.2, 0.5, 1.0, 0.3, 0.2, 0.3, 1.0;
  partials = std::max(partials, models::validate_partials(models::Bs1d{100.0, 0.05, 0.2}).max_rel_error);
  partials = std::max(partials, models::validate_partials(models::GbmCorr({90.0, 100.0, 110.0}, {0.2, 0.3, 0.25}, 0.03,
                                                                          math::CorrelationMatrix(c3)))
                                    .max_rel_error);
  partials = std::max(partials, models::validate_partials(models::Heston{100.0, 0.04, 0.02, 1.5, 0.05, 0.3, -0.6}).max_rel_error);
  auto sde = models::make_sde(models::Bs1d{100.0, 0.05, 0.2}, 1.0);
  vibrato::VibratoConfig vc;
  vc.M = 2000;
  vc.n = 20;
  vc.threads = 1;
  double path_cs = 0.0;
  for (int i = 0; i < sde.num_params(); ++i) {
    auto pw = estimators::pathwise_first(sde, vibrato::Payoff::call(100.0), i, vc);
    auto cs = estimators::complex_step_first(sde, vibrato::Payoff::call(100.0), i, vc);
    path_cs = std::max(path_cs, std::fabs(pw.estimate - cs.estimate) / std::max(1.0, std::fabs(cs.estimate)));
  }
  r.check(fw_cs <= 1e-8 && partials <= 1e-8 && path_cs <= 1e-8,
          "forward vs complex step: scalar %.1e, model partials %.1e, Euler path %.1e (limit 1e-8)", fw_cs, partials,
          path_cs);

  // Forward against reverse on the Black-Scholes price and a smooth test function.
  double fw_rev = 0.0;
  {
    const double p[4] = {95.0, 0.25, 0.03, 1.5};
    ad::Tape t;
    std::vector<ad::Var> in;
    for (double v : p) in.push_back(ad::Var::input(t, v));
    auto out = analytics::bs_call_price(in[0], 100.0, in[1], in[2], in[3]);
    auto g = ad::reverse_gradient(t, out, in);
    using D = ad::Dual<double, 4>;
    auto f = analytics::bs_call_price(D::variable(p[0], 0), 100.0, D::variable(p[1], 1), D::variable(p[2], 2),
                                      D::variable(p[3], 3));
    for (int k = 0; k < 4; ++k) fw_rev = std::max(fw_rev, std::fabs(g[k] - f.d[k]) / std::max(1.0, std::fabs(f.d[k])));
    ad::Tape t2;
    std::vector<ad::Var> xy{ad::Var::input(t2, 0.7), ad::Var::input(t2, -0.4)};
    auto o2 = smooth_test(xy[0], xy[1]);
    auto g2 = ad::reverse_gradient(t2, o2, xy);
    auto f2 = smooth_test(ad::Dual<double, 2>::variable(0.7, 0), ad::Dual<double, 2>::variable(-0.4, 1));
    for (int k = 0; k < 2; ++k) fw_rev = std::max(fw_rev, std::fabs(g2[k] - f2.d[k]) / std::max(1.0, std::fabs(f2.d[k])));
  }
  r.check(fw_rev <= 1e-12, "forward vs reverse gradients: %.1e (limit 1e-12)", fw_rev);

  // Dirac approximation integrates to one.
  double norm = 0.0;
  for (double a : {0.01, 0.2, 1.0, 5.0}) {
    ad::DiracParam dp{a, {}};
    const double lim = 14.0 * std::sqrt(a), dx = lim / 4000.0;
    double s = 0.0;
    for (int k = -4000; k <= 4000; ++k) s += ad::dirac_k(k * dx, 0, dp) * dx;
    norm = std::max(norm, std::fabs(s - 1.0));
  }
  r.check(norm <= 1e-8, "Dirac approximation mass error %.1e (limit 1e-8)", norm);

  // Gamma through the ramp's smoothed second derivative.
  const auto c = load("ramp_gamma.cfg");
  std::vector<CsvRow> rows;
  remember(9, [&](int t) {
    auto out = run_cfg(c, t);
    if (t == 1) rows = out;
    return cli::csv_string(out, false);
  });
  auto gamma_at = [&](double x) {
    return analytics::bs_closed_form(x, c.strike, c.sigma[0], c.r, c.maturity, analytics::BsGreek::Gamma);
  };
  double peak = 0.0;
  for (const auto& row : rows) peak = std::max(peak, gamma_at(row.sweep));
  int bad = 0, tail = 0;
  double worst_z = 0.0, worst_x = 0.0;
  std::string misses;
  for (const auto& row : rows) {
    const double g = gamma_at(row.sweep);
    const auto& e = row.result;
    const double z = zscore(e.estimate, g, e.std_error);
    bool ok = z <= 3.0;
    if (g < 0.01 * peak) {
      // Far out of the money almost no path reaches the Dirac bump and the
      // sample spread collapses, so z is meaningless there.  Require the
      // estimate to be negligible on the scale of the curve instead.
      ++tail;
      ok = ok || std::fabs(e.estimate - g) <= 0.01 * peak;
    } else if (z > worst_z) {
      worst_z = z;
      worst_x = row.sweep;
    }
    if (!ok) {
      ++bad;
      char buf[96];
      std::snprintf(buf, sizeof buf, " x0=%g: %.4g +- %.2g vs %.4g;", row.sweep, e.estimate, e.std_error, g);
      misses += buf;
    }
  }
  r.check(bad == 0 && !rows.empty(),
          "ramp Gamma, a=%g T=%g, %zu spots: worst %.2f se at x0=%g, %d tail spots (Gamma < 1%% of peak), %d misses",
          c.dirac_a, c.maturity, rows.size(), worst_z, worst_x, tail, bad);
  if (!misses.empty()) r.note("misses:%s", misses.c_str());
  return r;
}

Report determinism() {
  Report r;
  for (const auto& rp : g_replays)
    r.check(rp.same, "criterion %d: CSV identical with 1 and 3 threads (%zu bytes)", rp.criterion, rp.bytes);
  r.check(!g_replays.empty(), "%zu criteria replayed", g_replays.size());
  // The same file through the full path twice at the default thread count.
  auto c = single_point(load("gamma_bs.cfg"));
  c.M = 20000;
  c.threads = 0;
  const std::string a = cli::csv_string(cli::run_experiment(c), false);
  const std::string b = cli::csv_string(cli::run_experiment(c), false);
  r.check(a == b, "%s", "repeated run at default threads identical");
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> only;
  app.add_option("--configs", g_dir, "directory of bundled configs")->required();
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Report()>>> criteria{
      {"European Gamma by VAD at X0=120", european_gamma},
      {"explicit and AD second-order kernels agree per path", structural_equivalence},
      {"Gamma variance table ordering and magnitudes", variance_table},
      {"basket: moment matching and VAD Delta/Gamma", basket},
      {"American put by LSMC with VAD greeks", american_put},
      {"Heston Gamma and Vanna, VAD vs FD", heston},
      {"BS Hessian by VRAD, accuracy and speed", hessian},
      {"third-order greeks by VVAD", third_order},
      {"AD kernel properties and ramp Gamma", ad_suite},
      {"determinism across runs and thread counts", determinism}};

  int failed = 0, ran = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(k + 1)) == only.end()) continue;
    vibrato::detail::Stopwatch sw;
    Report rep;
    try {
      rep = criteria[k].second();
    } catch (const std::exception& e) {
      rep.pass = false;
      rep.lines.push_back(std::string("    error: ") + e.what());
    }
    std::printf("criterion %zu: %s  %s  (%.1f s)\n", k + 1, rep.pass ? "PASS" : "FAIL", criteria[k].first,
                sw.seconds());
    for (const auto& l : rep.lines) std::printf("%s\n", l.c_str());
    std::fflush(stdout);
    failed += !rep.pass;
    ++ran;
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
