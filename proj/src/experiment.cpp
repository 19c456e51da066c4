#include "greeks/cli/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "greeks/american/lsmc.hpp"
#include "greeks/analytics/black_scholes.hpp"
#include "greeks/analytics/levy.hpp"
#include "greeks/estimators/baselines.hpp"
#include "greeks/models/builtin.hpp"

namespace greeks::cli {

using vibrato::EstimatorResult;

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.M) cfg.M = *o.M;
}

namespace {

std::size_t asset_index(const std::string& name, const std::string& prefix, std::size_t size) {
  const std::string idx = name.substr(prefix.size());
  std::size_t k = 0;
  try {
    k = std::stoul(idx);
  } catch (const std::exception&) {
    throw ConfigError("bad asset index in parameter", 0, name);
  }
  if (k >= size) throw ConfigError("asset index out of range", 0, name);
  return k;
}

void set_param(ExperimentConfig& c, const std::string& name, double v) {
  if (name == "x0") c.x0.at(0) = v;
  else if (name.rfind("x0_", 0) == 0) c.x0[asset_index(name, "x0_", c.x0.size())] = v;
  else if (name == "sigma") c.sigma.at(0) = v;
  else if (name.rfind("sigma_", 0) == 0) c.sigma[asset_index(name, "sigma_", c.sigma.size())] = v;
  else if (name == "r") c.r = v;
  else if (name == "t") c.maturity = v;
  else if (name == "v0") c.v0 = v;
  else if (name == "kappa") c.kappa = v;
  else if (name == "eta") c.eta = v;
  else if (name == "xi") c.xi = v;
  else if (name == "rho") c.rho = v;
  else if (name == "strike") c.strike = v;
  else throw ConfigError("unknown sweep parameter", 0, "sweep.param");
}

bool multi_asset(const ExperimentConfig& c) { return c.model == "gbm" || c.model == "gbm_log"; }

math::CorrelationMatrix correlation(const ExperimentConfig& c) {
  const int full = static_cast<int>(c.x0.size());
  if (c.correlation.empty()) return math::CorrelationMatrix::identity(c.dim);
  Eigen::MatrixXd m(c.dim, c.dim);
  for (int a = 0; a < c.dim; ++a)
    for (int b = 0; b < c.dim; ++b) m(a, b) = c.correlation[a * full + b];
  return math::CorrelationMatrix(m);
}

std::vector<double> head(const std::vector<double>& v, int d) { return {v.begin(), v.begin() + d}; }

models::AnyModel make_model(const ExperimentConfig& c) {
  if (c.model == "bs1d") return models::bs1d(c.x0[0], c.r, c.sigma[0]);
  if (c.model == "heston") return models::heston(c.x0[0], c.v0, c.r, c.kappa, c.eta, c.xi, c.rho);
  if (c.model == "gbm") return models::gbm_corr(head(c.x0, c.dim), head(c.sigma, c.dim), c.r, correlation(c));
  return models::log_gbm_corr(head(c.x0, c.dim), head(c.sigma, c.dim), c.r, correlation(c));
}

double basket_strike(const ExperimentConfig& c) {
  if (!c.strike_is_mean) return c.strike;
  return std::accumulate(c.x0.begin(), c.x0.begin() + c.dim, 0.0) / c.dim;
}

std::vector<double> basket_weights(const ExperimentConfig& c) {
  if (c.weights.empty()) return std::vector<double>(c.dim, 1.0 / c.dim);
  if (static_cast<int>(c.weights.size()) < c.dim) throw ConfigError("fewer weights than assets", 0, "payoff.weights");
  return head(c.weights, c.dim);
}

vibrato::Payoff make_payoff(const ExperimentConfig& c) {
  vibrato::Payoff p;
  if (c.payoff == "call") p = vibrato::Payoff::call(c.strike);
  else if (c.payoff == "put") p = vibrato::Payoff::put(c.strike);
  else if (c.payoff == "digital_up") p = vibrato::Payoff::digital_up(c.strike);
  else if (c.payoff == "digital_down") p = vibrato::Payoff::digital_down(c.strike);
  else p = vibrato::Payoff::basket_call(basket_weights(c), basket_strike(c));
  p.dirac.a = c.dirac_a;
  p.exp_state = c.model == "gbm_log";
  return p;
}

vibrato::VibratoConfig vibrato_config(const ExperimentConfig& c) {
  vibrato::VibratoConfig v;
  v.M = c.M;
  v.MZ = c.MZ;
  v.n = c.n;
  v.seed = c.seed;
  v.threads = c.threads;
  v.antithetic = c.antithetic == "off"         ? vibrato::Antithetic::Off
                 : c.antithetic == "two_point" ? vibrato::Antithetic::TwoPoint
                                               : vibrato::Antithetic::ThreePoint;
  v.mode = c.mode == "likelihood_ratio" ? vibrato::LastStepMode::LikelihoodRatio : vibrato::LastStepMode::Pathwise;
  return v;
}

// Parameter names behind a greek, in the naming of the model.
std::vector<std::string> greek_params(const ExperimentConfig& c) {
  if (!c.params.empty()) {
    std::vector<std::string> p;
    for (const auto& s : c.params) {
      std::string l = s;
      std::transform(l.begin(), l.end(), l.begin(), [](unsigned char ch) { return std::tolower(ch); });
      p.push_back(l);
    }
    return p;
  }
  const bool multi = multi_asset(c);
  const std::string x = multi ? "x0_0" : "x0";
  const std::string s = multi ? "sigma_0" : (c.model == "heston" ? "v0" : "sigma");
  const std::string& g = c.greek;
  if (g == "price") return {};
  if (g == "delta") return {x};
  if (g == "gamma") return {x, x};
  if (g == "vega") return {s};
  if (g == "rho") return {"r"};
  if (g == "theta") return {"t"};
  if (g == "vanna") return {x, s};
  if (g == "vomma") return {s, s};
  if (g == "speed") return {x, x, x};
  if (g == "third_cross" || g == "third-cross") return {x, s, "r"};
  if (g == "hessian") return {x, s, "r", "t"};
  throw ConfigError("unknown greek '" + g + "'", 0, "method.greek");
}

template <class M>
std::vector<int> param_indices(const models::Sde<M>& sde, const std::vector<std::string>& names) {
  auto info = sde.info();
  std::vector<int> out;
  for (const auto& n : names) {
    int found = -1;
    for (std::size_t k = 0; k < info.names.size(); ++k) {
      std::string l = info.names[k];
      std::transform(l.begin(), l.end(), l.begin(), [](unsigned char ch) { return std::tolower(ch); });
      if (l == n) found = static_cast<int>(k);
    }
    if (found < 0) throw ConfigError("model has no parameter '" + n + "'", 0, "method.params");
    out.push_back(found);
  }
  return out;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : sep) + x;
  return s;
}

std::string greek_label(const ExperimentConfig& c, const std::vector<std::string>& names) {
  if (!c.params.empty()) return "d/" + join(names, "/d");
  return c.greek;
}

EstimatorResult exact(double v) {
  EstimatorResult r;
  r.estimate = v;
  return r;
}

bool is_hessian(const ExperimentConfig& c) { return c.params.empty() && c.greek == "hessian"; }

template <class M>
void run_sde(const ExperimentConfig& c, const models::Sde<M>& sde, double sweep, bool has_sweep,
             std::vector<CsvRow>& rows) {
  const vibrato::Payoff payoff = make_payoff(c);
  const vibrato::VibratoConfig vc = vibrato_config(c);
  const std::vector<std::string> names = greek_params(c);
  const std::vector<int> idx = param_indices(sde, names);
  const std::size_t order = idx.size();
  auto emit = [&](const std::string& greek, const EstimatorResult& r) {
    rows.push_back({sweep, has_sweep, c.method + ":" + greek, r});
  };
  const std::string label = greek_label(c, names);
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw NotApplicable("method '" + c.method + "' " + what);
  };

  if (c.method == "price" || (order == 0 && c.method != "lsmc")) {
    emit("price", c.method == "price" ? estimators::mc_price(sde, payoff, vc) : vibrato::vibrato_price(sde, payoff, vc));
    return;
  }

  if (c.method == "lsmc") {
    if constexpr (!std::is_same_v<M, models::Heston>) {
      if (sde.dim() != 1) throw NotApplicable("lsmc needs a one-dimensional model");
      american::LsmcConfig lc;
      lc.M = c.M;
      lc.n = c.n;
      lc.seed = c.seed;
      lc.threads = c.threads;
      lc.antithetic = vc.antithetic;
      lc.itm_only = c.itm_only;
      lc.never_exercise = c.never_exercise;
      lc.kernel = c.lsmc_kernel == "at_exercise" ? american::LsmcConfig::GreekKernel::AtExercise
                                                 : american::LsmcConfig::GreekKernel::FirstStep;
      american::Basis basis{c.basis_degree, payoff.strike > 0.0 ? payoff.strike : 1.0};
      auto res = american::lsmc_greeks_vad(sde, payoff, basis, lc);
      emit("price", res.price);
      emit("delta", res.delta);
      emit("gamma", res.gamma);
      return;
    }
    throw NotApplicable("lsmc is implemented for one-dimensional GBM only");
  }

  if (c.method == "vrad" || (c.method == "fd" && is_hessian(c))) {
    std::vector<int> uniq = idx;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    need(order <= 2 || is_hessian(c), "computes second-order greeks (or the hessian)");
    if ((order == 2 || order == 1) && !is_hessian(c)) {
      if (c.method == "vrad") {
        auto h = vibrato::hessian_vrad(sde, payoff, uniq, vc);
        auto pos = [&](int p) { return static_cast<int>(std::find(uniq.begin(), uniq.end(), p) - uniq.begin()); };
        emit(label, order == 2 ? h.hessian[pos(idx[0])][pos(idx[1])] : h.gradient[pos(idx[0])]);
        return;
      }
    }
    const auto info = sde.info();
    if (c.method == "vrad") {
      auto h = vibrato::hessian_vrad(sde, payoff, uniq, vc);
      for (std::size_t a = 0; a < uniq.size(); ++a)
        for (std::size_t b = a; b < uniq.size(); ++b)
          emit("d2/d" + info.names[uniq[a]] + "/d" + info.names[uniq[b]], h.hessian[a][b]);
      return;
    }
    estimators::BumpScheme sc;
    sc.bump = c.bump;
    sc.relative = c.bump_relative;
    sc.mode = c.bump_central ? estimators::BumpScheme::Mode::Central : estimators::BumpScheme::Mode::Forward;
    auto h = estimators::fd_hessian(estimators::euler_pricer(sde, payoff, vc), sde.params(), uniq, sc);
    for (std::size_t a = 0; a < uniq.size(); ++a)
      for (std::size_t b = a; b < uniq.size(); ++b)
        emit("d2/d" + info.names[uniq[a]] + "/d" + info.names[uniq[b]], h.entries[a][b]);
    return;
  }

  if (c.method == "vibrato" || c.method == "vad" || c.method == "vibvib" || c.method == "vvad") {
    need(order <= 3, "supports up to third order");
    EstimatorResult r;
    if (order == 1) {
      need(c.method == "vibrato" || c.method == "vad", "is not a first-order method");
      r = vibrato::vibrato_first(sde, payoff, idx[0], vc);
    } else if (order == 2) {
      need(c.method != "vvad", "is a third-order method");
      r = c.method == "vad" ? vibrato::vibrato_second_vad(sde, payoff, idx[0], idx[1], vc)
                            : vibrato::vibrato_second_explicit(sde, payoff, idx[0], idx[1], vc);
    } else {
      need(c.method == "vvad" || c.method == "vad", "does not compute third order");
      r = vibrato::vibrato_third(sde, payoff, idx[0], idx[1], idx[2], vc);
    }
    emit(label, r);
    return;
  }

  if (c.method == "fd") {
    need(order <= 2, "computes first and second order only");
    estimators::BumpScheme sc;
    sc.bump = c.bump;
    sc.relative = c.bump_relative;
    sc.mode = c.bump_central ? estimators::BumpScheme::Mode::Central : estimators::BumpScheme::Mode::Forward;
    emit(label, estimators::fd_greek(estimators::euler_pricer(sde, payoff, vc), sde.params(), idx[0],
                                     order == 2 ? idx[1] : -1, sc));
    return;
  }
  if (c.method == "ad_ramp") {
    need(order == 2, "computes second order only");
    emit(label, estimators::pathwise_second(sde, payoff, idx[0], idx[1], vc));
    return;
  }
  if (c.method == "pathwise" || c.method == "complexstep") {
    need(order == 1, "computes first order only");
    emit(label, c.method == "pathwise" ? estimators::pathwise_first(sde, payoff, idx[0], vc)
                                       : estimators::complex_step_first(sde, payoff, idx[0], vc));
    return;
  }
  throw NotApplicable("method '" + c.method + "' does not apply to model '" + c.model + "'");
}

estimators::BsCase bs_case(const ExperimentConfig& c) {
  return {c.x0[0], c.strike, c.sigma[0], c.r, c.maturity};
}

void run_point(const ExperimentConfig& c, double sweep, bool has_sweep, std::vector<CsvRow>& rows) {
  auto emit = [&](const std::string& greek, const EstimatorResult& r) {
    rows.push_back({sweep, has_sweep, c.method + ":" + greek, r});
  };
  if (c.method == "closed_form") {
    if (c.model != "bs1d" || c.payoff != "call") throw NotApplicable("closed_form covers the bs1d call");
    if (c.greek == "hessian") {
      auto h = analytics::bs_hessian(c.x0[0], c.strike, c.sigma[0], c.r, c.maturity);
      const char* n[4] = {"x0", "sigma", "r", "T"};
      for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) emit(std::string("d2/d") + n[a] + "/d" + n[b], exact(h[a * 4 + b]));
      return;
    }
    emit(c.greek, exact(analytics::bs_closed_form(c.x0[0], c.strike, c.sigma[0], c.r, c.maturity,
                                                  analytics::parse_bs_greek(c.greek))));
    return;
  }
  if (c.method == "levy") {
    if (!multi_asset(c)) throw NotApplicable("levy needs a basket model");
    emit(c.greek, exact(analytics::levy_basket(basket_weights(c), head(c.x0, c.dim), head(c.sigma, c.dim),
                                               correlation(c), c.r, c.maturity, basket_strike(c),
                                               analytics::parse_levy_greek(c.greek))));
    return;
  }
  const estimators::GammaRun run{c.M, c.seed, c.threads};
  if (c.method == "lrm" || c.method == "lrpw" || c.method == "malliavin") {
    if (c.model != "bs1d" || c.payoff != "call" || c.greek != "gamma")
      throw NotApplicable(c.method + " is implemented for the bs1d call Gamma");
    const auto bc = bs_case(c);
    emit("gamma", c.method == "lrm"    ? estimators::lrm_gamma_bs(bc, run)
                  : c.method == "lrpw" ? estimators::lrpw_gamma_bs(bc, run)
                                       : estimators::malliavin_gamma_bs(bc, run));
    return;
  }
  if (c.method == "variance_table") {
    if (c.model != "bs1d" || c.payoff != "call") throw NotApplicable("variance_table covers the bs1d call Gamma");
    std::vector<estimators::GammaMethod> ms;
    for (const auto& m : c.methods) {
      if (m == "vad") ms.push_back(estimators::GammaMethod::Vad);
      else if (m == "fd") ms.push_back(estimators::GammaMethod::Fd);
      else if (m == "lrpw") ms.push_back(estimators::GammaMethod::Lrpw);
      else if (m == "malliavin") ms.push_back(estimators::GammaMethod::Malliavin);
      else ms.push_back(estimators::GammaMethod::Lrm);
    }
    for (const auto& row : estimators::variance_table(c.maturities, ms, bs_case(c), run))
      for (std::size_t k = 0; k < ms.size(); ++k)
        rows.push_back({row.t, true, std::string(estimators::to_string(ms[k])) + ":gamma", row.results[k]});
    return;
  }
  const models::AnyModel model = make_model(c);
  std::visit([&](const auto& m) { run_sde(c, models::make_sde(m, c.maturity), sweep, has_sweep, rows); }, model);
}

}  // namespace

std::vector<CsvRow> run_experiment(const ExperimentConfig& cfg) {
  std::vector<CsvRow> rows;
  if (cfg.sweep_param.empty()) {
    run_point(cfg, 0.0, false, rows);
    return rows;
  }
  if (cfg.sweep_values.empty()) throw ConfigError("sweep has no values", 0, "sweep.values");
  for (double v : cfg.sweep_values) {
    ExperimentConfig c = cfg;
    set_param(c, cfg.sweep_param, v);
    run_point(c, v, true, rows);
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows, bool timing) {
  out << kCsvHeader << '\n';
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    out << (r.has_sweep ? num(r.sweep) : std::string()) << ',' << r.greek << ',' << num(r.result.estimate) << ','
        << num(r.result.std_error) << ',' << num(r.result.variance) << ',' << r.result.M << ','
        << (timing ? num(r.result.wall_time) : std::string()) << '\n';
  }
}

std::string csv_string(const std::vector<CsvRow>& rows, bool timing) {
  std::ostringstream s;
  write_csv(s, rows, timing);
  return s.str();
}

const std::vector<MethodInfo>& method_table() {
  static const std::vector<MethodInfo> t = {
      {"vibrato", "1,2", "Vibrato first-order kernel; explicit Vibrato-Vibrato for second order"},
      {"vad", "1,2,3", "Vibrato + forward AD: dual numbers over the first-order kernel"},
      {"vibvib", "2", "explicit second-order Vibrato kernel"},
      {"vvad", "3", "forward AD over the explicit second-order kernel"},
      {"vrad", "2", "Vibrato + reverse AD; full Hessian from one tape per path"},
      {"fd", "1,2", "bump-and-revalue on common random numbers (central or forward)"},
      {"complexstep", "1", "complex-step derivative through the Euler path"},
      {"pathwise", "1", "pathwise derivative with forward AD (refuses digital payoffs)"},
      {"lrm", "2", "likelihood-ratio Gamma, bs1d call, exact sampling"},
      {"lrpw", "2", "likelihood-ratio / pathwise mixed Gamma, bs1d call, exact sampling"},
      {"malliavin", "2", "Malliavin-weight Gamma, bs1d call, exact sampling"},
      {"ad_ramp", "2", "hyper-dual AD through the path; ramp with a smoothed Dirac second derivative"},
      {"lsmc", "0,1,2", "Longstaff-Schwartz American price with Vibrato + AD Delta and Gamma"},
      {"price", "0", "plain Euler Monte Carlo price"},
      {"closed_form", "0-3", "Black-Scholes call price and greeks"},
      {"levy", "0-2", "two-moment lognormal basket approximation"},
      {"variance_table", "2", "per-maturity Gamma variance comparison on common samples"},
  };
  return t;
}

namespace {

template <class M>
BenchReport bench_sde(const ExperimentConfig& c, const models::Sde<M>& sde) {
  const vibrato::Payoff payoff = make_payoff(c);
  const vibrato::VibratoConfig vc = vibrato_config(c);
  std::vector<std::string> names;
  if (!c.params.empty()) {
    names = greek_params(c);
  } else {
    ExperimentConfig h = c;
    h.greek = "hessian";
    names = greek_params(h);
  }
  std::vector<int> idx = param_indices(sde, names);
  const auto info = sde.info();
  BenchReport rep;
  for (int i : idx) rep.params.push_back(info.names[i]);

  estimators::BumpScheme sc;
  sc.bump = c.bump;
  sc.relative = c.bump_relative;
  vibrato::detail::Stopwatch sw;
  auto fd = estimators::fd_hessian(estimators::euler_pricer(sde, payoff, vc), sde.params(), idx, sc);
  rep.fd_seconds = sw.seconds();
  rep.fd_evaluations = fd.evaluations;
  rep.fd = fd.entries;

  auto vr = vibrato::hessian_vrad(sde, payoff, idx, vc);
  rep.vrad_seconds = vr.wall_time;
  rep.max_asymmetry_z = vr.max_asymmetry_z;
  const std::size_t np = idx.size();
  rep.vrad.assign(np, std::vector<EstimatorResult>(np));
  for (std::size_t a = 0; a < np; ++a)
    for (std::size_t b = 0; b < np; ++b) rep.vrad[a][b] = vr.hessian[a][b];

  if constexpr (std::is_same_v<M, models::Bs1d>) {
    if (payoff.kind == vibrato::Payoff::Kind::Call) {
      // Closed-form ordering is (x0, sigma, r, T).
      auto cf_index = [&](const std::string& n) {
        return n == "x0" ? 0 : n == "sigma" ? 1 : n == "r" ? 2 : 3;
      };
      auto h = analytics::bs_hessian(c.x0[0], c.strike, c.sigma[0], c.r, c.maturity);
      rep.closed_form.assign(np, std::vector<double>(np));
      for (std::size_t a = 0; a < np; ++a)
        for (std::size_t b = 0; b < np; ++b)
          rep.closed_form[a][b] = h[cf_index(rep.params[a]) * 4 + cf_index(rep.params[b])];
    }
  }
  return rep;
}

}  // namespace

BenchReport bench_hessian(const ExperimentConfig& cfg) {
  if (multi_asset(cfg) && cfg.params.empty()) {
    ExperimentConfig c = cfg;
    c.params = {"x0_0", "sigma_0", "r", "t"};
    return bench_hessian(c);
  }
  const models::AnyModel model = make_model(cfg);
  return std::visit([&](const auto& m) { return bench_sde(cfg, models::make_sde(m, cfg.maturity)); }, model);
}

std::string format_bench(const BenchReport& r) {
  std::ostringstream s;
  char buf[256];
  std::snprintf(buf, sizeof buf, "fd:   %.3f s, %d pricer evaluations\nvrad: %.3f s, one pass\nspeedup: %.2fx\n",
                r.fd_seconds, r.fd_evaluations, r.vrad_seconds, r.speedup());
  s << buf;
  std::snprintf(buf, sizeof buf, "max |H_ab - H_ba| / se: %.3f\n", r.max_asymmetry_z);
  s << buf;
  s << "entry,vrad,vrad_se,fd,fd_se" << (r.closed_form.empty() ? "" : ",closed_form") << '\n';
  for (std::size_t a = 0; a < r.params.size(); ++a)
    for (std::size_t b = a; b < r.params.size(); ++b) {
      std::snprintf(buf, sizeof buf, "d2/d%s/d%s,%.10g,%.3g,%.10g,%.3g", r.params[a].c_str(), r.params[b].c_str(),
                    r.vrad[a][b].estimate, r.vrad[a][b].std_error, r.fd[a][b].estimate, r.fd[a][b].std_error);
      s << buf;
      if (!r.closed_form.empty()) {
        std::snprintf(buf, sizeof buf, ",%.10g", r.closed_form[a][b]);
        s << buf;
      }
      s << '\n';
    }
  return s.str();
}

}  // namespace greeks::cli
