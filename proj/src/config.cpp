#include "greeks/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "greeks/errors.hpp"

namespace greeks::cli {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& s, const ConfigValue& v, const std::string& field) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ConfigError("expected a number, got '" + s + "'", v.line, field);
  return x;
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile f;
  std::string line, section;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", ln);
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError("empty section name", ln);
      if (f.section_lines_.count(section)) throw ConfigError("duplicate section", ln, section);
      f.section_lines_[section] = ln;
      f.data_[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", ln);
    if (section.empty()) throw ConfigError("key outside of any section", ln);
    std::string key = lower(trim(line.substr(0, eq)));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", ln);
    auto& sec = f.data_[section];
    if (sec.count(key)) throw ConfigError("duplicate key", ln, section + "." + key);
    sec[key] = {val, ln};
  }
  return f;
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

bool ConfigFile::has(const std::string& s, const std::string& k) const { return find(s, k) != nullptr; }

const ConfigValue* ConfigFile::find(const std::string& s, const std::string& k) const {
  auto it = data_.find(s);
  if (it == data_.end()) return nullptr;
  auto jt = it->second.find(k);
  return jt == it->second.end() ? nullptr : &jt->second;
}

int ConfigFile::section_line(const std::string& s) const {
  auto it = section_lines_.find(s);
  return it == section_lines_.end() ? 0 : it->second;
}

std::string ConfigFile::get_string(const std::string& s, const std::string& k) const {
  const ConfigValue* v = find(s, k);
  if (!v) throw ConfigError("missing required key", section_line(s), s + "." + k);
  return v->text;
}

std::string ConfigFile::get_string(const std::string& s, const std::string& k, const std::string& dflt) const {
  const ConfigValue* v = find(s, k);
  return v ? v->text : dflt;
}

double parse_double(const ConfigValue& v, const std::string& field) { return to_double(v.text, v, field); }

std::vector<double> parse_doubles(const ConfigValue& v, const std::string& field) {
  const std::string& t = v.text;
  std::vector<double> out;
  if (t.rfind("log:", 0) == 0) {
    auto parts = split(t.substr(4), ':');
    if (parts.size() != 3) throw ConfigError("expected log:start:stop:count", v.line, field);
    double a = to_double(parts[0], v, field), b = to_double(parts[1], v, field);
    double c = to_double(parts[2], v, field);
    if (!(a > 0.0) || !(b > 0.0) || c < 2 || c != std::floor(c))
      throw ConfigError("log range needs positive ends and an integer count >= 2", v.line, field);
    const int cnt = static_cast<int>(c);
    for (int i = 0; i < cnt; ++i) out.push_back(a * std::pow(b / a, static_cast<double>(i) / (cnt - 1)));
    return out;
  }
  if (t.find(':') != std::string::npos) {
    auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError("expected start:stop:step", v.line, field);
    double a = to_double(parts[0], v, field), b = to_double(parts[1], v, field);
    double st = to_double(parts[2], v, field);
    if (!(st > 0.0) || b < a) throw ConfigError("range needs step > 0 and stop >= start", v.line, field);
    const long cnt = static_cast<long>(std::floor((b - a) / st + 1e-9)) + 1;
    if (cnt > 1000000) throw ConfigError("range too long", v.line, field);
    for (long i = 0; i < cnt; ++i) out.push_back(a + st * static_cast<double>(i));
    return out;
  }
  for (const auto& p : split(t, ',')) out.push_back(to_double(p, v, field));
  if (out.empty()) throw ConfigError("empty list", v.line, field);
  return out;
}

double ConfigFile::get_double(const std::string& s, const std::string& k) const {
  const ConfigValue* v = find(s, k);
  if (!v) throw ConfigError("missing required key", section_line(s), s + "." + k);
  return parse_double(*v, s + "." + k);
}

double ConfigFile::get_double(const std::string& s, const std::string& k, double dflt) const {
  const ConfigValue* v = find(s, k);
  return v ? parse_double(*v, s + "." + k) : dflt;
}

std::int64_t ConfigFile::get_int(const std::string& s, const std::string& k, std::int64_t dflt) const {
  const ConfigValue* v = find(s, k);
  if (!v) return dflt;
  double x = parse_double(*v, s + "." + k);
  if (x != std::floor(x) || std::fabs(x) > 9e15) throw ConfigError("expected an integer", v->line, s + "." + k);
  return static_cast<std::int64_t>(x);
}

bool ConfigFile::get_bool(const std::string& s, const std::string& k, bool dflt) const {
  const ConfigValue* v = find(s, k);
  if (!v) return dflt;
  std::string t = lower(v->text);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ConfigError("expected true or false, got '" + v->text + "'", v->line, s + "." + k);
}

std::vector<double> ConfigFile::get_doubles(const std::string& s, const std::string& k) const {
  const ConfigValue* v = find(s, k);
  if (!v) throw ConfigError("missing required key", section_line(s), s + "." + k);
  return parse_doubles(*v, s + "." + k);
}

std::vector<std::string> ConfigFile::get_strings(const std::string& s, const std::string& k) const {
  const ConfigValue* v = find(s, k);
  if (!v) return {};
  auto out = split(v->text, ',');
  for (auto& x : out)
    if (x.empty()) throw ConfigError("empty list element", v->line, s + "." + k);
  return out;
}

void ConfigFile::check_keys(const std::string& s, const std::vector<std::string>& allowed) const {
  auto it = data_.find(s);
  if (it == data_.end()) return;
  for (const auto& [k, v] : it->second)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("unknown key", v.line, s + "." + k);
}

void ConfigFile::check_sections(const std::vector<std::string>& allowed) const {
  for (const auto& [s, ln] : section_lines_)
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) throw ConfigError("unknown section", ln, s);
}

namespace {

void require_one_of(const ConfigFile& f, const std::string& s, const std::string& k, const std::string& v,
                    const std::vector<std::string>& opts) {
  if (std::find(opts.begin(), opts.end(), v) != opts.end()) return;
  std::string all;
  for (const auto& o : opts) all += (all.empty() ? "" : ", ") + o;
  const ConfigValue* cv = f.find(s, k);
  throw ConfigError("'" + v + "' is not one of: " + all, cv ? cv->line : f.section_line(s), s + "." + k);
}

void require(bool ok, const ConfigFile& f, const std::string& s, const std::string& k, const std::string& msg) {
  if (ok) return;
  const ConfigValue* cv = f.find(s, k);
  throw ConfigError(msg, cv ? cv->line : f.section_line(s), s + "." + k);
}

}  // namespace

ExperimentConfig load_experiment(const ConfigFile& f) {
  f.check_sections({"model", "payoff", "method", "sweep", "output"});
  f.check_keys("model", {"type", "x0", "sigma", "r", "t", "v0", "kappa", "eta", "xi", "rho", "correlation", "dim"});
  f.check_keys("payoff", {"type", "strike", "weights", "dirac_a"});
  f.check_keys("method", {"name", "greek", "params", "m", "mz", "n", "seed", "threads", "antithetic", "mode", "bump",
                          "bump_relative", "bump_mode", "basis_degree", "itm_only", "never_exercise", "lsmc_kernel",
                          "maturities", "methods"});
  f.check_keys("sweep", {"param", "values"});
  f.check_keys("output", {"path", "timing"});

  ExperimentConfig c;
  c.model = lower(f.get_string("model", "type", "bs1d"));
  require_one_of(f, "model", "type", c.model, {"bs1d", "gbm", "gbm_log", "heston"});
  c.dim = static_cast<int>(f.get_int("model", "dim", 0));
  if (f.has("model", "x0")) c.x0 = f.get_doubles("model", "x0");
  if (f.has("model", "sigma")) c.sigma = f.get_doubles("model", "sigma");
  c.r = f.get_double("model", "r", c.r);
  c.maturity = f.get_double("model", "t", c.maturity);
  require(c.maturity > 0.0, f, "model", "t", "maturity must be positive");
  c.v0 = f.get_double("model", "v0", c.v0);
  c.kappa = f.get_double("model", "kappa", c.kappa);
  c.eta = f.get_double("model", "eta", c.eta);
  c.xi = f.get_double("model", "xi", c.xi);
  c.rho = f.get_double("model", "rho", c.rho);
  if (f.has("model", "correlation")) c.correlation = f.get_doubles("model", "correlation");
  for (double x : c.x0) require(x > 0.0, f, "model", "x0", "initial values must be positive");
  for (double s : c.sigma) require(s >= 0.0, f, "model", "sigma", "volatilities must be non-negative");

  if (c.model == "gbm" || c.model == "gbm_log") {
    const int full = static_cast<int>(c.x0.size());
    require(c.sigma.size() == c.x0.size(), f, "model", "sigma", "needs one volatility per asset");
    if (c.dim == 0) c.dim = full;
    require(c.dim >= 1 && c.dim <= full && c.dim <= 8, f, "model", "dim", "dim must be in [1, min(8, #x0)]");
    if (!c.correlation.empty())
      require(static_cast<int>(c.correlation.size()) == full * full, f, "model", "correlation",
              "correlation needs #x0 * #x0 entries, row-major");
  } else {
    require(c.x0.size() == 1, f, "model", "x0", "one-dimensional model takes a single x0");
    if (c.model == "bs1d") require(c.sigma.size() == 1, f, "model", "sigma", "bs1d takes a single sigma");
    if (c.model == "heston") require(std::fabs(c.rho) < 1.0, f, "model", "rho", "|rho| must be < 1");
    c.dim = 1;
  }

  c.payoff = lower(f.get_string("payoff", "type", "call"));
  require_one_of(f, "payoff", "type", c.payoff, {"call", "put", "digital_up", "digital_down", "basket_call"});
  const bool multi = c.model == "gbm" || c.model == "gbm_log";
  if (c.payoff == "basket_call") require(multi, f, "payoff", "type", "basket_call needs model gbm or gbm_log");
  if (multi && c.dim > 1)
    require(c.payoff == "basket_call", f, "payoff", "type", "multi-asset models need basket_call");
  if (lower(f.get_string("payoff", "strike", "")) == "mean") {
    c.strike_is_mean = true;
  } else {
    c.strike = f.get_double("payoff", "strike", c.strike);
    require(c.strike >= 0.0, f, "payoff", "strike", "strike must be non-negative");
  }
  if (f.has("payoff", "weights") && lower(f.get_string("payoff", "weights")) != "equal")
    c.weights = f.get_doubles("payoff", "weights");
  c.dirac_a = f.get_double("payoff", "dirac_a", c.dirac_a);
  require(c.dirac_a > 0.0, f, "payoff", "dirac_a", "Dirac bandwidth must be positive");

  c.method = lower(f.get_string("method", "name"));
  require_one_of(f, "method", "name", c.method,
                 {"vibrato", "vad", "vibvib", "vvad", "vrad", "fd", "complexstep", "pathwise", "lrm", "lrpw",
                  "malliavin", "lsmc", "price", "closed_form", "levy", "variance_table", "ad_ramp"});
  c.greek = lower(f.get_string("method", "greek", c.greek));
  c.params = f.get_strings("method", "params");
  const std::int64_t m = f.get_int("method", "m", static_cast<std::int64_t>(c.M));
  require(m >= 1, f, "method", "m", "M must be >= 1");
  c.M = static_cast<std::uint64_t>(m);
  c.MZ = static_cast<int>(f.get_int("method", "mz", c.MZ));
  require(c.MZ >= 1, f, "method", "mz", "MZ must be >= 1");
  c.n = static_cast<int>(f.get_int("method", "n", c.n));
  require(c.n >= 1, f, "method", "n", "n must be >= 1");
  const std::int64_t seed = f.get_int("method", "seed", static_cast<std::int64_t>(c.seed));
  require(seed >= 0, f, "method", "seed", "seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.threads = static_cast<int>(f.get_int("method", "threads", c.threads));
  require(c.threads >= 0, f, "method", "threads", "threads must be >= 0");
  c.antithetic = lower(f.get_string("method", "antithetic", c.antithetic));
  require_one_of(f, "method", "antithetic", c.antithetic, {"off", "two_point", "three_point"});
  c.mode = lower(f.get_string("method", "mode", c.mode));
  require_one_of(f, "method", "mode", c.mode, {"pathwise", "likelihood_ratio"});
  c.bump = f.get_double("method", "bump", c.bump);
  require(c.bump > 0.0, f, "method", "bump", "bump must be positive");
  c.bump_relative = f.get_bool("method", "bump_relative", c.bump_relative);
  std::string bm = lower(f.get_string("method", "bump_mode", "central"));
  require_one_of(f, "method", "bump_mode", bm, {"central", "forward"});
  c.bump_central = bm == "central";
  c.basis_degree = static_cast<int>(f.get_int("method", "basis_degree", c.basis_degree));
  require(c.basis_degree >= 0 && c.basis_degree <= 15, f, "method", "basis_degree", "degree must be in [0, 15]");
  c.itm_only = f.get_bool("method", "itm_only", c.itm_only);
  c.never_exercise = f.get_bool("method", "never_exercise", c.never_exercise);
  c.lsmc_kernel = lower(f.get_string("method", "lsmc_kernel", c.lsmc_kernel));
  require_one_of(f, "method", "lsmc_kernel", c.lsmc_kernel, {"first_step", "at_exercise"});
  if (f.has("method", "maturities")) {
    c.maturities = f.get_doubles("method", "maturities");
    for (double t : c.maturities) require(t > 0.0, f, "method", "maturities", "maturities must be positive");
  }
  c.methods = f.get_strings("method", "methods");
  if (c.method == "variance_table") {
    require(!c.maturities.empty(), f, "method", "maturities", "variance_table needs a maturity list");
    if (c.methods.empty()) c.methods = {"vad", "fd", "lrpw", "malliavin"};
    for (auto& s : c.methods) {
      s = lower(s);
      require_one_of(f, "method", "methods", s, {"vad", "fd", "lrpw", "malliavin", "lrm"});
    }
  }

  if (f.has("sweep", "param") || f.has("sweep", "values")) {
    c.sweep_param = lower(f.get_string("sweep", "param"));
    c.sweep_values = f.get_doubles("sweep", "values");
  }

  c.out_path = f.get_string("output", "path", "");
  c.timing = f.get_bool("output", "timing", false);
  return c;
}

ExperimentConfig load_experiment_file(const std::string& path) { return load_experiment(ConfigFile::load(path)); }

}  // namespace greeks::cli
