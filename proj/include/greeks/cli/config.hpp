#pragma once

// Experiment configuration: a flat INI-style file.
//
//   # comment
//   [section]
//   key = value
//
// Values are scalars, comma-separated lists, or ranges "start:stop:step"
// (inclusive) and "log:start:stop:count".  Every value remembers its line so
// validation errors point at the offending field.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace greeks::cli {

struct ConfigValue {
  std::string text;
  int line = 0;
};

class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in);
  static ConfigFile parse_string(const std::string& text);
  static ConfigFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  const ConfigValue* find(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double dflt) const;
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t dflt) const;
  bool get_bool(const std::string& section, const std::string& key, bool dflt) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& section, const std::string& key) const;

  // Rejects keys outside `allowed` for the section.
  void check_keys(const std::string& section, const std::vector<std::string>& allowed) const;
  void check_sections(const std::vector<std::string>& allowed) const;
  // Line of a section header (0 if absent).
  int section_line(const std::string& section) const;

 private:
  std::map<std::string, std::map<std::string, ConfigValue>> data_;
  std::map<std::string, int> section_lines_;
};

// Number parsing with a field-qualified error.
double parse_double(const ConfigValue& v, const std::string& field);
std::vector<double> parse_doubles(const ConfigValue& v, const std::string& field);

struct ExperimentConfig {
  // [model]
  std::string model = "bs1d";  // bs1d | gbm | gbm_log | heston
  std::vector<double> x0{100.0};
  std::vector<double> sigma{0.2};
  double r = 0.05;
  double maturity = 1.0;
  double v0 = 0.04, kappa = 1.0, eta = 0.04, xi = 0.1, rho = 0.0;
  std::vector<double> correlation;  // row-major, empty = identity
  int dim = 1;

  // [payoff]
  std::string payoff = "call";  // call | put | digital_up | digital_down | basket_call
  double strike = 100.0;
  bool strike_is_mean = false;  // basket: K = mean of x0
  std::vector<double> weights;  // basket; empty = equal
  double dirac_a = 1.0;

  // [method]
  std::string method = "vad";
  std::string greek = "gamma";
  std::vector<std::string> params;  // explicit parameter names, overrides greek
  std::uint64_t M = 100000;
  int MZ = 1;
  int n = 25;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string antithetic = "three_point";
  std::string mode = "pathwise";
  double bump = 0.01;
  bool bump_relative = true;
  bool bump_central = true;
  int basis_degree = 2;
  bool itm_only = false;
  bool never_exercise = false;
  std::string lsmc_kernel = "first_step";
  std::vector<double> maturities;  // variance_table
  std::vector<std::string> methods;  // variance_table

  // [sweep]
  std::string sweep_param;  // empty = single point
  std::vector<double> sweep_values;

  // [output]
  std::string out_path;
  bool timing = false;
};

ExperimentConfig load_experiment(const ConfigFile& f);
ExperimentConfig load_experiment_file(const std::string& path);

}  // namespace greeks::cli
