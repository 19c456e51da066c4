#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "greeks/cli/config.hpp"
#include "greeks/vibrato/types.hpp"

namespace greeks::cli {

struct CsvRow {
  double sweep = 0.0;
  bool has_sweep = false;
  std::string greek;
  vibrato::EstimatorResult result;
};

inline constexpr const char* kCsvHeader = "sweep,greek,estimate,std_error,variance,paths,wall_time";

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::uint64_t> M;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

// Runs every sweep point; throws ConfigError for incompatible method/model
// combinations and NumericalError subclasses for numerical failures.
std::vector<CsvRow> run_experiment(const ExperimentConfig& cfg);

// Full-precision CSV.  wall_time is written only when `timing` is set, so
// that the default output is byte-for-byte reproducible.
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows, bool timing);
std::string csv_string(const std::vector<CsvRow>& rows, bool timing);

struct MethodInfo {
  const char* name;
  const char* orders;
  const char* description;
};
const std::vector<MethodInfo>& method_table();

struct BenchReport {
  std::vector<std::string> params;
  double fd_seconds = 0.0;
  double vrad_seconds = 0.0;
  int fd_evaluations = 0;
  int vrad_passes = 1;
  std::vector<std::vector<vibrato::EstimatorResult>> fd, vrad;
  std::vector<std::vector<double>> closed_form;  // empty unless bs1d call
  double max_asymmetry_z = 0.0;

  double speedup() const { return vrad_seconds > 0.0 ? fd_seconds / vrad_seconds : 0.0; }
};

// FD Hessian (central, common random numbers) against VRAD on the same
// streams.  Parameters default to (x0, sigma, r, T).
BenchReport bench_hessian(const ExperimentConfig& cfg);
std::string format_bench(const BenchReport& r);

}  // namespace greeks::cli
