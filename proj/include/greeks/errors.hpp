#pragma once

#include <stdexcept>
#include <string>

namespace greeks {

// Numerical failures map to CLI exit code 3, ConfigError to 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : NumericalError {
  using NumericalError::NumericalError;
};
struct SingularDiffusion : NumericalError {
  using NumericalError::NumericalError;
};
struct StateBlowup : NumericalError {
  using NumericalError::NumericalError;
};
struct RankFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct MissingSecondPartials : std::logic_error {
  using std::logic_error::logic_error;
};
struct UnmarkedInput : std::logic_error {
  using std::logic_error::logic_error;
};
struct NotApplicable : std::logic_error {
  using std::logic_error::logic_error;
};

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line = 0, std::string field = {})
      : std::runtime_error(format(msg, line, field)), line(line), field(std::move(field)) {}
  int line;
  std::string field;

 private:
  static std::string format(const std::string& msg, int line, const std::string& field) {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    if (!field.empty()) s += "'" + field + "': ";
    return s + msg;
  }
};

}  // namespace greeks
