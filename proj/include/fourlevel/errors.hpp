#pragma once

#include <stdexcept>
#include <string>

namespace fourlevel {

enum class ErrorKind {
  Parameter,
  DegenerateSteadyState,
  Convergence,
  StepSize,
  Propagation,
  Accuracy,
  UndefinedTransmission,
  InconsistentParameters,
  Resolution,
  Config,
};

const char* to_string(ErrorKind kind);

/// Base of every error thrown by the simulator.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A steady-state failure during spatial integration, tagged with the position.
class PropagationError : public SimulationError {
 public:
  PropagationError(double z_cm, const std::string& what)
      : SimulationError(ErrorKind::Propagation, what), z_cm_(z_cm) {}

  double z_cm() const noexcept { return z_cm_; }

 private:
  double z_cm_;
};

/// Syntax or validation failure in a run configuration. line/column are
/// 1-based and zero when the error is not tied to a text position.
class ConfigError : public SimulationError {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0)
      : SimulationError(ErrorKind::Config, what), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace fourlevel
