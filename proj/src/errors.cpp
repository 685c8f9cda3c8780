#include "fourlevel/errors.hpp"

namespace fourlevel {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "ParameterError";
    case ErrorKind::DegenerateSteadyState: return "DegenerateSteadyState";
    case ErrorKind::Convergence: return "ConvergenceError";
    case ErrorKind::StepSize: return "StepSizeError";
    case ErrorKind::Propagation: return "PropagationError";
    case ErrorKind::Accuracy: return "AccuracyError";
    case ErrorKind::UndefinedTransmission: return "UndefinedTransmission";
    case ErrorKind::InconsistentParameters: return "InconsistentParameters";
    case ErrorKind::Resolution: return "ResolutionError";
    case ErrorKind::Config: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace fourlevel
