#include "hypman/error.hpp"

namespace hypman {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisorContainsZero: return "DivisorContainsZero";
    case ErrorCode::PrecisionUnreachable: return "PrecisionUnreachable";
    case ErrorCode::NotCertifiablyInvertible: return "NotCertifiablyInvertible";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotAnEquilibrium: return "NotAnEquilibrium";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::ResolventUncertifiable: return "ResolventUncertifiable";
    case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorCode::RegimeViolation: return "RegimeViolation";
    case ErrorCode::MonitorViolation: return "MonitorViolation";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::LeftBoundingBox: return "LeftBoundingBox";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::LevelTooLarge: return "LevelTooLarge";
    case ErrorCode::OutsideUnitSquare: return "OutsideUnitSquare";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace hypman
