#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hypman {

enum class ErrorCode {
  DivisorContainsZero,
  PrecisionUnreachable,
  NotCertifiablyInvertible,
  SchemaError,
  DimensionMismatch,
  NotAnEquilibrium,
  NotHyperbolic,
  ResolventUncertifiable,
  QuadratureBudgetExceeded,
  RegimeViolation,
  MonitorViolation,
  HorizonTooShort,
  LeftBoundingBox,
  StepUnderflow,
  EmptySet,
  LevelTooLarge,
  OutsideUnitSquare,
  IOError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the integrator when a trajectory leaves its bounding box.
class LeftBoundingBoxError : public Error {
 public:
  explicit LeftBoundingBoxError(double t_exit)
      : Error(ErrorCode::LeftBoundingBox,
              "trajectory left the bounding box at t = " + std::to_string(t_exit)),
        t_exit_(t_exit) {}

  double t_exit() const noexcept { return t_exit_; }

 private:
  double t_exit_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hypman
