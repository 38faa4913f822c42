#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hypman/vector_field.hpp"

namespace hypman {

struct FlowOptions {
  double box = 10;                 // bounding box [-box, box]^n
  std::vector<double> lower;       // per-coordinate bounds; override box when non-empty
  std::vector<double> upper;
  double initial_step = 0;         // 0 picks a starting step from the field
  std::size_t max_steps = 20'000'000;
};

/// Called after each accepted step with the step's endpoints and derivatives,
/// enough for cubic Hermite interpolation.  Returning true stops the
/// integration at the end of that step.
struct StepView {
  double t0, t1;
  std::span<const double> x0, x1, f0, f1;
};
using StepObserver = std::function<bool(const StepView&)>;

struct IntegrationResult {
  std::vector<double> x;
  double t = 0;  // signed elapsed time
  std::size_t steps = 0;
  std::size_t rejected = 0;
  bool stopped = false;  // stopped by the observer
};

/// Dormand-Prince 5(4) with error-per-unit-step control: a step h is accepted
/// when its scaled local error is at most tol |h| / |tau|, so the local errors
/// sum to about tol over the whole run.  Deterministic.  Throws
/// LeftBoundingBoxError and StepUnderflow.
IntegrationResult integrate(const CompiledField& f, std::span<const double> x, double tau, double tol,
                            const FlowOptions& options = {}, const StepObserver& observer = {});

std::vector<double> flow(const CompiledField& f, std::span<const double> x, double tau, double tol,
                         const FlowOptions& options = {});
std::vector<double> flow(const PolyVectorField& f, std::span<const double> x, double tau, double tol,
                         const FlowOptions& options = {});

/// Cubic Hermite point on a step at t in [t0, t1] (or [t1, t0]).
std::vector<double> hermite(const StepView& s, double t);

}  // namespace hypman
