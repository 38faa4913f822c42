#pragma once

#include <span>
#include <string>
#include <vector>

#include "hypman/flow.hpp"
#include "hypman/manifold.hpp"

namespace hypman {

using Point = std::vector<double>;

struct PointCloudLayer {
  int j = 0;
  std::vector<Point> points;
  std::vector<std::size_t> source;  // index of the chart sample each point came from
  double integratorTolerance = 0;   // accumulated integrator tolerance, tol * j
  std::vector<std::string> log;     // dropped points
};

/// Layers phi_{-j}(S) for j = 0..maxJ, produced one at a time.  Layer j is
/// obtained from layer j-1 by flowing each point backwards for unit time.
/// There is deliberately no way to ask how many layers or points remain.
class GlobalStream {
 public:
  GlobalStream(const ManifoldChart& chart, const PolyVectorField& f, int maxJ, double tol,
               const FlowOptions& options = {});

  /// False once maxJ layers have been emitted.
  bool next(PointCloudLayer& out);

 private:
  CompiledField field_;
  int maxJ_;
  double tol_;
  FlowOptions options_;
  int j_ = 0;
  std::vector<Point> current_;
  std::vector<std::size_t> source_;
};

GlobalStream enumerate_global(const ManifoldChart& chart, const PolyVectorField& f, int maxJ, double tol,
                              const FlowOptions& options = {});

/// Hausdorff distance between finite point sets; OpenMP over points.
/// Throws EmptySet.
double hausdorff(std::span<const Point> A, std::span<const Point> B);
/// Serial reference with the same result.
double hausdorff_serial(std::span<const Point> A, std::span<const Point> B);

struct Window {
  double xmin = -1.1, xmax = 1, ymin = -0.1, ymax = 2;
  bool contains(double x, double y) const { return x >= xmin && x <= xmax && y >= ymin && y <= ymax; }
};

struct BranchTrace {
  Rational mu;
  std::vector<Point> polyline;
  Window window;
  double pitch = 1e-3;
};

/// The left branch of the unstable manifold of z2 = (1, 0) for
/// x' = x^2 - 1, y' = -x y + mu (x^2 - 1), resampled by arc length at `pitch`.
BranchTrace counterexample_branch(const Rational& mu, const Window& window = {}, double tol = 1e-10,
                                  double pitch = 1e-3);

/// Samples of {(x, 0) : -1 <= x <= 1} u {-1} x [0, ymax].
std::vector<Point> counterexample_a_set(double ymax = 2, double pitch = 1e-3);

/// Arc-length resampling of a polyline at about `pitch`, end points kept.
std::vector<Point> resample(std::span<const Point> poly, double pitch);

}  // namespace hypman
