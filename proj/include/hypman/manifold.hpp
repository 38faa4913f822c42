#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hypman/diagnostics.hpp"
#include "hypman/semigroup.hpp"
#include "hypman/spectral.hpp"
#include "hypman/vector_field.hpp"

namespace hypman {

struct RadiusCertificate {
  long m0 = 0;
  long d = 0;              // d(m0)
  Rational r;              // 2^-d / (2K)
  Rational eta;            // 2^-d
  Rational dRadius;        // 2^-d / (4K^2)
  Rational gamma;          // 2^-d
  Rational epsilonBase2;   // rational lower bound of alpha1 / ln 2
  Rational alpha1;         // decay rate in base e
  Rational delta;          // 2^-d / (2K)
};

RadiusCertificate radius_certificate(const SpectralSplit& split, const NonlinearRemainder& rem);

struct PicardOptions {
  double tol = 1e-9;
  std::optional<double> horizon;  // requested T; HorizonTooShort if its tail bound exceeds tol/2
  std::optional<int> step_exponent;  // force h = 2^-k (tests)
  bool check_monitors = true;
  bool parallel = true;  // OpenMP over grid points inside a solve
};

struct IterationRecord {
  double gap = 0;        // sup over the grid of |u_j - u_{j-1}|
  double ine1_margin = 0;  // max of lhs - rhs (nonpositive when satisfied)
  double ine2_margin = 0;
};

struct PicardSolution {
  std::vector<double> a;
  double h = 0;
  std::size_t steps = 0;       // N; grid times are i h for i = 0..N
  std::vector<double> values;  // (N+1) x n, row-major
  double uniformError = 0;
  int iterations = 0;
  std::vector<IterationRecord> history;
  double sup_norm = 0;  // max over the grid of |u|
  std::vector<double> phi;  // u(0) - P1 a, a point of the unstable space
  double phiError = 0;
  MonitorCounters monitors;

  double interpolationError = 0;  // added to uniformError between grid nodes

  std::span<const double> at(std::size_t i) const;
  /// Linear interpolation on the grid, t in [0, T].
  std::vector<double> value_at(double t) const;
  std::size_t dim() const { return a.size(); }
};

/// Successive approximations of the stable-manifold integral equation on a
/// uniform grid.  Convolutions are evaluated by trapezoid sums whose kernels
/// are powers of I1(h) and I2(-h), computed in O(N) by recursion.
class PicardEngine {
 public:
  PicardEngine(std::shared_ptr<const SemigroupEvaluator> semigroup, const NonlinearRemainder& rem,
               const RadiusCertificate& cert, double a_max, const PicardOptions& options = {});

  /// Requires |a| <= a_max (< r).
  PicardSolution solve(std::span<const double> a) const;
  /// Same iteration with kernels I1(jh), I2(-jh) taken directly from the
  /// semigroup evaluator and O(N^2) sums; a serial reference for small grids.
  PicardSolution solve_reference(std::span<const double> a) const;

  /// Unstable part of u(0, b): phi(b) = -int_0^inf I2(-s) F(u(s, b)) ds.
  std::vector<double> phi(std::span<const double> b, double* error = nullptr) const;

  double step() const { return h_; }
  std::size_t steps() const { return N_; }
  double horizon() const { return h_ * static_cast<double>(N_); }
  double tol() const { return options_.tol; }
  double operator_error() const { return e_op_; }
  double contraction() const { return q_; }
  const RadiusCertificate& certificate() const { return cert_; }
  const SemigroupEvaluator& semigroup() const { return *semigroup_; }
  const NonlinearRemainder& remainder() const { return rem_; }
  const Eigen::MatrixXd& P1() const { return P1_; }
  const Eigen::MatrixXd& P2() const { return P2_; }

 private:
  template <class Sweep>
  PicardSolution iterate(std::span<const double> a, Sweep&& sweep) const;
  void sweep_recursive(const std::vector<double>& G, const Eigen::VectorXd& Pa, std::vector<double>& out,
                       double* mat_err) const;
  void sweep_direct(const std::vector<double>& G, const Eigen::VectorXd& Pa, std::vector<double>& out,
                    double* mat_err) const;

  std::shared_ptr<const SemigroupEvaluator> semigroup_;
  NonlinearRemainder rem_;
  CompiledField F_;
  RadiusCertificate cert_;
  PicardOptions options_;
  std::size_t n_ = 0;
  double h_ = 0;
  std::size_t N_ = 0;
  double K_ = 0, eta_ = 0, alpha1_ = 0, lip_m0_ = 0, a_max_ = 0;
  double interp_ = 0;  // h^2/8 max |u''|
  double q_ = 0;       // contraction constant of the discrete operator
  double e_op_ = 0;    // consistency error excluding matrix-radius terms
  Eigen::MatrixXd P1_, P2_, Ih_, Jh_;
  double dP1_ = 0, dP2_ = 0, dIh_ = 0, dJh_ = 0;  // HS norms of the radius matrices
  double QI_ = 0, QJ_ = 0;                         // max norms of the powers of Ih, Jh
  std::vector<double> envelope_;                   // e^{-alpha1 t_i}
};

struct ChartSample {
  std::vector<double> coords;  // b in basis coordinates
  std::vector<double> local;   // b + phi(b) in coordinates centred at x0
  std::vector<double> point;   // x0 + local
  std::vector<double> phi;
  double error = 0;
  double sup_norm = 0;          // max over t of |u(t, b)|
  double initial_residual = 0;  // |u(0, a) - a| for a = local
};

struct ManifoldChart {
  Side kind = Side::Stable;
  std::size_t n = 0;
  std::size_t k = 0;
  RationalVector x0;
  std::vector<BallVector> basis;
  Rational r;
  Rational lipschitz;        // 3K, Lipschitz constant of a -> u(., a)
  Rational graphLipschitz;   // 1 + 3K^2 2^-m0 / sigma
  Rational tangency;         // 3K^2 2^-m0 / sigma
  RadiusCertificate certificate;
  HyperbolicGap gap;
  long K1 = 0;
  long K = 0;
  double tol = 0;
  int gridResolution = 0;
  std::vector<ChartSample> samples;
  MonitorCounters monitors;
  std::shared_ptr<const PicardEngine> engine;  // solves in local (shifted, possibly reversed) coordinates
  PolyVectorField field;                       // the original field f
};

struct LocalOptions {
  QuadratureOptions quadrature;
  PicardOptions picard;
  bool parallel = true;  // OpenMP over chart nodes; false runs the serial loop
};

ManifoldChart local_manifold(const PolyVectorField& f, std::span<const Rational> x0, Side kind,
                             int gridResolution, double tol, const LocalOptions& options = {});

/// |P2 y - phi(P1 y)| for y in local coordinates, with phi evaluated on demand.
double graph_distance(const ManifoldChart& chart, std::span<const double> local);

struct DivergenceWitness {
  bool exited = false;  // false means inconclusive within maxTime
  double exit_time = 0;
  double distance_to_chart = 0;
};

/// Integrates x forward (original coordinates) until |x - x0| > eta.
DivergenceWitness divergence_check(const ManifoldChart& chart, std::span<const double> x, double maxTime,
                                   double tol = 1e-10);

}  // namespace hypman
