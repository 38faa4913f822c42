#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "hypman/ball.hpp"
#include "hypman/matrix.hpp"
#include "hypman/rational.hpp"

namespace hypman {

enum class Side { Stable, Unstable };

struct ComplexRational {
  Rational re;
  Rational im;
  friend bool operator==(const ComplexRational&, const ComplexRational&) = default;
};

/// Axis-aligned rectangle traversed counterclockwise.
struct Contour {
  Side side = Side::Stable;
  std::array<ComplexRational, 4> vertices;
};

enum class QuadratureMode { Rigorous, Fast };

struct QuadratureOptions {
  double tolerance = 1e-12;
  QuadratureMode mode = QuadratureMode::Rigorous;
  int order = 16;                 // Gauss-Legendre nodes per segment
  std::size_t max_segments = 4000;
  int subdivide = 1;              // extra uniform splitting of every accepted segment
};

/// Gauss-Legendre nodes and weights on [-1, 1], accurate to kGaussNodeError.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int order);
inline constexpr double kGaussNodeError = 0x1p-50;

/// Cached quadrature of t -> integral over a contour of e^{xi t} (A - xi I)^{-1} d xi.
/// Resolvents at the nodes are certified once; each time value then costs one
/// weighted sum.  In rigorous mode every segment carries a truncation bound
/// from a certified sup of the resolvent over a Bernstein-ellipse box.
class ContourRule {
 public:
  ContourRule(const RationalMatrix& A, const Contour& contour, const QuadratureOptions& options);

  /// Semigroup component -(1/2 pi i) * integral, parallel over segments.
  BallMatrix component(const Rational& t) const;
  /// Same result computed by a single thread, in the same summation order.
  BallMatrix component_serial(const Rational& t) const;

  std::size_t segment_count() const { return segments_.size(); }
  std::size_t dim() const { return n_; }
  const QuadratureOptions& options() const { return options_; }

 private:
  struct Ellipse {
    double rho;
    double resolvent_bound;  // sup of the HS norm of the resolvent over the box
    double re_lo, re_hi;     // real range of the box
    double factor;           // h (64/15) rho^-2n / (rho^2 - 1) * resolvent_bound
  };
  struct Segment {
    std::complex<double> a, b;
    std::vector<ComplexBall> nodes;
    std::vector<ComplexBall> weights;  // includes the half-length factor
    std::vector<ComplexBallMatrix> resolvents;
    std::vector<Ellipse> ellipses;
    // fast mode
    std::vector<std::complex<double>> fast_nodes, fast_weights;
    std::vector<Eigen::MatrixXcd> fast_resolvents;
    std::size_t fast_coarse = 0;
  };

  bool try_segment(Segment& seg, double budget) const;
  bool try_segment_fast(Segment& seg, double budget) const;
  ComplexBallMatrix segment_sum(const Segment& seg, const Ball& t) const;
  BallMatrix finish(const std::vector<ComplexBallMatrix>& partials) const;

  std::size_t n_ = 0;
  RationalMatrix A_;
  ComplexBallMatrix A_ball_;
  Eigen::MatrixXcd A_mid_;
  QuadratureOptions options_;
  GaussRule gauss_;
  GaussRule gauss_fine_;
  std::vector<Segment> segments_;
};

/// Certified sup of the HS norm of (A - xi I)^{-1} over a complex box, with
/// up to `depth` levels of 2x2 subdivision.  Returns +inf when uncertifiable.
double resolvent_sup(const ComplexBallMatrix& A, const Ball& re, const Ball& im, int depth);

}  // namespace hypman
