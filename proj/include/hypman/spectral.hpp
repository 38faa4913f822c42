#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "hypman/ball.hpp"
#include "hypman/matrix.hpp"
#include "hypman/quadrature.hpp"
#include "hypman/rational.hpp"

namespace hypman {

struct EigenvalueCluster {
  ComplexBall enclosure;
  int multiplicity = 1;
  bool exact = false;  // enclosure is a certified exact rational root
};

struct EigenvalueEnclosures {
  std::vector<EigenvalueCluster> entries;

  int stable_count() const;
  int total() const;
};

/// Coefficients c_0..c_n of det(x I - A) (monic, c_n = 1).
std::vector<Rational> characteristic_polynomial(const RationalMatrix& A);

/// Certified root clusters of the characteristic polynomial.  `precision`
/// bounds the Aberth iteration count.  Throws NotHyperbolic if some cluster
/// meets the imaginary axis.
EigenvalueEnclosures enclose_eigenvalues(const RationalMatrix& A, int precision = 400);

struct HyperbolicGap {
  Rational sigma;
  Rational alpha;
  Rational alpha1;
  Rational alpha2;
  long M = 0;
  int k = 0;  // number of stable eigenvalues with multiplicity
  int n = 0;
};

HyperbolicGap compute_gap(const EigenvalueEnclosures& ev);

struct ContourPair {
  std::optional<Contour> stable;
  std::optional<Contour> unstable;
};

ContourPair build_contours(const HyperbolicGap& gap);

/// Integer upper bound of max over the contour of the HS norm of (A - xi I)^{-1}.
/// Throws ResolventUncertifiable when a piece of the contour cannot be certified.
long resolvent_norm_bound(const RationalMatrix& A, const Contour& contour);

struct SpectralSplit {
  RationalMatrix A;
  EigenvalueEnclosures eigenvalues;
  HyperbolicGap gap;
  ContourPair contours;
  long K1 = 0;
  long K = 0;
  BallMatrix P1;
  BallMatrix P2;
  std::vector<BallVector> stable_basis;
  std::vector<BallVector> unstable_basis;
  std::shared_ptr<const ContourRule> stable_rule;    // null when k = 0
  std::shared_ptr<const ContourRule> unstable_rule;  // null when k = n
};

/// Projections by contour quadrature at t = 0; K = 4 M K1.
SpectralSplit spectral_projections(const RationalMatrix& A, const EigenvalueEnclosures& ev,
                                   const HyperbolicGap& gap, const ContourPair& contours, long K1,
                                   const QuadratureOptions& options = {});

/// The whole chain: eigenvalues, gap, contours, K1, projections.
SpectralSplit split_matrix(const RationalMatrix& A, const QuadratureOptions& options = {});

/// Orthonormal basis of the column space of a projection's midpoint.
std::vector<BallVector> projection_basis(const BallMatrix& P, int rank);

}  // namespace hypman
