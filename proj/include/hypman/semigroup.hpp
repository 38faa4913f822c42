#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "hypman/effective.hpp"
#include "hypman/matrix.hpp"
#include "hypman/spectral.hpp"

namespace hypman {

/// Evaluates the stable component I1(t), t >= 0, and the unstable component
/// I2(t), t <= 0, of e^{At}.  Values are cached by exact t and every freshly
/// computed value is checked against its exponential decay bound.
class SemigroupEvaluator {
 public:
  explicit SemigroupEvaluator(std::shared_ptr<const SpectralSplit> split, double quad_tolerance = 1e-12);

  /// Throws RegimeViolation for stable with t < 0 or unstable with t > 0.
  BallMatrix eval_component(Side side, const Rational& t) const;
  /// Any t; used only by the splitting check at small |t|.  Not cached.
  BallMatrix eval_unrestricted(Side side, const Rational& t) const;

  const SpectralSplit& split() const { return *split_; }
  std::shared_ptr<const SpectralSplit> split_ptr() const { return split_; }
  double quad_tolerance() const { return quad_tol_; }
  std::size_t cache_size() const;

 private:
  BallMatrix compute(Side side, const Rational& t) const;

  std::shared_ptr<const SpectralSplit> split_;
  double quad_tol_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::pair<int, Rational>, BallMatrix> cache_;
  mutable std::vector<std::shared_ptr<const ContourRule>> stable_rules_;
  mutable std::vector<std::shared_ptr<const ContourRule>> unstable_rules_;
};

/// Validated enclosure of e^{At} by scaling and squaring of a Taylor series.
BallMatrix matrix_exponential(const RationalMatrix& A, const Rational& t);

/// Upper bound on ||I1(t) + I2(t) - E|| for an enclosure E of e^{At}, t >= 0.
Rational splitting_check(const SemigroupEvaluator& ev, const Rational& t, const BallMatrix& mat_exp);

struct AnnihilationResiduals {
  Rational stable_times_P2;         // ||I1(t) P2||
  Rational unstable_times_P1;       // ||I2(-t) P1||
  Rational unstable_projection;     // ||P2 I2(-t) - I2(-t)||
};

AnnihilationResiduals annihilation_check(const SemigroupEvaluator& ev, const Rational& t);

/// One entry of a semigroup component as an effective real: level l uses a
/// quadrature tolerance of about 2^-(l+2).
EffectiveReal semigroup_entry(const RationalMatrix& A, const Contour& contour, const Rational& t,
                              std::size_t i, std::size_t j, int max_level = 44);

}  // namespace hypman
