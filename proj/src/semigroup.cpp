#include "hypman/semigroup.hpp"

#include <cmath>
#include <mutex>

#include "hypman/diagnostics.hpp"
#include "hypman/error.hpp"
#include "hypman/rounding.hpp"

namespace hypman {

using namespace rnd;

SemigroupEvaluator::SemigroupEvaluator(std::shared_ptr<const SpectralSplit> split, double quad_tolerance)
    : split_(std::move(split)), quad_tol_(quad_tolerance) {
  if (split_->stable_rule) stable_rules_.push_back(split_->stable_rule);
  if (split_->unstable_rule) unstable_rules_.push_back(split_->unstable_rule);
}

std::size_t SemigroupEvaluator::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

BallMatrix SemigroupEvaluator::compute(Side side, const Rational& t) const {
  const std::size_t n = split_->A.rows();
  const auto& contour = side == Side::Stable ? split_->contours.stable : split_->contours.unstable;
  if (!contour) return BallMatrix(n, n);
  auto& rules = side == Side::Stable ? stable_rules_ : unstable_rules_;
  std::size_t level = 0;
  for (;;) {
    std::shared_ptr<const ContourRule> rule;
    {
      std::unique_lock lock(mutex_);
      if (level < rules.size()) rule = rules[level];
    }
    if (!rule) {
      std::shared_ptr<const ContourRule> coarser;
      {
        std::shared_lock lock(mutex_);
        coarser = rules[level - 1];
      }
      QuadratureOptions opt = coarser->options();
      opt.tolerance *= 1e-3;
      auto built = std::make_shared<const ContourRule>(split_->A, *contour, opt);
      std::unique_lock lock(mutex_);
      if (level == rules.size()) rules.push_back(built);
      rule = rules[level];
    }
    BallMatrix value = rule->component(t);
    if (max_radius(value) <= quad_tol_) return value;
    if (++level > 3) {
      fail(ErrorCode::QuadratureBudgetExceeded,
           "semigroup component radius " + std::to_string(max_radius(value)) + " above tolerance");
    }
  }
}

BallMatrix SemigroupEvaluator::eval_component(Side side, const Rational& t) const {
  if ((side == Side::Stable && t < 0) || (side == Side::Unstable && t > 0)) {
    fail(ErrorCode::RegimeViolation, "semigroup component evaluated outside its decaying regime");
  }
  const std::pair<int, Rational> key{side == Side::Stable ? 0 : 1, t};
  {
    std::shared_lock lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  BallMatrix value = compute(side, t);
  // decay bound K e^{-(alpha+sigma) t} or K e^{sigma t}, checked on midpoints
  const HyperbolicGap& g = split_->gap;
  const Ball rate = side == Side::Stable ? -Ball::from_rational(g.alpha + g.sigma) : Ball::from_rational(g.sigma);
  const double bound = mul_up(static_cast<double>(split_->K), exp(rate * Ball::from_rational(t)).upper());
  Diagnostics::instance().record_decay(hs_norm_upper(mid(value)) <= bound);
  std::unique_lock lock(mutex_);
  return cache_.emplace(key, std::move(value)).first->second;
}

BallMatrix SemigroupEvaluator::eval_unrestricted(Side side, const Rational& t) const {
  return compute(side, t);
}

BallMatrix matrix_exponential(const RationalMatrix& A, const Rational& t) {
  const std::size_t n = A.rows();
  RationalMatrix B = A;
  for (auto& x : B.data()) x *= t;
  const Rational norm = hs_norm_bound(B);
  long s = 0;
  while (norm * pow2(-s) > Rational(1, 2)) ++s;
  for (auto& x : B.data()) x *= pow2(-s);
  const BallMatrix Bb = to_ball(B);
  const double nb = to_double_up(norm * pow2(-s));
  constexpr int N = 24;
  BallMatrix S = BallMatrix::identity(n);
  for (int k = N; k >= 1; --k) {
    S = BallMatrix::identity(n) + Ball(1.0) / Ball(static_cast<double>(k)) * (Bb * S);
  }
  // remainder ||B||^{N+1}/(N+1)! / (1 - ||B||/(N+2))
  double rem = 1;
  for (int k = 1; k <= N + 1; ++k) rem = div_up(mul_up(rem, nb), static_cast<double>(k));
  rem = div_up(rem, sub_down(1.0, div_up(nb, N + 2.0)));
  for (auto& x : S.data()) x = inflate(x, rem);
  for (long k = 0; k < s; ++k) S = S * S;
  return S;
}

Rational splitting_check(const SemigroupEvaluator& ev, const Rational& t, const BallMatrix& mat_exp) {
  if (t < 0) fail(ErrorCode::RegimeViolation, "splitting check needs t >= 0");
  const BallMatrix I1 = ev.eval_component(Side::Stable, t);
  const BallMatrix I2 = ev.eval_unrestricted(Side::Unstable, t);
  return hs_norm_bound(I1 + I2 - mat_exp);
}

AnnihilationResiduals annihilation_check(const SemigroupEvaluator& ev, const Rational& t) {
  if (t < 0) fail(ErrorCode::RegimeViolation, "annihilation check needs t >= 0");
  const SpectralSplit& s = ev.split();
  const BallMatrix I1 = ev.eval_component(Side::Stable, t);
  const BallMatrix I2 = ev.eval_component(Side::Unstable, -t);
  AnnihilationResiduals r;
  r.stable_times_P2 = hs_norm_bound(I1 * s.P2);
  r.unstable_times_P1 = hs_norm_bound(I2 * s.P1);
  r.unstable_projection = hs_norm_bound(s.P2 * I2 - I2);
  return r;
}

EffectiveReal semigroup_entry(const RationalMatrix& A, const Contour& contour, const Rational& t,
                              std::size_t i, std::size_t j, int max_level) {
  return EffectiveReal::from_evaluator(
      [A, contour, t, i, j](int level) {
        QuadratureOptions opt;
        opt.tolerance = std::max(std::ldexp(1.0, -(level + 2)), 1e-14);
        const ContourRule rule(A, contour, opt);
        return rule.component(t)(i, j);
      },
      max_level);
}

}  // namespace hypman
