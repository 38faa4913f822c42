#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "hypman/ball.hpp"
#include "hypman/rational.hpp"

namespace hypman {

/// A real number that can be queried for enclosures at increasing levels of
/// working effort.  Enclosures returned by at() never grow with the level.
class EffectiveReal {
 public:
  using Evaluator = std::function<Ball(int level)>;

  EffectiveReal(Rational exact);  // NOLINT: exact rationals are effective reals
  /// A value known only through one enclosure.
  static EffectiveReal from_ball(const Ball& b);
  /// A value produced by a computation that can be re-run at levels 0..max_level.
  static EffectiveReal from_evaluator(Evaluator eval, int max_level);

  /// Enclosure at the given level: the intersection of all raw enclosures up to it.
  Ball at(int level) const;
  /// Enclosure of one evaluation at the given level, without intersecting.
  Ball raw(int level) const;
  int max_level() const;
  /// Set when the value is an exact rational.
  std::optional<Rational> exact_value() const;

  friend EffectiveReal operator+(const EffectiveReal& a, const EffectiveReal& b);
  friend EffectiveReal operator-(const EffectiveReal& a, const EffectiveReal& b);
  friend EffectiveReal operator*(const EffectiveReal& a, const EffectiveReal& b);
  friend EffectiveReal operator/(const EffectiveReal& a, const EffectiveReal& b);

 private:
  struct Node;
  explicit EffectiveReal(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Returns q with |q - x| <= 2^-n.  Throws PrecisionUnreachable when the
/// enclosure cannot be made small enough within the node's level budget.
Rational refine(const EffectiveReal& x, int n);

}  // namespace hypman
