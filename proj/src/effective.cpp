#include "hypman/effective.hpp"

#include <algorithm>

#include "hypman/error.hpp"

namespace hypman {

struct EffectiveReal::Node {
  std::optional<Rational> exact;
  Evaluator eval;
  int max_level = 0;
};

EffectiveReal::EffectiveReal(Rational exact) {
  auto node = std::make_shared<Node>();
  const Ball b = Ball::from_rational(exact);
  node->exact = std::move(exact);
  node->eval = [b](int) { return b; };
  node_ = std::move(node);
}

EffectiveReal EffectiveReal::from_ball(const Ball& b) {
  auto node = std::make_shared<Node>();
  node->eval = [b](int) { return b; };
  return EffectiveReal(std::shared_ptr<const Node>(std::move(node)));
}

EffectiveReal EffectiveReal::from_evaluator(Evaluator eval, int max_level) {
  auto node = std::make_shared<Node>();
  node->eval = std::move(eval);
  node->max_level = max_level;
  return EffectiveReal(std::shared_ptr<const Node>(std::move(node)));
}

Ball EffectiveReal::raw(int level) const {
  return node_->eval(std::clamp(level, 0, node_->max_level));
}

Ball EffectiveReal::at(int level) const {
  Ball acc = raw(0);
  const int top = std::clamp(level, 0, node_->max_level);
  for (int q = 1; q <= top; ++q) acc = intersect(acc, raw(q));
  return acc;
}

int EffectiveReal::max_level() const { return node_->max_level; }

std::optional<Rational> EffectiveReal::exact_value() const { return node_->exact; }

namespace {

template <class Op>
EffectiveReal combine(const EffectiveReal& a, const EffectiveReal& b, Op op) {
  const int top = std::max(a.max_level(), b.max_level());
  return EffectiveReal::from_evaluator([a, b, op](int level) { return op(a.raw(level), b.raw(level)); },
                                       top);
}

}  // namespace

EffectiveReal operator+(const EffectiveReal& a, const EffectiveReal& b) {
  if (a.exact_value() && b.exact_value()) return EffectiveReal(*a.exact_value() + *b.exact_value());
  return combine(a, b, [](const Ball& x, const Ball& y) { return x + y; });
}

EffectiveReal operator-(const EffectiveReal& a, const EffectiveReal& b) {
  if (a.exact_value() && b.exact_value()) return EffectiveReal(*a.exact_value() - *b.exact_value());
  return combine(a, b, [](const Ball& x, const Ball& y) { return x - y; });
}

EffectiveReal operator*(const EffectiveReal& a, const EffectiveReal& b) {
  if (a.exact_value() && b.exact_value()) return EffectiveReal(*a.exact_value() * *b.exact_value());
  return combine(a, b, [](const Ball& x, const Ball& y) { return x * y; });
}

EffectiveReal operator/(const EffectiveReal& a, const EffectiveReal& b) {
  if (a.exact_value() && b.exact_value()) {
    if (*b.exact_value() == 0) fail(ErrorCode::DivisorContainsZero, "division by exact zero");
    return EffectiveReal(*a.exact_value() / *b.exact_value());
  }
  return combine(a, b, [](const Ball& x, const Ball& y) { return x / y; });
}

Rational refine(const EffectiveReal& x, int n) {
  if (auto q = x.exact_value()) return *q;
  const Rational target = pow2(-n);
  Ball acc = x.raw(0);
  for (int level = 0;; ++level) {
    if (level > 0) acc = intersect(acc, x.raw(level));
    if (acc.rad_rational() <= target) return acc.mid_rational();
    if (level >= x.max_level()) break;
  }
  fail(ErrorCode::PrecisionUnreachable,
       "enclosure radius " + std::to_string(acc.rad()) + " above 2^-" + std::to_string(n));
}

}  // namespace hypman
