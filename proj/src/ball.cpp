#include "hypman/ball.hpp"

#include <algorithm>
#include <numbers>
#include <ostream>

#include "hypman/error.hpp"
#include "hypman/rounding.hpp"

namespace hypman {

using namespace rnd;

Ball::Ball(double mid, double rad) : mid_(mid), rad_(rad) {
  if (!(rad >= 0)) fail(ErrorCode::InvalidArgument, "ball radius must be nonnegative");
}

Ball Ball::from_rational(const Rational& q) {
  const double m = q.get_d();
  const Rational err = abs(q - Rational(m));
  return Ball(m, to_double_up(err));
}

Ball Ball::from_interval(double lo, double hi) {
  if (!(lo <= hi)) fail(ErrorCode::InvalidArgument, "empty interval");
  const double m = lo + (hi - lo) / 2;
  const double r = std::max(sub_up(m, lo), sub_up(hi, m));
  return Ball(m, r);
}

Ball Ball::from_rationals(const Rational& mid, const Rational& rad) {
  Ball b = from_rational(mid);
  return inflate(b, to_double_up(rad));
}

double Ball::lower() const { return sub_down(mid_, rad_); }
double Ball::upper() const { return add_up(mid_, rad_); }
double Ball::mag() const { return add_up(std::fabs(mid_), rad_); }

double Ball::mig() const {
  const double m = sub_down(std::fabs(mid_), rad_);
  return m > 0 ? m : 0.0;
}

bool Ball::contains(double x) const {
  return contains(Rational(x));
}

bool Ball::contains(const Rational& q) const {
  return abs(q - Rational(mid_)) <= Rational(rad_);
}

bool Ball::contains(const Ball& other) const {
  return abs(Rational(other.mid_) - Rational(mid_)) + Rational(other.rad_) <= Rational(rad_);
}

Ball operator+(const Ball& a, const Ball& b) {
  const double s = a.mid_ + b.mid_;
  const double e = std::fabs(two_sum_err(a.mid_, b.mid_, s));
  return Ball(s, add_up(add_up(a.rad_, b.rad_), e));
}

Ball operator-(const Ball& a, const Ball& b) { return a + (-b); }

Ball operator*(const Ball& a, const Ball& b) {
  const double p = a.mid_ * b.mid_;
  const double e = std::fabs(std::fma(a.mid_, b.mid_, -p));
  double r = mul_up(std::fabs(a.mid_), b.rad_);
  r = add_up(r, mul_up(std::fabs(b.mid_), a.rad_));
  r = add_up(r, mul_up(a.rad_, b.rad_));
  r = add_up(r, e);
  // products that underflow lose their fma residual; cover them with the smallest subnormal
  if (p == 0 && a.mid_ != 0 && b.mid_ != 0) r = add_up(r, std::numeric_limits<double>::denorm_min());
  return Ball(p, r);
}

Ball operator/(const Ball& a, const Ball& b) {
  if (b.contains_zero()) fail(ErrorCode::DivisorContainsZero, "division by a ball containing zero");
  const double q = a.mid_ / b.mid_;
  const double bm = std::fabs(b.mid_);
  // |a.mid/b.mid - q| = |residual| / |b.mid|, residual exact through fma
  const double res = std::fabs(std::fma(-q, b.mid_, a.mid_));
  const double round_err = div_up(res, bm);
  double r = round_err;
  if (a.rad_ != 0 || b.rad_ != 0) {
    // |x/y - a.mid/b.mid| <= (a.rad + |a.mid/b.mid| b.rad) / (|b.mid| - b.rad)
    const double qabs = add_up(std::fabs(q), round_err);
    const double num = add_up(a.rad_, mul_up(qabs, b.rad_));
    const double den = sub_down(bm, b.rad_);
    r = add_up(r, div_up(num, den));
  }
  if (q == 0 && a.mid_ != 0) r = add_up(r, std::numeric_limits<double>::denorm_min());
  return Ball(q, r);
}

Ball sqr(const Ball& a) {
  const double lo = a.mig();
  const double hi = a.mag();
  return Ball::from_interval(mul_down(lo, lo), mul_up(hi, hi));
}

Ball exp(const Ball& a) {
  if (a.exact()) {
    if (a.mid() == 0) return Ball(1.0);
    return Ball::from_interval(exp_down(a.mid()), exp_up(a.mid()));
  }
  return Ball::from_interval(exp_down(a.lower()), exp_up(a.upper()));
}

namespace {

// Two ulps of margin around a libm value in [-1, 1].
constexpr double kTrigAbsErr = 0x1p-52;

Ball trig(double value, double rad) {
  const double r = add_up(rad, kTrigAbsErr);
  const double lo = std::max(-1.0, sub_down(value, r));
  const double hi = std::min(1.0, add_up(value, r));
  return Ball::from_interval(lo, hi);
}

}  // namespace

Ball cos(const Ball& a) {
  if (a.exact() && a.mid() == 0) return Ball(1.0);
  return trig(std::cos(a.mid()), a.rad());
}

Ball sin(const Ball& a) {
  if (a.exact() && a.mid() == 0) return Ball(0.0);
  return trig(std::sin(a.mid()), a.rad());
}

Ball sqrt(const Ball& a) {
  const double lo = std::max(0.0, a.lower());
  const double hi = std::max(0.0, a.upper());
  if (a.exact() && a.mid() >= 0) {
    return Ball::from_interval(sqrt_down(a.mid()), sqrt_up(a.mid()));
  }
  return Ball::from_interval(sqrt_down(lo), sqrt_up(hi));
}

Ball inflate(const Ball& a, double extra) {
  if (extra == 0) return a;
  return Ball(a.mid(), add_up(a.rad(), std::fabs(extra)));
}

Ball intersect(const Ball& a, const Ball& b) {
  const double lo = std::max(a.lower(), b.lower());
  const double hi = std::min(a.upper(), b.upper());
  const Ball& tighter = a.rad() <= b.rad() ? a : b;
  if (!(lo <= hi)) return tighter;
  const Ball c = Ball::from_interval(lo, hi);
  return c.rad() < tighter.rad() ? c : tighter;
}

Ball pi_ball() {
  // pi lies strictly between these neighbouring doubles
  constexpr double lo = 3.141592653589793;
  return Ball::from_interval(lo, up(lo));
}

std::ostream& operator<<(std::ostream& os, const Ball& b) {
  return os << b.mid() << " +/- " << b.rad();
}

double ComplexBall::mag() const {
  const double r = re_.mag();
  const double i = im_.mag();
  return sqrt_up(add_up(mul_up(r, r), mul_up(i, i)));
}

double ComplexBall::mig() const {
  const double r = re_.mig();
  const double i = im_.mig();
  return sqrt_down(add_down(mul_down(r, r), mul_down(i, i)));
}

ComplexBall operator*(const ComplexBall& a, const ComplexBall& b) {
  return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
}

ComplexBall operator/(const ComplexBall& a, const ComplexBall& b) {
  if (b.contains_zero()) fail(ErrorCode::DivisorContainsZero, "division by a complex ball containing zero");
  const Ball den = sqr(b.re_) + sqr(b.im_);
  const ComplexBall num = a * b.conj();
  return {num.re_ / den, num.im_ / den};
}

ComplexBall exp(const ComplexBall& z) {
  const Ball m = exp(z.re());
  return {m * cos(z.im()), m * sin(z.im())};
}

ComplexBall inflate(const ComplexBall& z, double extra) {
  return {inflate(z.re(), extra), inflate(z.im(), extra)};
}

std::ostream& operator<<(std::ostream& os, const ComplexBall& z) {
  return os << "(" << z.re() << ") + i(" << z.im() << ")";
}

}  // namespace hypman
