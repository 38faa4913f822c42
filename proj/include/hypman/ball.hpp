#pragma once

#include <cmath>
#include <iosfwd>

#include "hypman/rational.hpp"

namespace hypman {

/// Midpoint-radius enclosure [mid - rad, mid + rad] of a real number.
class Ball {
 public:
  constexpr Ball() = default;
  constexpr Ball(double mid) : mid_(mid) {}  // NOLINT: exact doubles convert implicitly
  Ball(double mid, double rad);

  /// Tightest double ball around an exact rational.
  static Ball from_rational(const Rational& q);
  /// Ball covering [lo, hi].
  static Ball from_interval(double lo, double hi);
  /// Ball from a serialized midpoint/radius pair (radius rounded outward).
  static Ball from_rationals(const Rational& mid, const Rational& rad);

  double mid() const { return mid_; }
  double rad() const { return rad_; }
  double lower() const;
  double upper() const;
  /// Upper bound on |x| over the ball.
  double mag() const;
  /// Lower bound on |x| over the ball.
  double mig() const;

  bool exact() const { return rad_ == 0; }
  bool contains(double x) const;
  bool contains(const Rational& q) const;
  bool contains_zero() const { return contains(0.0); }
  bool contains(const Ball& other) const;

  Rational mid_rational() const { return Rational(mid_); }
  Rational rad_rational() const { return Rational(rad_); }

  Ball operator-() const { return Ball(-mid_, rad_); }
  Ball& operator+=(const Ball& o) { return *this = *this + o; }
  Ball& operator-=(const Ball& o) { return *this = *this - o; }
  Ball& operator*=(const Ball& o) { return *this = *this * o; }

  friend Ball operator+(const Ball& a, const Ball& b);
  friend Ball operator-(const Ball& a, const Ball& b);
  friend Ball operator*(const Ball& a, const Ball& b);
  /// Throws DivisorContainsZero when b contains 0.
  friend Ball operator/(const Ball& a, const Ball& b);

  /// Identical midpoint and radius.
  friend bool operator==(const Ball& a, const Ball& b) = default;

 private:
  double mid_ = 0;
  double rad_ = 0;
};

Ball sqr(const Ball& a);
Ball exp(const Ball& a);
Ball cos(const Ball& a);
Ball sin(const Ball& a);
/// Square root of the nonnegative part of a.
Ball sqrt(const Ball& a);

/// Adds a nonnegative amount to the radius (rounded up).
Ball inflate(const Ball& a, double extra);

/// Intersection of two balls that both contain the same value; keeps whichever
/// enclosure is tighter when the intersection would not be.
Ball intersect(const Ball& a, const Ball& b);

/// Enclosure of pi.
Ball pi_ball();

std::ostream& operator<<(std::ostream& os, const Ball& b);

/// Rectangular complex ball.
class ComplexBall {
 public:
  constexpr ComplexBall() = default;
  ComplexBall(Ball re) : re_(re) {}  // NOLINT
  ComplexBall(Ball re, Ball im) : re_(re), im_(im) {}

  const Ball& re() const { return re_; }
  const Ball& im() const { return im_; }

  /// Upper bound on the modulus.
  double mag() const;
  /// Lower bound on the modulus.
  double mig() const;
  bool contains_zero() const { return re_.contains_zero() && im_.contains_zero(); }

  ComplexBall conj() const { return {re_, -im_}; }
  ComplexBall operator-() const { return {-re_, -im_}; }
  ComplexBall& operator+=(const ComplexBall& o) { return *this = *this + o; }
  ComplexBall& operator-=(const ComplexBall& o) { return *this = *this - o; }

  friend ComplexBall operator+(const ComplexBall& a, const ComplexBall& b) {
    return {a.re_ + b.re_, a.im_ + b.im_};
  }
  friend ComplexBall operator-(const ComplexBall& a, const ComplexBall& b) {
    return {a.re_ - b.re_, a.im_ - b.im_};
  }
  friend ComplexBall operator*(const ComplexBall& a, const ComplexBall& b);
  friend ComplexBall operator/(const ComplexBall& a, const ComplexBall& b);
  friend bool operator==(const ComplexBall& a, const ComplexBall& b) = default;

 private:
  Ball re_;
  Ball im_;
};

ComplexBall exp(const ComplexBall& z);
ComplexBall inflate(const ComplexBall& z, double extra);

std::ostream& operator<<(std::ostream& os, const ComplexBall& z);

}  // namespace hypman
