#pragma once

#include <cmath>
#include <limits>

// Directed rounding on top of round-to-nearest, using error-free transformations
// to detect whether the rounded result already lies on the requested side.

namespace hypman::rnd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double up(double x) { return std::nextafter(x, kInf); }
inline double down(double x) { return std::nextafter(x, -kInf); }

/// Exact rounding error of a + b (TwoSum).
inline double two_sum_err(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

inline double add_up(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  return two_sum_err(a, b, s) > 0 ? up(s) : s;
}

inline double add_down(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  return two_sum_err(a, b, s) < 0 ? down(s) : s;
}

inline double sub_up(double a, double b) { return add_up(a, -b); }
inline double sub_down(double a, double b) { return add_down(a, -b); }

inline double mul_up(double a, double b) {
  const double p = a * b;
  if (!std::isfinite(p)) return p;
  const double e = std::fma(a, b, -p);
  if (e > 0) return up(p);
  // underflow: the fma residual can vanish although the product is inexact
  if (p == 0 && a != 0 && b != 0 && (a > 0) == (b > 0)) return up(p);
  return p;
}

inline double mul_down(double a, double b) {
  const double p = a * b;
  if (!std::isfinite(p)) return p;
  const double e = std::fma(a, b, -p);
  if (e < 0) return down(p);
  if (p == 0 && a != 0 && b != 0 && (a > 0) != (b > 0)) return down(p);
  return p;
}

/// Upward division for b > 0.
inline double div_up(double a, double b) {
  const double q = a / b;
  if (!std::isfinite(q)) return q;
  const double r = std::fma(-q, b, a);  // a - q b, exact
  if (r > 0) return up(q);
  if (q == 0 && a > 0) return up(q);
  return q;
}

/// Downward division for b > 0.
inline double div_down(double a, double b) {
  const double q = a / b;
  if (!std::isfinite(q)) return q;
  const double r = std::fma(-q, b, a);
  if (r < 0) return down(q);
  if (q == 0 && a < 0) return down(q);
  return q;
}

inline double sqrt_up(double x) {
  if (x <= 0) return 0;
  const double r = std::sqrt(x);
  return std::fma(r, r, -x) < 0 ? up(r) : r;
}

inline double sqrt_down(double x) {
  if (x <= 0) return 0;
  const double r = std::sqrt(x);
  return std::fma(r, r, -x) > 0 ? down(r) : r;
}

/// libm exp/log are assumed accurate to one ulp; two ulps of margin are applied.
inline double exp_up(double x) {
  if (x == 0) return 1;
  return up(up(std::exp(x)));
}

inline double exp_down(double x) {
  if (x == 0) return 1;
  const double e = std::exp(x);
  return e > 0 ? std::max(0.0, down(down(e))) : 0.0;
}

inline double log_up(double x) { return up(up(std::log(x))); }
inline double log_down(double x) { return down(down(std::log(x))); }

/// Sum of squares rounded up.
inline double sq_up(double a) { return mul_up(std::fabs(a), std::fabs(a)); }

}  // namespace hypman::rnd
