#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace hypman {

/// Exact rational number; always kept in canonical form (gcd 1, positive denominator).
using Rational = mpq_class;

/// Canonical p/q from machine integers.
Rational ratio(long p, long q);

/// Accepts "p/q" or "p" with an optional leading minus.
Rational parse_rational(std::string_view text);

/// Always "p/q", also for integers ("3/1").
std::string to_string(const Rational& q);

/// The exact value of a finite double.
Rational from_double(double x);

/// Nearest-below / nearest-above doubles.
double to_double_down(const Rational& q);
double to_double_up(const Rational& q);

/// 2^e for any integer e.
Rational pow2(long e);

/// Smallest integer >= q.
mpz_class ceil(const Rational& q);
/// Largest integer <= q.
mpz_class floor(const Rational& q);

/// Smallest integer c with 2^c >= q, for q > 0.
long ceil_log2(const Rational& q);

/// Largest multiple of 2^-bits that is <= q.
Rational floor_dyadic(const Rational& q, long bits);
/// Smallest multiple of 2^-bits that is >= q.
Rational ceil_dyadic(const Rational& q, long bits);

/// A dyadic upper bound of sqrt(q) with absolute slack at most 2^-bits.
Rational sqrt_upper(const Rational& q, long bits = 60);
/// A dyadic lower bound of sqrt(q).
Rational sqrt_lower(const Rational& q, long bits = 60);

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace hypman
