#include "hypman/rational.hpp"

#include <cmath>
#include <limits>

#include "hypman/error.hpp"

namespace hypman {

namespace {

bool valid_integer(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den =
      slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_integer(num) || !valid_integer(den) || den[0] == '-') {
    fail(ErrorCode::SchemaError, "malformed rational '" + std::string(text) + "'");
  }
  mpz_class p(std::string(num), 10);
  mpz_class q(std::string(den), 10);
  if (q == 0) fail(ErrorCode::SchemaError, "zero denominator in '" + std::string(text) + "'");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

Rational ratio(long p, long q) {
  if (q == 0) fail(ErrorCode::InvalidArgument, "zero denominator");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational from_double(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "non-finite double");
  return Rational(x);
}

double to_double_down(const Rational& q) {
  double d = q.get_d();  // truncates toward zero
  if (Rational(d) > q) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
  return d;
}

double to_double_up(const Rational& q) {
  double d = q.get_d();
  if (Rational(d) < q) d = std::nextafter(d, std::numeric_limits<double>::infinity());
  return d;
}

Rational pow2(long e) {
  Rational r = 1;
  if (e >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return r;
}

mpz_class floor(const Rational& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

mpz_class ceil(const Rational& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

long ceil_log2(const Rational& q) {
  if (q <= 0) fail(ErrorCode::InvalidArgument, "ceil_log2 of a nonpositive number");
  long c = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
  while (pow2(c) < q) ++c;
  while (pow2(c - 1) >= q) --c;
  return c;
}

Rational floor_dyadic(const Rational& q, long bits) {
  Rational scaled = q * pow2(bits);
  return Rational(floor(scaled)) * pow2(-bits);
}

Rational ceil_dyadic(const Rational& q, long bits) {
  Rational scaled = q * pow2(bits);
  return Rational(ceil(scaled)) * pow2(-bits);
}

namespace {

// floor(sqrt(q * 4^bits)) / 2^bits, computed with integer square roots.
Rational sqrt_floor_dyadic(const Rational& q, long bits) {
  Rational scaled = q * pow2(2 * bits);
  mpz_class n = floor(scaled);
  mpz_class s;
  mpz_sqrt(s.get_mpz_t(), n.get_mpz_t());
  return Rational(s) * pow2(-bits);
}

}  // namespace

Rational sqrt_lower(const Rational& q, long bits) {
  if (q <= 0) return 0;
  return sqrt_floor_dyadic(q, bits);
}

Rational sqrt_upper(const Rational& q, long bits) {
  if (q <= 0) return 0;
  Rational s = sqrt_floor_dyadic(q, bits);
  if (s * s == q) return s;
  return s + pow2(-bits);
}

}  // namespace hypman
