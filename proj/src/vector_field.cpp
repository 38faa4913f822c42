#include "hypman/vector_field.hpp"

#include <algorithm>
#include <map>

#include "hypman/error.hpp"
#include "hypman/rounding.hpp"

namespace hypman {

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (unsigned p : powers) d += p;
  return d;
}

namespace {

using Powers = std::vector<unsigned>;

struct PowersLess {
  bool operator()(const Powers& a, const Powers& b) const {
    unsigned da = 0, db = 0;
    for (unsigned p : a) da += p;
    for (unsigned p : b) db += p;
    if (da != db) return da < db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  }
};

using TermMap = std::map<Powers, Rational, PowersLess>;

Polynomial to_polynomial(const TermMap& terms) {
  Polynomial p;
  for (const auto& [powers, c] : terms) {
    if (c != 0) p.push_back({c, powers});
  }
  return p;
}

Rational rational_power(const Rational& x, unsigned e) {
  Rational r = 1;
  for (unsigned k = 0; k < e; ++k) r *= x;
  return r;
}

Ball ball_power(const Ball& x, unsigned e) {
  if (e == 0) return Ball(1.0);
  if (e % 2 == 0) {
    const Ball h = ball_power(x, e / 2);
    return sqr(h);
  }
  return x * ball_power(x, e - 1);
}

}  // namespace

PolyVectorField::PolyVectorField(std::size_t dim, std::vector<Polynomial> components) : dim_(dim) {
  if (dim == 0) fail(ErrorCode::SchemaError, "field dimension must be positive");
  if (components.size() != dim) {
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(dim) + " components, got " +
                                           std::to_string(components.size()));
  }
  components_.reserve(dim);
  for (const Polynomial& comp : components) {
    TermMap terms;
    for (const Monomial& m : comp) {
      if (m.powers.size() != dim) fail(ErrorCode::DimensionMismatch, "exponent vector has wrong length");
      Rational c = m.coeff;
      c.canonicalize();
      terms[m.powers] += c;
    }
    components_.push_back(to_polynomial(terms));
  }
}

unsigned PolyVectorField::degree() const {
  unsigned d = 0;
  for (const auto& comp : components_)
    for (const auto& m : comp) d = std::max(d, m.degree());
  return d;
}

RationalVector PolyVectorField::eval(std::span<const Rational> x) const {
  if (x.size() != dim_) fail(ErrorCode::DimensionMismatch, "point dimension");
  RationalVector out(dim_, Rational(0));
  for (std::size_t i = 0; i < dim_; ++i) {
    for (const Monomial& m : components_[i]) {
      Rational t = m.coeff;
      for (std::size_t j = 0; j < dim_; ++j) t *= rational_power(x[j], m.powers[j]);
      out[i] += t;
    }
  }
  return out;
}

BallVector PolyVectorField::eval(std::span<const Ball> x) const {
  if (x.size() != dim_) fail(ErrorCode::DimensionMismatch, "point dimension");
  BallVector out(dim_, Ball(0.0));
  for (std::size_t i = 0; i < dim_; ++i) {
    Ball acc(0.0);
    for (const Monomial& m : components_[i]) {
      Ball t = Ball::from_rational(m.coeff);
      for (std::size_t j = 0; j < dim_; ++j) {
        if (m.powers[j] != 0) t = t * ball_power(x[j], m.powers[j]);
      }
      acc = acc + t;
    }
    out[i] = acc;
  }
  return out;
}

BallMatrix PolyVectorField::jacobian(std::span<const Ball> x) const {
  if (x.size() != dim_) fail(ErrorCode::DimensionMismatch, "point dimension");
  BallMatrix J(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t k = 0; k < dim_; ++k) {
      Ball acc(0.0);
      for (const Monomial& m : components_[i]) {
        if (m.powers[k] == 0) continue;
        Ball t = Ball::from_rational(m.coeff * m.powers[k]);
        for (std::size_t j = 0; j < dim_; ++j) {
          const unsigned e = (j == k) ? m.powers[j] - 1 : m.powers[j];
          if (e != 0) t = t * ball_power(x[j], e);
        }
        acc = acc + t;
      }
      J(i, k) = acc;
    }
  }
  return J;
}

PolyVectorField PolyVectorField::negated() const {
  std::vector<Polynomial> comps = components_;
  for (auto& comp : comps)
    for (auto& m : comp) m.coeff = -m.coeff;
  return PolyVectorField(dim_, std::move(comps));
}

CompiledField::CompiledField(const PolyVectorField& f) : dim_(f.dim()) {
  offsets_.push_back(0);
  for (const Polynomial& comp : f.components()) {
    for (const Monomial& m : comp) {
      coeffs_.push_back(m.coeff.get_d());
      for (unsigned p : m.powers) {
        powers_.push_back(p);
        max_power_ = std::max(max_power_, p);
      }
    }
    offsets_.push_back(coeffs_.size());
  }
}

void CompiledField::eval(const double* x, double* out) const {
  for (std::size_t i = 0; i < dim_; ++i) {
    double acc = 0;
    for (std::size_t t = offsets_[i]; t < offsets_[i + 1]; ++t) {
      double v = coeffs_[t];
      const unsigned* p = &powers_[t * dim_];
      for (std::size_t j = 0; j < dim_; ++j) {
        for (unsigned e = 0; e < p[j]; ++e) v *= x[j];
      }
      acc += v;
    }
    out[i] = acc;
  }
}

std::vector<double> CompiledField::eval(std::span<const double> x) const {
  if (x.size() != dim_) fail(ErrorCode::DimensionMismatch, "point dimension");
  std::vector<double> out(dim_);
  eval(x.data(), out.data());
  return out;
}

PolyVectorField shift_to_origin(const PolyVectorField& f, std::span<const Rational> x0) {
  if (x0.size() != f.dim()) fail(ErrorCode::DimensionMismatch, "equilibrium dimension");
  const RationalVector value = f.eval(x0);
  for (const Rational& v : value) {
    if (v != 0) fail(ErrorCode::NotAnEquilibrium, "f(x0) is not zero");
  }
  const std::size_t n = f.dim();
  std::vector<Polynomial> comps;
  for (const Polynomial& comp : f.components()) {
    TermMap terms;
    for (const Monomial& m : comp) {
      // expand prod_j (x_j + c_j)^{e_j} term by term
      TermMap partial;
      partial[Powers(n, 0)] = m.coeff;
      for (std::size_t j = 0; j < n; ++j) {
        const unsigned e = m.powers[j];
        if (e == 0) continue;
        TermMap next;
        Rational binom = 1;
        for (unsigned k = 0; k <= e; ++k) {
          // C(e, k) x_j^k c_j^{e-k}
          const Rational factor = binom * rational_power(x0[j], e - k);
          if (factor != 0) {
            for (const auto& [powers, c] : partial) {
              Powers p = powers;
              p[j] += k;
              next[p] += c * factor;
            }
          }
          binom = binom * (e - k) / (k + 1);
        }
        partial = std::move(next);
      }
      for (const auto& [powers, c] : partial) terms[powers] += c;
    }
    comps.push_back(to_polynomial(terms));
  }
  return PolyVectorField(n, std::move(comps));
}

NonlinearRemainder split_linear(const PolyVectorField& g, const Rational& R0) {
  const std::size_t n = g.dim();
  NonlinearRemainder rem;
  rem.A = RationalMatrix(n, n);
  rem.R0 = R0;
  std::vector<Polynomial> nonlinear(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const Monomial& m : g.components()[i]) {
      const unsigned d = m.degree();
      if (d == 0) fail(ErrorCode::NotAnEquilibrium, "field has a constant term at the origin");
      if (d == 1) {
        const auto j = static_cast<std::size_t>(std::find(m.powers.begin(), m.powers.end(), 1u) -
                                                m.powers.begin());
        rem.A(i, j) = m.coeff;
      } else {
        nonlinear[i].push_back(m);
      }
    }
  }
  rem.F = PolyVectorField(n, std::move(nonlinear));
  // |d^2 F_i / dx_j dx_k| <= sum |c| e_j (e_k - [j == k]) R0^(deg - 2)
  Rational sum_sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        Rational entry = 0;
        for (const Monomial& m : rem.F.components()[i]) {
          const unsigned ej = m.powers[j];
          const unsigned ek = m.powers[k] - (j == k ? 1u : 0u);
          if (ej == 0 || (j == k ? m.powers[k] < 2 : m.powers[k] == 0)) continue;
          entry += abs(m.coeff) * ej * ek * rational_power(R0, m.degree() - 2);
        }
        sum_sq += entry * entry;
      }
    }
  }
  rem.L = sqrt_upper(sum_sq);
  return rem;
}

long modulus_d(const NonlinearRemainder& rem, long m) {
  long d = m;
  if (rem.L > 1) d += ceil_log2(rem.L);
  while (pow2(-d) > rem.R0) ++d;
  return d;
}

PolyVectorField recombine(const NonlinearRemainder& rem) {
  const std::size_t n = rem.A.rows();
  std::vector<Polynomial> comps = rem.F.components();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rem.A(i, j) == 0) continue;
      Powers p(n, 0);
      p[j] = 1;
      comps[i].push_back({rem.A(i, j), p});
    }
  }
  return PolyVectorField(n, std::move(comps));
}

}  // namespace hypman
