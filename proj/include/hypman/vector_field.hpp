#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hypman/ball.hpp"
#include "hypman/matrix.hpp"
#include "hypman/rational.hpp"

namespace hypman {

struct Monomial {
  Rational coeff;
  std::vector<unsigned> powers;

  unsigned degree() const;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

using Polynomial = std::vector<Monomial>;

/// Polynomial vector field with exact rational coefficients.  Components are
/// kept canonical: duplicate exponent vectors merged, zero terms dropped,
/// terms ordered by degree and then lexicographically.
class PolyVectorField {
 public:
  PolyVectorField() = default;
  PolyVectorField(std::size_t dim, std::vector<Polynomial> components);

  std::size_t dim() const { return dim_; }
  const std::vector<Polynomial>& components() const { return components_; }
  unsigned degree() const;

  RationalVector eval(std::span<const Rational> x) const;
  BallVector eval(std::span<const Ball> x) const;
  BallMatrix jacobian(std::span<const Ball> x) const;

  /// The field -f (time reversal).
  PolyVectorField negated() const;

  friend bool operator==(const PolyVectorField&, const PolyVectorField&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Polynomial> components_;
};

/// Double-precision evaluator with flattened monomial tables.
class CompiledField {
 public:
  CompiledField() = default;
  explicit CompiledField(const PolyVectorField& f);

  std::size_t dim() const { return dim_; }
  void eval(const double* x, double* out) const;
  std::vector<double> eval(std::span<const double> x) const;

 private:
  std::size_t dim_ = 0;
  unsigned max_power_ = 0;
  std::vector<std::size_t> offsets_;  // per component, into coeffs_
  std::vector<double> coeffs_;
  std::vector<unsigned> powers_;      // dim_ entries per term
};

/// f = A x + F around the origin.
struct NonlinearRemainder {
  RationalMatrix A;
  PolyVectorField F;
  Rational L;   // bound on the Hilbert-Schmidt norm of D^2 F over |x| <= R0
  Rational R0 = 1;
};

/// g(x) = f(x + x0); throws NotAnEquilibrium when f(x0) != 0.
PolyVectorField shift_to_origin(const PolyVectorField& f, std::span<const Rational> x0);

/// Requires g(0) = 0 (throws NotAnEquilibrium otherwise).
NonlinearRemainder split_linear(const PolyVectorField& g, const Rational& R0 = 1);

/// d(m) = m + ceil(log2 max(L, 1)), raised if needed so that 2^-d(m) <= R0.
long modulus_d(const NonlinearRemainder& rem, long m);

/// A x + F as a single field.
PolyVectorField recombine(const NonlinearRemainder& rem);

}  // namespace hypman
