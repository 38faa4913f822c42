#include "hypman/systems.hpp"

namespace hypman::systems {

PolyVectorField saddle() {
  return PolyVectorField(2, {{{Rational(-1), {1, 0}}}, {{Rational(1), {0, 1}}, {Rational(1), {2, 0}}}});
}

PolyVectorField linear(const RationalMatrix& A) {
  const std::size_t n = A.rows();
  std::vector<Polynomial> comps(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<unsigned> p(n, 0);
      p[j] = 1;
      comps[i].push_back({A(i, j), p});
    }
  }
  return PolyVectorField(n, std::move(comps));
}

PolyVectorField counterexample(const Rational& mu) {
  return PolyVectorField(2, {{{Rational(1), {2, 0}}, {Rational(-1), {0, 0}}},
                             {{Rational(-1), {1, 1}}, {mu, {2, 0}}, {Rational(-mu), {0, 0}}}});
}

}  // namespace hypman::systems
