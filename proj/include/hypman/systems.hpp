#pragma once

#include "hypman/vector_field.hpp"

// Builders for the fields used throughout the tests, the CLI and the benchmarks.

namespace hypman::systems {

/// x' = -x, y' = y + x^2; the stable manifold is y = -x^2/3.
PolyVectorField saddle();

/// x' = A x for an exact rational matrix.
PolyVectorField linear(const RationalMatrix& A);

/// x' = x^2 - 1, y' = -x y + mu (x^2 - 1).
PolyVectorField counterexample(const Rational& mu);

}  // namespace hypman::systems
