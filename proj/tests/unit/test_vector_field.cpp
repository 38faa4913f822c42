#include "doctest.h"

#include <cmath>
#include <random>

#include "hypman/error.hpp"
#include "hypman/systems.hpp"
#include "hypman/vector_field.hpp"

using namespace hypman;

TEST_CASE("shift of the counterexample system to z1") {
  for (const Rational mu : {ratio(-1, 20), Rational(0), ratio(3, 7)}) {
    const PolyVectorField f = systems::counterexample(mu);
    const RationalVector z1{Rational(-1), Rational(0)};
    const PolyVectorField g = shift_to_origin(f, z1);
    const NonlinearRemainder rem = split_linear(g);
    CHECK(rem.A(0, 0) == -2);
    CHECK(rem.A(0, 1) == 0);
    CHECK(rem.A(1, 0) == -2 * mu);
    CHECK(rem.A(1, 1) == 1);
    // remainder: (u^2, -u y + mu u^2)
    const RationalVector p{ratio(1, 3), ratio(-2, 5)};
    const RationalVector Fp = rem.F.eval(p);
    CHECK(Fp[0] == ratio(1, 9));
    CHECK(Fp[1] == ratio(2, 15) + mu / 9);
    for (const auto& comp : rem.F.components())
      for (const auto& m : comp) CHECK(m.degree() >= 2);
  }
}

TEST_CASE("shift leaves f unchanged at the origin and rejects non-equilibria") {
  const PolyVectorField f = systems::saddle();
  CHECK(shift_to_origin(f, RationalVector{Rational(0), Rational(0)}) == f);
  try {
    shift_to_origin(f, RationalVector{Rational(1), Rational(0)});
    FAIL("expected NotAnEquilibrium");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAnEquilibrium);
  }
}

TEST_CASE("shift correctness on random rational points") {
  const PolyVectorField f = systems::counterexample(ratio(-1, 5));
  const RationalVector x0{Rational(1), Rational(0)};
  const PolyVectorField g = shift_to_origin(f, x0);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> num(-30, 30);
  for (int trial = 0; trial < 200; ++trial) {
    const RationalVector p{ratio(num(rng), 7), ratio(num(rng), 11)};
    const RationalVector q{p[0] + x0[0], p[1] + x0[1]};
    CHECK(g.eval(p) == f.eval(q));
  }
}

TEST_CASE("split_linear on the saddle and a linear field") {
  const NonlinearRemainder rem = split_linear(systems::saddle());
  CHECK(rem.A(0, 0) == -1);
  CHECK(rem.A(1, 1) == 1);
  CHECK(rem.A(0, 1) == 0);
  CHECK(rem.L == 2);
  CHECK(recombine(rem) == systems::saddle());

  RationalMatrix A(2, 2);
  A(0, 0) = -2;
  A(1, 1) = 1;
  const NonlinearRemainder lin = split_linear(systems::linear(A));
  CHECK(lin.L == 0);
  CHECK(lin.F.components()[0].empty());
  CHECK(modulus_d(lin, 7) == 7);
}

TEST_CASE("modulus d(m)") {
  NonlinearRemainder rem = split_linear(systems::saddle());
  CHECK(modulus_d(rem, 5) == 6);
  rem.L = 3;
  CHECK(modulus_d(rem, 4) == 6);
  rem.R0 = ratio(1, 100);
  CHECK(modulus_d(rem, 1) == 7);
}

TEST_CASE("(ine-0) holds on the ball of radius 2^-d(m)") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const PolyVectorField& g :
       {systems::saddle(), shift_to_origin(systems::counterexample(ratio(-1, 20)), RationalVector{Rational(-1), Rational(0)})}) {
    const NonlinearRemainder rem = split_linear(g);
    const CompiledField F(rem.F);
    for (long m = 1; m <= 10; ++m) {
      const double rho = std::ldexp(1.0, static_cast<int>(-modulus_d(rem, m)));
      for (int trial = 0; trial < 1000; ++trial) {
        double x[2], y[2];
        for (double* v : {x, y}) {
          do {
            v[0] = u(rng) * rho;
            v[1] = u(rng) * rho;
          } while (std::hypot(v[0], v[1]) > rho);
        }
        double fx[2], fy[2];
        F.eval(x, fx);
        F.eval(y, fy);
        const double lhs = std::hypot(fx[0] - fy[0], fx[1] - fy[1]);
        const double rhs = std::ldexp(std::hypot(x[0] - y[0], x[1] - y[1]), static_cast<int>(-m));
        CHECK(lhs <= rhs * (1 + 1e-12) + 1e-300);
      }
    }
  }
}

TEST_CASE("L = 3 modulus verified by dense sampling") {
  // F(x) = (3/2 x^2, 0) has |D^2 F| = 3
  const PolyVectorField g(2, {{{ratio(3, 2), {2, 0}}}, {}});
  const NonlinearRemainder rem = split_linear(g);
  CHECK(rem.L == 3);
  const long d = modulus_d(rem, 4);
  CHECK(d == 6);
  const double rho = std::ldexp(1.0, -6);
  double worst = 0;
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 400; ++j) {
      const double x = -rho + 2 * rho * i / 400, y = -rho + 2 * rho * j / 400;
      if (x == y) continue;
      worst = std::max(worst, std::fabs(1.5 * (x * x - y * y)) / std::fabs(x - y));
    }
  }
  CHECK(worst <= std::ldexp(1.0, -4));
}

TEST_CASE("ball evaluation and jacobian") {
  const PolyVectorField f(1, {{{Rational(1), {2}}, {Rational(-1), {0}}}});
  const BallVector v = f.eval(BallVector{Ball(-1.0)});
  CHECK(v[0].mid() == 0);
  CHECK(v[0].rad() == 0);

  const BallMatrix J = systems::saddle().jacobian(BallVector{Ball(0.0), Ball(0.0)});
  CHECK(J(0, 0).mid() == -1);
  CHECK(J(1, 1).mid() == 1);
  CHECK(J(1, 0).mid() == 0);
  CHECK(J(0, 1).mid() == 0);

  const PolyVectorField g = systems::counterexample(ratio(-1, 20));
  const BallVector box{Ball(1.0, 0.01), Ball(0.0, 0.01)};
  const BallVector e = g.eval(box);
  for (double x : {0.99, 0.995, 1.0, 1.005, 1.01}) {
    for (double y : {-0.01, 0.0, 0.01}) {
      const double f1 = x * x - 1;
      const double f2 = -x * y - 0.05 * (x * x - 1);
      CHECK(e[0].lower() <= f1);
      CHECK(e[0].upper() >= f1);
      CHECK(e[1].lower() <= f2);
      CHECK(e[1].upper() >= f2);
    }
  }
  CHECK(e[0].upper() >= 0.0201);
}

TEST_CASE("construction validates shapes") {
  CHECK_THROWS_AS(PolyVectorField(2, {{{Rational(1), {1}}}, {}}), Error);
  CHECK_THROWS_AS(PolyVectorField(2, {{}}), Error);
  const PolyVectorField merged(1, {{{Rational(1), {1}}, {Rational(2), {1}}, {Rational(0), {3}}}});
  REQUIRE(merged.components()[0].size() == 1);
  CHECK(merged.components()[0][0].coeff == 3);
}
