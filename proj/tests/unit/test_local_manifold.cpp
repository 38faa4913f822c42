#include <doctest.h>

#include <cmath>

#include "hypman/error.hpp"
#include "hypman/flow.hpp"
#include "hypman/manifold.hpp"
#include "hypman/systems.hpp"

using namespace hypman;

namespace {

struct Setup {
  NonlinearRemainder rem;
  std::shared_ptr<const SpectralSplit> split;
  std::shared_ptr<const SemigroupEvaluator> ev;
  RadiusCertificate cert;
};

Setup setup(const PolyVectorField& f) {
  Setup s;
  const std::vector<Rational> zero(f.dim(), Rational(0));
  s.rem = split_linear(shift_to_origin(f, zero));
  s.split = std::make_shared<const SpectralSplit>(split_matrix(s.rem.A));
  s.ev = std::make_shared<const SemigroupEvaluator>(s.split);
  s.cert = radius_certificate(*s.split, s.rem);
  return s;
}

RationalMatrix diag(long a, long b) {
  RationalMatrix A(2, 2);
  A(0, 0) = a;
  A(1, 1) = b;
  return A;
}

const std::vector<Rational> kOrigin{Rational(0), Rational(0)};

}  // namespace

TEST_CASE("radius certificate for sigma = 1/2, K = 4") {
  SpectralSplit s;
  s.gap.sigma = ratio(1, 2);
  s.gap.alpha1 = ratio(1, 8);
  s.K = 4;
  NonlinearRemainder rem;
  rem.L = 0;
  const RadiusCertificate c = radius_certificate(s, rem);
  CHECK(c.m0 == 5);
  CHECK(c.d == 5);
  CHECK(c.eta == pow2(-5));
  CHECK(c.r == pow2(-5) / 8);
  CHECK(c.dRadius == pow2(-5) / 64);
  CHECK(c.delta == c.r);
  CHECK(c.epsilonBase2 * ratio(6931471805599453, 10000000000000000) <= c.alpha1);
  CHECK(c.epsilonBase2 > ratio(18, 100));
}

TEST_CASE("saddle certificate") {
  const Setup s = setup(systems::saddle());
  CHECK(s.split->K1 == 5);
  CHECK(s.split->K == 40);
  CHECK(s.cert.m0 == 9);
  CHECK(s.cert.d == 10);
  CHECK(s.cert.r == ratio(1, 81920));
  CHECK(s.cert.eta == pow2(-10));
  CHECK(pow2(-s.cert.m0) <= s.split->gap.sigma / (4 * Rational(s.split->K)));
  CHECK(pow2(-(s.cert.m0 - 1)) > s.split->gap.sigma / (4 * Rational(s.split->K)));
  CHECK(s.cert.dRadius <= s.cert.r);
  CHECK(s.cert.epsilonBase2 * ratio(6931471805599453, 10000000000000000) <= s.cert.alpha1);
}

TEST_CASE("Picard: a = 0 and linear fields") {
  const Setup s = setup(systems::saddle());
  const double rr = s.cert.r.get_d();
  PicardEngine eng(s.ev, s.rem, s.cert, rr * 0.99);
  const PicardSolution z = eng.solve(std::vector<double>{0.0, 0.0});
  CHECK(z.iterations == 1);
  for (double v : z.values) CHECK(v == 0.0);

  const Setup l = setup(systems::linear(diag(-2, 1)));
  PicardEngine lin(l.ev, l.rem, l.cert, l.cert.r.get_d() * 0.99);
  const double beta = l.cert.r.get_d() / 2;
  const PicardSolution u = lin.solve(std::vector<double>{beta, 0.0});
  CHECK(u.iterations == 1);
  CHECK(u.uniformError <= 1e-9);
  for (std::size_t i = 0; i <= u.steps; i += 97) {
    const double t = u.h * static_cast<double>(i);
    CHECK(std::abs(u.at(i)[0] - beta * std::exp(-2 * t)) <= u.uniformError);
    CHECK(std::abs(u.at(i)[1]) <= u.uniformError);
  }
  for (double v : u.phi) CHECK(std::abs(v) <= u.phiError);
}

TEST_CASE("Picard: saddle closed form") {
  const Setup s = setup(systems::saddle());
  const double rr = s.cert.r.get_d();
  PicardEngine eng(s.ev, s.rem, s.cert, rr * 0.99);
  const auto before = Diagnostics::instance().snapshot();
  for (double beta : {rr * 0.9, rr / 2, -rr / 3}) {
    const PicardSolution u = eng.solve(std::vector<double>{beta, 0.0});
    MESSAGE("h = ", u.h, " N = ", u.steps, " iterations = ", u.iterations, " error = ", u.uniformError);
    CHECK(u.uniformError <= 1e-9);
    double worst = 0;
    for (std::size_t i = 0; i <= u.steps; ++i) {
      const double t = u.h * static_cast<double>(i);
      const double ex = beta * std::exp(-t), ey = -beta * beta / 3 * std::exp(-2 * t);
      worst = std::max(worst, std::hypot(u.at(i)[0] - ex, u.at(i)[1] - ey));
      // ine-2 as a property of the accepted solution
      CHECK_LE(std::hypot(u.at(i)[0], u.at(i)[1]),
               s.cert.eta.get_d() * std::exp(-s.cert.alpha1.get_d() * t) + u.uniformError);
    }
    CHECK(worst <= u.uniformError);
    for (double t : {0.0, 0.3e-3, 1.23456, 7.77, 40.0}) {
      const auto v = u.value_at(t);
      CHECK(std::hypot(v[0] - beta * std::exp(-t), v[1] + beta * beta / 3 * std::exp(-2 * t)) <=
            u.uniformError + u.interpolationError);
    }
    CHECK(std::abs(u.phi[0]) <= u.phiError);
    CHECK(std::abs(u.phi[1] + beta * beta / 3) <= u.phiError);
    for (const auto& rec : u.history) CHECK(rec.ine1_margin <= 10 * eng.tol());
  }
  const auto after = Diagnostics::instance().snapshot();
  CHECK(after.ine1_violations == before.ine1_violations);
  CHECK(after.ine2_violations == before.ine2_violations);
  CHECK(after.ratio_violations == before.ratio_violations);
  CHECK(after.ine1_checks > before.ine1_checks);
}

TEST_CASE("Picard: recursion matches the direct convolution") {
  const Setup s = setup(systems::saddle());
  PicardOptions opt;
  opt.tol = 1e-6;
  opt.horizon = 8.0;
  opt.step_exponent = 4;
  PicardEngine eng(s.ev, s.rem, s.cert, s.cert.r.get_d() / 1000, opt);
  const std::vector<double> a{s.cert.r.get_d() / 1200, 0.0};
  const PicardSolution fast = eng.solve(a);
  const PicardSolution ref = eng.solve_reference(a);
  REQUIRE(fast.values.size() == ref.values.size());
  double diff = 0;
  for (std::size_t i = 0; i < fast.values.size(); ++i) diff = std::max(diff, std::abs(fast.values[i] - ref.values[i]));
  MESSAGE("recursion vs direct: ", diff);
  CHECK(diff <= 1e-12 * std::abs(a[0]));
}

TEST_CASE("Picard: requested horizon too short") {
  const Setup s = setup(systems::saddle());
  PicardOptions opt;
  opt.horizon = 1.0;
  try {
    PicardEngine eng(s.ev, s.rem, s.cert, s.cert.r.get_d() / 2, opt);
    FAIL("expected HorizonTooShort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HorizonTooShort);
  }
}

TEST_CASE("saddle charts") {
  const double tol = 1e-9;
  const ManifoldChart st = local_manifold(systems::saddle(), kOrigin, Side::Stable, 9, tol);
  CHECK(st.samples.size() == 9);
  CHECK(st.lipschitz == 120);
  const double tangency = st.tangency.get_d();
  for (const ChartSample& p : st.samples) {
    CHECK(p.error <= tol);
    CHECK(std::abs(p.point[1] + p.point[0] * p.point[0] / 3) <= p.error);
    CHECK(std::abs(std::abs(p.coords[0]) - std::abs(p.point[0])) <= 1e-18);
    CHECK(p.initial_residual <= tol);
    CHECK(std::hypot(p.phi[0], p.phi[1]) <= tangency * std::abs(p.coords[0]) + p.error);
  }
  const double gl = st.graphLipschitz.get_d();
  for (const ChartSample& p : st.samples)
    for (const ChartSample& q : st.samples)
      CHECK(std::hypot(p.point[0] - q.point[0], p.point[1] - q.point[1]) <=
            gl * std::abs(p.coords[0] - q.coords[0]) + p.error + q.error);
  CHECK(st.monitors.ine3_checks > 0);
  CHECK(st.monitors.ine1_violations + st.monitors.ine2_violations + st.monitors.ine3_violations == 0);

  const ManifoldChart un = local_manifold(systems::saddle(), kOrigin, Side::Unstable, 9, tol);
  CHECK(un.samples.size() == 9);
  for (const ChartSample& p : un.samples) {
    CHECK(std::abs(p.point[0]) <= p.error);
    CHECK(p.initial_residual <= tol);
  }
  const ManifoldChart dual = local_manifold(systems::saddle().negated(), kOrigin, Side::Stable, 9, tol);
  REQUIRE(dual.samples.size() == un.samples.size());
  for (std::size_t i = 0; i < un.samples.size(); ++i) {
    CHECK(dual.samples[i].point == un.samples[i].point);
    CHECK(dual.samples[i].error == un.samples[i].error);
  }
}

TEST_CASE("linear chart diag(-2, 1)") {
  const PolyVectorField f = systems::linear(diag(-2, 1));
  const ManifoldChart st = local_manifold(f, kOrigin, Side::Stable, 7, 1e-9);
  const ManifoldChart un = local_manifold(f, kOrigin, Side::Unstable, 7, 1e-9);
  CHECK(st.samples.size() == 7);
  for (const ChartSample& p : st.samples) CHECK(std::abs(p.point[1]) <= p.error);
  for (const ChartSample& p : un.samples) CHECK(std::abs(p.point[0]) <= p.error);
}

TEST_CASE("chart nodes: parallel equals serial") {
  LocalOptions serial;
  serial.parallel = false;
  serial.picard.parallel = false;
  const ManifoldChart a = local_manifold(systems::saddle(), kOrigin, Side::Stable, 5, 1e-9);
  const ManifoldChart b = local_manifold(systems::saddle(), kOrigin, Side::Stable, 5, 1e-9, serial);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].point == b.samples[i].point);
    CHECK(a.samples[i].error == b.samples[i].error);
  }
}

TEST_CASE("2-d stable chart of a 3-d system") {
  // x' = -x, y' = -2y + x^2, z' = z + xy
  std::vector<Polynomial> comps(3);
  comps[0] = {{Rational(-1), {1, 0, 0}}};
  comps[1] = {{Rational(-2), {0, 1, 0}}, {Rational(1), {2, 0, 0}}};
  comps[2] = {{Rational(1), {0, 0, 1}}, {Rational(1), {1, 1, 0}}};
  const PolyVectorField f(3, comps);
  const std::vector<Rational> o(3, Rational(0));
  const ManifoldChart st = local_manifold(f, o, Side::Stable, 5, 1e-9);
  CHECK(st.k == 2);
  CHECK(st.samples.size() == 13);  // 5x5 lattice clipped to the disc
  for (const ChartSample& p : st.samples) {
    CHECK(p.error <= 1e-9);
    CHECK(p.initial_residual <= 1e-9);
    // z on the manifold is O(|b|^3): tiny compared to the chart error scale
    CHECK(std::abs(p.point[2]) <= 1e-12);
  }
}

TEST_CASE("decay of chart points under the flow") {
  const ManifoldChart st = local_manifold(systems::saddle(), kOrigin, Side::Stable, 9, 1e-9);
  const CompiledField f(systems::saddle());
  const double gamma = st.certificate.gamma.get_d(), eps = st.certificate.epsilonBase2.get_d();
  for (const ChartSample& p : st.samples) {
    for (double t = 0; t <= 15; t += 0.5) {
      const auto x = flow(f, p.point, t, 1e-14);
      CHECK(std::hypot(x[0], x[1]) <= gamma * std::exp2(-eps * t) * (1 + 1e-3));
    }
  }
}

TEST_CASE("divergence witnesses") {
  const PolyVectorField lin = systems::linear(diag(-2, 1));
  const ManifoldChart lc = local_manifold(lin, kOrigin, Side::Stable, 3, 1e-9);
  const double eta = lc.certificate.eta.get_d(), D = lc.certificate.dRadius.get_d();
  const std::vector<double> x{0.0, D / 2};
  const DivergenceWitness w = divergence_check(lc, x, 100);
  CHECK(w.exited);
  CHECK(w.exit_time == doctest::Approx(std::log(2 * eta / D)).epsilon(1e-7));
  CHECK(w.distance_to_chart == doctest::Approx(D / 2).epsilon(1e-9));

  const ManifoldChart sc = local_manifold(systems::saddle(), kOrigin, Side::Stable, 3, 1e-9);
  const double Ds = sc.certificate.dRadius.get_d();
  const double beta = Ds / 2;
  const std::vector<double> off{beta, -beta * beta / 3 + Ds / 2};
  const DivergenceWitness ws = divergence_check(sc, off, 100);
  CHECK(ws.exited);
  CHECK(std::isfinite(ws.exit_time));
  CHECK(ws.distance_to_chart > Ds / 4);

  const std::vector<double> on{beta, -beta * beta / 3};
  const DivergenceWitness neg = divergence_check(sc, on, 30);
  CHECK_FALSE(neg.exited);
  CHECK(neg.distance_to_chart <= 1e-9);
}

TEST_CASE("integrator closed forms") {
  std::vector<Polynomial> c1{{{Rational(-1), {1}}}};
  const PolyVectorField decay(1, c1);
  CHECK(flow(decay, std::vector<double>{1.0}, 1.0, 1e-12)[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-11));
  CHECK(flow(decay, std::vector<double>{1.0}, -2.0, 1e-12)[0] == doctest::Approx(std::exp(2.0)).epsilon(1e-11));

  const auto x = flow(systems::saddle(), std::vector<double>{1.0, -1.0 / 3}, 1.0, 1e-12);
  CHECK(std::abs(x[0] - std::exp(-1.0)) <= 1e-11);
  CHECK(std::abs(x[1] + std::exp(-2.0) / 3) <= 1e-11);

  for (const Rational& mu : {ratio(-1, 5), Rational(0), ratio(-1, 20)}) {
    const auto y = flow(systems::counterexample(mu), std::vector<double>{-1.0, 5.0}, 0.5, 1e-10);
    CHECK(y[0] == -1.0);
  }

  try {
    flow(systems::saddle(), std::vector<double>{0.0, 1.0}, 5.0, 1e-10);
    FAIL("expected LeftBoundingBox");
  } catch (const LeftBoundingBoxError& e) {
    CHECK(e.t_exit() == doctest::Approx(std::log(10.0)).epsilon(0.05));
  }
}
