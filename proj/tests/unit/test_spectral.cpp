#include "doctest.h"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "hypman/error.hpp"
#include "hypman/spectral.hpp"

using namespace hypman;

namespace {

RationalMatrix mat(std::initializer_list<std::initializer_list<Rational>> rows) {
  const std::size_t n = rows.size();
  RationalMatrix m(n, rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (const auto& x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

RationalMatrix jacobian_z1(const Rational& mu) { return mat({{-2, 0}, {-2 * mu, 1}}); }

double mid_residual(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("characteristic polynomial") {
  const auto c = characteristic_polynomial(mat({{-2, 0}, {0, 1}}));
  CHECK(c == std::vector<Rational>{-2, 1, 1});
  const auto d = characteristic_polynomial(mat({{1, 2, 3}, {0, 4, 5}, {1, 0, 6}}));
  // det(xI - A) = x^3 - 11x^2 + 31x - 22  (trace 11, principal minors 4 + 3 + 24, det 22)
  CHECK(d == std::vector<Rational>{-22, 31, -11, 1});
}

TEST_CASE("eigenvalue enclosures") {
  const auto ev = enclose_eigenvalues(mat({{-2, 0}, {0, 1}}));
  REQUIRE(ev.entries.size() == 2);
  CHECK(ev.entries[0].enclosure.re().contains(Rational(-2)));
  CHECK(ev.entries[1].enclosure.re().contains(Rational(1)));
  CHECK(ev.entries[0].exact);
  for (const Rational mu : {ratio(-1, 20), ratio(-1, 5), Rational(0), Rational(2)}) {
    const auto e = enclose_eigenvalues(jacobian_z1(mu));
    REQUIRE(e.entries.size() == 2);
    CHECK(e.entries[0].enclosure.re().contains(Rational(-2)));
    CHECK(e.entries[1].enclosure.re().contains(Rational(1)));
  }
  CHECK_THROWS_AS(enclose_eigenvalues(mat({{0, 1}, {-1, 0}})), Error);
  try {
    enclose_eigenvalues(mat({{0, 1}, {-1, 0}}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHyperbolic);
  }
  const auto jordan = enclose_eigenvalues(mat({{-1, 1}, {0, -1}}));
  REQUIRE(jordan.entries.size() == 1);
  CHECK(jordan.entries[0].multiplicity == 2);
  const auto irr = enclose_eigenvalues(mat({{0, 1}, {2, 0}}));
  REQUIRE(irr.entries.size() == 2);
  CHECK(irr.entries[0].enclosure.re().lower() <= -std::sqrt(2.0));
  CHECK(irr.entries[0].enclosure.re().upper() >= -std::sqrt(2.0));
  CHECK(irr.entries[0].enclosure.re().rad() < 1e-12);
}

TEST_CASE("random enclosures contain the numerically computed spectrum") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> entry(-12, 12);
  int tested = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 4;
    RationalMatrix A(n, n);
    for (auto& x : A.data()) x = ratio(entry(rng), 4);
    EigenvalueEnclosures ev;
    try {
      ev = enclose_eigenvalues(A);
    } catch (const Error&) {
      continue;
    }
    ++tested;
    CHECK(ev.total() == static_cast<int>(n));
    Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(A));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const auto lam = es.eigenvalues()(i);
      double best = 1e300;
      for (const auto& e : ev.entries) {
        const double dr = std::max(0.0, std::fabs(lam.real() - e.enclosure.re().mid()) - e.enclosure.re().rad());
        const double di = std::max(0.0, std::fabs(lam.imag() - e.enclosure.im().mid()) - e.enclosure.im().rad());
        best = std::min(best, std::hypot(dr, di));
      }
      CHECK(best < 1e-9);
    }
  }
  CHECK(tested > 30);
}

TEST_CASE("gap constants") {
  const auto g = compute_gap(enclose_eigenvalues(mat({{-2, 0}, {0, 1}})));
  CHECK(g.sigma == ratio(1, 2));
  CHECK(g.alpha == ratio(1, 2));
  CHECK(g.alpha1 == ratio(1, 4));
  CHECK(g.alpha2 == ratio(1, 4));
  CHECK(g.M == 3);
  CHECK(g.k == 1);
  const auto sink = compute_gap(enclose_eigenvalues(mat({{-1, 0}, {0, -1}})));
  CHECK(sink.sigma == ratio(1, 2));
  CHECK(sink.alpha == ratio(1, 4));
  CHECK(sink.k == 2);
  for (const Rational c : {ratio(1, 4), Rational(1), Rational(4)}) {
    const auto s = compute_gap(enclose_eigenvalues(mat({{-c, 0}, {0, c}})));
    CHECK(s.sigma == c / 2);
    CHECK(s.alpha == c / 4);
    CHECK(Rational(s.M) > std::max(Rational(s.alpha + s.sigma), Rational(1)));
    CHECK(Rational(s.M - 1) >= c);
  }
}

TEST_CASE("contours") {
  HyperbolicGap g;
  g.sigma = ratio(1, 2);
  g.alpha = ratio(1, 2);
  g.alpha1 = g.alpha2 = ratio(1, 4);
  g.M = 3;
  g.k = 1;
  g.n = 2;
  const ContourPair c = build_contours(g);
  REQUIRE(c.stable);
  REQUIRE(c.unstable);
  const std::array<ComplexRational, 4> s{{{-1, 3}, {-3, 3}, {-3, -3}, {-1, -3}}};
  CHECK(c.stable->vertices == s);
  const std::vector<ComplexRational> expected{{ratio(1, 2), 3}, {3, 3}, {3, -3}, {ratio(1, 2), -3}};
  for (const auto& v : expected) {
    CHECK(std::find(c.unstable->vertices.begin(), c.unstable->vertices.end(), v) != c.unstable->vertices.end());
  }
  for (const auto& contour : {*c.stable, *c.unstable}) {
    Rational area = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& p = contour.vertices[i];
      const auto& q = contour.vertices[(i + 1) % 4];
      area += p.re * q.im - q.re * p.im;
    }
    CHECK(area > 0);
  }
  g.k = 2;
  CHECK_FALSE(build_contours(g).unstable);
}

TEST_CASE("resolvent norm bounds") {
  const RationalMatrix A = mat({{-2, 0}, {0, 1}});
  const auto g = compute_gap(enclose_eigenvalues(A));
  const auto c = build_contours(g);
  const long K1 = resolvent_norm_bound(A, *c.stable);
  // dense sampling oracle along the contour
  double sampled = 0;
  for (std::size_t e = 0; e < 4; ++e) {
    const auto& a = c.stable->vertices[e];
    const auto& b = c.stable->vertices[(e + 1) % 4];
    for (int k = 0; k <= 4000; ++k) {
      const double s = k / 4000.0;
      const std::complex<double> xi(a.re.get_d() + s * (b.re.get_d() - a.re.get_d()),
                                    a.im.get_d() + s * (b.im.get_d() - a.im.get_d()));
      sampled = std::max(sampled, std::hypot(1 / std::abs(-2.0 - xi), 1 / std::abs(1.0 - xi)));
    }
  }
  CHECK(K1 >= sampled);
  CHECK(K1 >= 2);
  CHECK(K1 <= std::ceil(sampled * 1.02));

  const RationalMatrix S = mat({{-2}});
  const auto gs = compute_gap(enclose_eigenvalues(S));
  CHECK(gs.M == 3);
  const long Ks = resolvent_norm_bound(S, *build_contours(gs).stable);
  // max 1/dist is 2, attained at the right edge; any certified bound rounds to 2 or 3
  CHECK(Ks >= 2);
  CHECK(Ks <= 3);

  Contour through{Side::Stable, {{{-2, 3}, {-3, 3}, {-3, -3}, {-2, -3}}}};
  try {
    resolvent_norm_bound(A, through);
    FAIL("expected ResolventUncertifiable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResolventUncertifiable);
  }
}

TEST_CASE("spectral projections of diagonal and triangular matrices") {
  const SpectralSplit d = split_matrix(mat({{-2, 0}, {0, 1}}));
  CHECK(contains(d.P1, mat({{1, 0}, {0, 0}})));
  CHECK(contains(d.P2, mat({{0, 0}, {0, 1}})));
  CHECK(max_radius(d.P1) <= 1e-12);
  CHECK(d.K == 4 * d.gap.M * d.K1);

  for (const Rational mu : {ratio(-1, 20), ratio(-1, 5)}) {
    const SpectralSplit s = split_matrix(jacobian_z1(mu));
    const RationalMatrix P1 = mat({{1, 0}, {2 * mu / 3, 0}});
    CHECK(contains(s.P1, P1));
    CHECK(contains(s.P2, RationalMatrix::identity(2) - P1));
    const Eigen::MatrixXd p = mid(s.P1);
    CHECK(mid_residual(p * p - p) < 1e-12);
    Eigen::Vector2d v(-1, -2 * mu.get_d() / 3);
    CHECK((p * v - v).norm() < 1e-12);
  }

  const SpectralSplit sink = split_matrix(mat({{-1, 0}, {0, -3}}));
  CHECK(contains_identity(sink.P1));
  CHECK(contains_zero(sink.P2));
  CHECK(sink.unstable_basis.empty());
  CHECK(sink.stable_basis.size() == 2);
}

TEST_CASE("projection algebra and bases on random hyperbolic matrices") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> entry(-10, 10);
  int tested = 0;
  for (int trial = 0; trial < 40 && tested < 12; ++trial) {
    const std::size_t n = 2 + trial % 3;
    RationalMatrix A(n, n);
    for (auto& x : A.data()) x = ratio(entry(rng), 4);
    EigenvalueEnclosures ev;
    try {
      ev = enclose_eigenvalues(A);
    } catch (const Error&) {
      continue;
    }
    bool far = true;
    for (const auto& e : ev.entries) far = far && e.enclosure.re().mig() >= 0.1;
    if (!far) continue;
    ++tested;
    const SpectralSplit s = split_matrix(A);
    const Eigen::MatrixXd p1 = mid(s.P1), p2 = mid(s.P2);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    CHECK(mid_residual(p1 + p2 - I) <= 1e-8);
    CHECK(mid_residual(p1 * p2) <= 1e-8);
    CHECK(mid_residual(p1 * p1 - p1) <= 1e-8);
    CHECK(contains_identity(s.P1 + s.P2));
    CHECK(contains_zero(s.P1 * s.P2));
    CHECK(contains_zero(s.P2 * s.P1));
    CHECK(contains_zero(s.P1 * s.P1 - s.P1));
    const Eigen::MatrixXd Ad = to_eigen(A);
    for (const BallVector& b : s.stable_basis) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = b[i].mid();
      CHECK((p1 * v - v).norm() <= 1e-8);
      // A-invariance: A v stays in the range of P1
      const Eigen::VectorXd Av = Ad * v;
      CHECK((p1 * Av - Av).norm() <= 1e-8 * (1 + Av.norm()));
    }
    CHECK(static_cast<int>(s.stable_basis.size()) == s.gap.k);
  }
  CHECK(tested >= 8);
}

TEST_CASE("enlarging M leaves the projections unchanged") {
  const RationalMatrix A = mat({{-1, 2, 0}, {0, ratio(1, 2), 1}, {1, 0, -3}});
  const auto ev = enclose_eigenvalues(A);
  auto g = compute_gap(ev);
  const QuadratureOptions opt;
  const SpectralSplit a = spectral_projections(A, ev, g, build_contours(g), 1, opt);
  g.M += 1;
  const SpectralSplit b = spectral_projections(A, ev, g, build_contours(g), 1, opt);
  CHECK(mid_residual(mid(a.P1) - mid(b.P1)) <= opt.tolerance);
}

TEST_CASE("fast mode agrees with rigorous mode") {
  const RationalMatrix A = mat({{-1, 2, 0}, {0, ratio(1, 2), 1}, {1, 0, -3}});
  QuadratureOptions fast;
  fast.mode = QuadratureMode::Fast;
  const SpectralSplit r = split_matrix(A);
  const SpectralSplit f = split_matrix(A, fast);
  CHECK(mid_residual(mid(r.P1) - mid(f.P1)) <= 1e-10);
}

TEST_CASE("parallel and serial quadrature kernels agree bit for bit") {
  const RationalMatrix A = mat({{-1, 2, 0}, {0, ratio(1, 2), 1}, {1, 0, -3}});
  const SpectralSplit s = split_matrix(A);
  for (const Rational t : {Rational(0), ratio(1, 3), Rational(2)}) {
    CHECK(s.stable_rule->component(t) == s.stable_rule->component_serial(t));
  }
}

TEST_CASE("Gauss-Legendre nodes against a 50-digit reference") {
  using big = boost::multiprecision::cpp_bin_float_50;
  auto check = [](const GaussRule& rule, const auto& abscissa, const auto& weights) {
    const std::size_t n = rule.nodes.size();
    // boost stores the nonnegative half, largest weight first
    std::vector<big> xs, ws;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      xs.push_back(abscissa[i]);
      ws.push_back(weights[i]);
      if (abscissa[i] != 0) {
        xs.push_back(-abscissa[i]);
        ws.push_back(weights[i]);
      }
    }
    REQUIRE(xs.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      big best = 10;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const big d = abs(xs[j] - big(rule.nodes[i]));
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      CHECK(best.convert_to<double>() <= kGaussNodeError);
      CHECK(abs(ws[arg] - big(rule.weights[i])).convert_to<double>() <= kGaussNodeError);
    }
  };
  check(gauss_legendre(16), boost::math::quadrature::gauss<big, 16>::abscissa(),
        boost::math::quadrature::gauss<big, 16>::weights());
  check(gauss_legendre(32), boost::math::quadrature::gauss<big, 32>::abscissa(),
        boost::math::quadrature::gauss<big, 32>::weights());
}
