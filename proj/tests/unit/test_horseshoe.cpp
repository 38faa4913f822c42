#include <doctest.h>

#include <chrono>

#include "hypman/error.hpp"
#include "hypman/horseshoe.hpp"

using namespace hypman;

TEST_CASE("levels 0, 1, 2") {
  const LinearHorseshoeMap f;
  const RectangleCover c0 = level_cover(f, 0);
  REQUIRE(c0.closedRects.size() == 1);
  CHECK(c0.closedRects[0] == Rect{0, 1, 0, 1});
  CHECK(c0.openComplement.empty());
  CHECK(c0.alphaOfN == 0);

  const RectangleCover c1 = level_cover(f, 1);
  const Rational q = ratio(1, 4), t = ratio(3, 4);
  const std::vector<Rect> expect{{0, q, 0, q}, {0, q, t, 1}, {t, 1, 0, q}, {t, 1, t, 1}};
  CHECK(c1.closedRects == expect);
  CHECK(c1.alphaOfN == 3);

  const RectangleCover c2 = level_cover(f, 2);
  CHECK(c2.closedRects.size() == 16);
  for (const Rect& r : c2.closedRects) {
    CHECK(r.x1 - r.x0 == ratio(1, 16));
    CHECK(r.y1 - r.y0 == ratio(1, 16));
  }
}

TEST_CASE("counting, side length and alpha(n)") {
  const LinearHorseshoeMap f;
  std::size_t prev_alpha = 0;
  for (int n = 0; n <= 8; ++n) {
    const RectangleCover c = level_cover(f, n);
    const std::size_t count = std::size_t{1} << (2 * n);
    CHECK(c.closedRects.size() == count);
    CHECK(c.alphaOfN == count - 1);
    if (n > 0) CHECK(c.alphaOfN > prev_alpha);
    prev_alpha = c.alphaOfN;
    const Rational side = pow2(-2 * n);
    CHECK(c.hausdorffBound == side);
    bool sides = true;
    for (const Rect& r : c.closedRects) sides = sides && r.x1 - r.x0 == side && r.y1 - r.y0 == side;
    CHECK(sides);
  }
}

TEST_CASE("closed rectangles pairwise disjoint, complement tiles the rest") {
  const LinearHorseshoeMap f;
  for (int n = 1; n <= 3; ++n) {
    const RectangleCover c = level_cover(f, n);
    Rational area = 0;
    for (std::size_t i = 0; i < c.closedRects.size(); ++i) {
      const Rect& a = c.closedRects[i];
      area += (a.x1 - a.x0) * (a.y1 - a.y0);
      for (std::size_t j = i + 1; j < c.closedRects.size(); ++j) {
        const Rect& b = c.closedRects[j];
        CHECK((a.x1 < b.x0 || b.x1 < a.x0 || a.y1 < b.y0 || b.y1 < a.y0));
      }
    }
    for (const Rect& r : c.openComplement) area += (r.x1 - r.x0) * (r.y1 - r.y0);
    CHECK(area == 1);
    // open complement pieces avoid the closed set: their interiors miss every square
    for (const Rect& r : c.openComplement)
      for (const Rect& s : c.closedRects)
        CHECK((r.x1 <= s.x0 || s.x1 <= r.x0 || r.y1 <= s.y0 || s.y1 <= r.y0));
  }
}

TEST_CASE("nesting and product structure") {
  const LinearHorseshoeMap f;
  for (int n = 0; n <= 4; ++n) {
    const RectangleCover a = level_cover(f, n), b = level_cover(f, n + 1);
    for (const Rect& r : b.closedRects) CHECK(covered(r, a.closedRects));
    // Lambda_n = C_n x C_n with C_n the middle-half Cantor family
    const auto C = cantor_intervals(f, n);
    CHECK(a.xIntervals == C);
    CHECK(a.yIntervals == C);
    for (const Interval& v : C) {
      CHECK(membership(f, v.lo, 0, n) == Membership::Inside);
      CHECK(membership(f, v.hi, 1, n) == Membership::Inside);
    }
  }
}

TEST_CASE("hausdorff certificates") {
  const LinearHorseshoeMap f;
  const HausdorffCertificate h01 = hausdorff_certificate(level_cover(f, 0), level_cover(f, 1));
  CHECK(h01.squared == ratio(1, 8));
  CHECK(h01.holds);
  const RectangleCover c2 = level_cover(f, 2);
  CHECK(hausdorff_certificate(c2, c2).squared == 0);
  const HausdorffCertificate h24 = hausdorff_certificate(c2, level_cover(f, 4));
  CHECK(h24.holds);
  CHECK(h24.upper <= ratio(1, 16));
  for (int n = 0; n <= 8; ++n) {
    for (int m = 1; m <= 4; ++m) {
      const HausdorffCertificate h = hausdorff_certificate(f, n, n + m);
      CHECK(h.holds);
      CHECK(h.squared == 2 * pow2(-4 * n) / 16);
    }
  }
}

TEST_CASE("hausdorff: brute force over a rational grid") {
  // sup over Lambda_n of the distance to Lambda_m, probed at every point of a
  // grid fine enough to contain all gap midpoints
  const LinearHorseshoeMap f;
  for (int n = 0; n <= 1; ++n) {
    for (int m = n + 1; m <= n + 2; ++m) {
      const RectangleCover a = level_cover(f, n), b = level_cover(f, m);
      const Rational pitch = pow2(-2 * m - 1);
      Rational worst = 0;
      for (const Rect& r : a.closedRects) {
        for (Rational x = r.x0; x <= r.x1; x += pitch) {
          for (Rational y = r.y0; y <= r.y1; y += pitch) {
            Rational best = 4;
            for (const Rect& s : b.closedRects) {
              const Rational dx = x < s.x0 ? Rational(s.x0 - x) : x > s.x1 ? Rational(x - s.x1) : Rational(0);
              const Rational dy = y < s.y0 ? Rational(s.y0 - y) : y > s.y1 ? Rational(y - s.y1) : Rational(0);
              best = std::min(best, Rational(dx * dx + dy * dy));
            }
            worst = std::max(worst, best);
          }
        }
      }
      CHECK(worst == hausdorff_certificate(a, b).squared);
    }
  }
}

TEST_CASE("membership") {
  const LinearHorseshoeMap f;
  for (int n = 0; n <= 6; ++n) CHECK(membership(f, 0, 0, n) == Membership::Inside);
  CHECK(membership(f, ratio(1, 2), ratio(1, 2), 1) == Membership::Complement);
  CHECK(membership(f, ratio(1, 2), ratio(1, 2), 0) == Membership::Inside);
  CHECK(membership(f, ratio(1, 4), ratio(3, 4), 3) == Membership::Inside);
  CHECK_THROWS_AS(membership(f, ratio(3, 2), 0, 1), Error);
  // agrees with the rectangle list
  const RectangleCover c = level_cover(f, 3);
  for (int i = 0; i <= 64; ++i) {
    for (int j = 0; j <= 64; j += 3) {
      const Rational x(i, 64), y(j, 64);
      bool in = false;
      for (const Rect& r : c.closedRects) in = in || (r.x0 <= x && x <= r.x1 && r.y0 <= y && y <= r.y1);
      CHECK((membership(f, x, y, 3) == Membership::Inside) == in);
    }
  }
}

TEST_CASE("invariance") {
  const LinearHorseshoeMap f;
  for (int n = 1; n <= 4; ++n) {
    const InvarianceReport rep = invariance_check(f, n);
    CHECK(rep.forward);
    CHECK(rep.backward);
    CHECK(rep.checked == (std::size_t{1} << (2 * n + 2)));
  }
  const LinearHorseshoeMap third = LinearHorseshoeMap::with_lambda(ratio(1, 3));
  const InvarianceReport rep = invariance_check(third, 3);
  CHECK(rep.forward);
  CHECK(rep.backward);
  // the invariant set depends only on strip positions, not on the turn of H1
  LinearHorseshoeMap unturned = f;
  unturned.flip1 = false;
  CHECK(invariance_check(unturned, 2).forward);
  // covered() rejects a square sticking into a gap
  const RectangleCover c1 = level_cover(f, 1);
  CHECK_FALSE(covered(Rect{0, ratio(1, 2), 0, ratio(1, 4)}, c1.closedRects));
  CHECK(covered(Rect{0, ratio(1, 4), 0, ratio(1, 4)}, c1.closedRects));
  CHECK(level_cover(third, 2).closedRects.size() == 16);
  CHECK(hausdorff_certificate(third, 2, 4).holds);
}

TEST_CASE("image and preimage are inverse") {
  const LinearHorseshoeMap f;
  const Rect r{ratio(1, 8), ratio(5, 8), ratio(13, 16), ratio(15, 16)};
  const Rect img = f.image(r, 1);
  CHECK(img.x0 >= ratio(3, 4));
  CHECK(f.preimage(img, 1) == r);
  const Rect r0{ratio(1, 3), ratio(1, 2), 0, ratio(1, 8)};
  CHECK(f.preimage(f.image(r0, 0), 0) == r0);
}

TEST_CASE("errors and budget") {
  const LinearHorseshoeMap f;
  CHECK_THROWS_AS(level_cover(f, 11), Error);
  try {
    level_cover(f, 6, 1000);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LevelTooLarge);
  }
  CHECK_THROWS_AS(LinearHorseshoeMap::with_lambda(ratio(1, 2)), Error);
}

TEST_CASE("level 8 in under 10 s") {
  const auto t0 = std::chrono::steady_clock::now();
  const RectangleCover c = level_cover(LinearHorseshoeMap{}, 8);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(c.closedRects.size() == 65536);
  CHECK(s < 10);
}
