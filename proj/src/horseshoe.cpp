#include "hypman/horseshoe.hpp"

#include <algorithm>

#include "hypman/error.hpp"

namespace hypman {

LinearHorseshoeMap LinearHorseshoeMap::with_lambda(const Rational& lambda) {
  LinearHorseshoeMap m;
  m.lambda = lambda;
  m.mu = 1 / lambda;
  m.validate();
  return m;
}

void LinearHorseshoeMap::validate() const {
  if (!(lambda > 0 && lambda < ratio(1, 2))) fail(ErrorCode::InvalidArgument, "lambda must lie in (0, 1/2)");
  if (lambda * mu != 1) fail(ErrorCode::InvalidArgument, "mu must equal 1/lambda");
}

Interval LinearHorseshoeMap::strip_h(int i) const {
  return i == 0 ? Interval{0, lambda} : Interval{1 - lambda, 1};
}

Interval LinearHorseshoeMap::strip_v(int i) const { return strip_h(i); }

bool LinearHorseshoeMap::in_domain(const Rational& x, const Rational& y) const {
  if (x < 0 || x > 1) return false;
  return (y >= 0 && y <= lambda) || (y >= 1 - lambda && y <= 1);
}

namespace {

// affine t -> c + s t applied to an interval, s = +-k
Interval affine(const Interval& v, const Rational& c, const Rational& s) {
  Rational a = c + s * v.lo, b = c + s * v.hi;
  if (a > b) std::swap(a, b);
  return {a, b};
}

}  // namespace

Rect LinearHorseshoeMap::image(const Rect& r, int strip) const {
  const bool flip = strip == 0 ? flip0 : flip1;
  const Interval x{r.x0, r.x1}, y{r.y0, r.y1};
  const Rational y0 = strip == 0 ? Rational(0) : Rational(1 - lambda);
  const Rational x0 = strip == 0 ? Rational(0) : Rational(1 - lambda);
  // stretch y - y0 by mu, shrink x by lambda into V_strip; a turned strip is rotated by a half turn
  Interval ny = affine(y, -mu * y0, mu);
  Interval nx = affine(x, 0, lambda);
  if (flip) {
    ny = affine(ny, 1, -1);
    nx = affine(nx, lambda, -1);
  }
  nx = affine(nx, x0, 1);
  return {nx.lo, nx.hi, ny.lo, ny.hi};
}

Rect LinearHorseshoeMap::preimage(const Rect& r, int strip) const {
  const bool flip = strip == 0 ? flip0 : flip1;
  const Rational x0 = strip == 0 ? Rational(0) : Rational(1 - lambda);
  const Rational y0 = x0;
  Interval nx = affine({r.x0, r.x1}, -x0, 1);
  Interval ny{r.y0, r.y1};
  if (flip) {
    nx = affine(nx, lambda, -1);
    ny = affine(ny, 1, -1);
  }
  nx = affine(nx, 0, mu);
  ny = affine(ny, y0, lambda);
  return {nx.lo, nx.hi, ny.lo, ny.hi};
}

std::vector<Interval> cantor_intervals(const LinearHorseshoeMap& map, int n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "level must be nonnegative");
  map.validate();
  std::vector<Interval> cur{{0, 1}};
  for (int k = 0; k < n; ++k) {
    std::vector<Interval> next;
    next.reserve(2 * cur.size());
    for (const Interval& v : cur) next.push_back(affine(v, 0, map.lambda));
    for (const Interval& v : cur) next.push_back(affine(v, 1, -map.lambda));
    std::sort(next.begin(), next.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    cur = std::move(next);
  }
  return cur;
}

RectangleCover level_cover(const LinearHorseshoeMap& map, int n, std::size_t budget) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "level must be nonnegative");
  map.validate();
  if (2 * n >= 63 || (std::size_t{1} << (2 * n)) > budget) {
    fail(ErrorCode::LevelTooLarge, "level " + std::to_string(n) + " exceeds the rectangle budget");
  }
  RectangleCover c;
  c.level = n;
  // forward images constrain x, backward images constrain y; same family
#pragma omp parallel sections
  {
#pragma omp section
    c.xIntervals = cantor_intervals(map, n);
#pragma omp section
    c.yIntervals = cantor_intervals(map, n);
  }
  c.closedRects.reserve(c.xIntervals.size() * c.yIntervals.size());
  for (const Interval& x : c.xIntervals)
    for (const Interval& y : c.yIntervals) c.closedRects.push_back({x.lo, x.hi, y.lo, y.hi});

  // guillotine: full-height slabs over the x-gaps, then each x-interval column cut at the y-gaps
  const auto gaps = [](const std::vector<Interval>& v) {
    std::vector<Interval> g;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i - 1].hi < v[i].lo) g.push_back({v[i - 1].hi, v[i].lo});
    return g;
  };
  const std::vector<Interval> gx = gaps(c.xIntervals), gy = gaps(c.yIntervals);
  for (const Interval& g : gx) c.openComplement.push_back({g.lo, g.hi, 0, 1});
  for (const Interval& x : c.xIntervals)
    for (const Interval& g : gy) c.openComplement.push_back({x.lo, x.hi, g.lo, g.hi});
  c.alphaOfN = c.openComplement.size();
  c.hausdorffBound = 1;
  for (int k = 0; k < n; ++k) c.hausdorffBound *= map.lambda;
  return c;
}

Rational interval_hausdorff(const std::vector<Interval>& coarse, const std::vector<Interval>& fine) {
  if (coarse.empty() || fine.empty()) fail(ErrorCode::EmptySet, "empty interval family");
  // every point of the fine family lies in the coarse one; the sup of the
  // distance to the fine family is attained at coarse ends or gap midpoints
  Rational best = 0;
  std::size_t j = 0;
  for (const Interval& J : coarse) {
    while (j < fine.size() && fine[j].hi < J.lo) ++j;
    std::size_t k = j;
    std::vector<const Interval*> inside;
    while (k < fine.size() && fine[k].lo <= J.hi) inside.push_back(&fine[k++]);
    if (inside.empty()) fail(ErrorCode::InvalidArgument, "families are not nested");
    best = std::max(best, Rational(inside.front()->lo - J.lo));
    best = std::max(best, Rational(J.hi - inside.back()->hi));
    for (std::size_t i = 1; i < inside.size(); ++i) {
      best = std::max(best, Rational((inside[i]->lo - inside[i - 1]->hi) / 2));
    }
    j = k;
  }
  return best;
}

namespace {

HausdorffCertificate certificate_from(const Rational& dx, const Rational& dy, const Rational& bound) {
  HausdorffCertificate h;
  h.squared = dx * dx + dy * dy;
  h.upper = sqrt_upper(h.squared);
  h.bound = bound;
  h.holds = h.squared <= bound * bound;
  return h;
}

}  // namespace

HausdorffCertificate hausdorff_certificate(const RectangleCover& coarse, const RectangleCover& fine) {
  if (fine.level < coarse.level) fail(ErrorCode::InvalidArgument, "hausdorff_certificate needs m >= n");
  return certificate_from(interval_hausdorff(coarse.xIntervals, fine.xIntervals),
                          interval_hausdorff(coarse.yIntervals, fine.yIntervals), coarse.hausdorffBound);
}

HausdorffCertificate hausdorff_certificate(const LinearHorseshoeMap& map, int n, int m) {
  if (m < n) fail(ErrorCode::InvalidArgument, "hausdorff_certificate needs m >= n");
  const std::vector<Interval> a = cantor_intervals(map, n), b = cantor_intervals(map, m);
  const Rational d = interval_hausdorff(a, b);
  Rational bound = 1;
  for (int k = 0; k < n; ++k) bound *= map.lambda;
  return certificate_from(d, d, bound);
}

Membership membership(const LinearHorseshoeMap& map, const Rational& x, const Rational& y, int n) {
  if (x < 0 || x > 1 || y < 0 || y > 1) fail(ErrorCode::OutsideUnitSquare, "point outside the unit square");
  if (n < 0) fail(ErrorCode::InvalidArgument, "level must be nonnegative");
  const auto digit_walk = [&](Rational t) {
    for (int k = 0; k < n; ++k) {
      if (t <= map.lambda) {
        t /= map.lambda;
      } else if (t >= 1 - map.lambda) {
        t = (1 - t) / map.lambda;
      } else {
        return false;
      }
    }
    return true;
  };
  return digit_walk(x) && digit_walk(y) ? Membership::Inside : Membership::Complement;
}

bool covered(const Rect& r, const std::vector<Rect>& rects) {
  std::vector<const Rect*> cand;
  for (const Rect& s : rects)
    if (s.x0 <= r.x1 && s.x1 >= r.x0 && s.y0 <= r.y1 && s.y1 >= r.y0) cand.push_back(&s);
  if (cand.empty()) return false;
  std::vector<Rational> xs{r.x0, r.x1}, ys{r.y0, r.y1};
  for (const Rect* s : cand) {
    if (s->x0 > r.x0 && s->x0 < r.x1) xs.push_back(s->x0);
    if (s->x1 > r.x0 && s->x1 < r.x1) xs.push_back(s->x1);
    if (s->y0 > r.y0 && s->y0 < r.y1) ys.push_back(s->y0);
    if (s->y1 > r.y0 && s->y1 < r.y1) ys.push_back(s->y1);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  const auto inside = [&](const Rational& px, const Rational& py) {
    for (const Rect* s : cand)
      if (s->x0 <= px && px <= s->x1 && s->y0 <= py && py <= s->y1) return true;
    return false;
  };
  // closed cover of a closed rectangle: every cell midpoint and every grid vertex
  const auto probe = [](const std::vector<Rational>& v) {
    std::vector<Rational> p = v;
    for (std::size_t i = 1; i < v.size(); ++i) p.push_back((v[i - 1] + v[i]) / 2);
    return p;
  };
  for (const Rational& px : probe(xs))
    for (const Rational& py : probe(ys))
      if (!inside(px, py)) return false;
  return true;
}

InvarianceReport invariance_check(const LinearHorseshoeMap& map, int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "invariance_check needs n >= 1");
  const RectangleCover cn = level_cover(map, n), cn1 = level_cover(map, n + 1);
  std::vector<Rect> fwd, bwd;
  for (const Rect& r : cn.closedRects) {
    for (int s = 0; s < 2; ++s) {
      const Interval h = map.strip_h(s);
      const Rational y0 = std::max(r.y0, h.lo), y1 = std::min(r.y1, h.hi);
      if (y0 <= y1) fwd.push_back(map.image({r.x0, r.x1, y0, y1}, s));
      const Interval v = map.strip_v(s);
      const Rational x0 = std::max(r.x0, v.lo), x1 = std::min(r.x1, v.hi);
      if (x0 <= x1) bwd.push_back(map.preimage({x0, x1, r.y0, r.y1}, s));
    }
  }
  InvarianceReport rep;
  for (const Rect& r : cn1.closedRects) {
    ++rep.checked;
    if (!covered(r, fwd)) ++rep.uncoveredForward;
    if (!covered(r, bwd)) ++rep.uncoveredBackward;
  }
  rep.forward = rep.uncoveredForward == 0;
  rep.backward = rep.uncoveredBackward == 0;
  return rep;
}

}  // namespace hypman
