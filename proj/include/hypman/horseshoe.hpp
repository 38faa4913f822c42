#pragma once

#include <cstddef>
#include <vector>

#include "hypman/rational.hpp"

namespace hypman {

struct Interval {
  Rational lo, hi;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Rect {
  Rational x0, x1, y0, y1;
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Piecewise-linear horseshoe on I = [0,1]^2.  The horizontal strips
/// H0 = [0,1] x [0,lambda] and H1 = [0,1] x [1-lambda,1] are contracted
/// horizontally by lambda and stretched vertically by mu = 1/lambda onto the
/// vertical strips V0 = [0,lambda] x [0,1] and V1 = [1-lambda,1] x [0,1].
/// H0 -> V0 keeps orientation; H1 -> V1 is turned over.
struct LinearHorseshoeMap {
  Rational lambda = ratio(1, 4);
  Rational mu = 4;
  bool flip0 = false;
  bool flip1 = true;

  static LinearHorseshoeMap with_lambda(const Rational& lambda);
  void validate() const;

  bool in_domain(const Rational& x, const Rational& y) const;  // H0 u H1
  Rect image(const Rect& r, int strip) const;                     // f(r), r inside H_strip
  Rect preimage(const Rect& r, int strip) const;                  // f^-1(r), r inside V_strip
  Interval strip_h(int i) const;                                  // y-range of H_i
  Interval strip_v(int i) const;                                  // x-range of V_i
};

struct RectangleCover {
  int level = 0;
  std::vector<Interval> xIntervals;  // the level-n Cantor family in x
  std::vector<Interval> yIntervals;  // and in y
  std::vector<Rect> closedRects;     // xIntervals x yIntervals
  std::vector<Rect> openComplement;  // interiors; their union is I minus closedRects up to boundary
  std::size_t alphaOfN = 0;
  Rational hausdorffBound;           // lambda^n
};

/// Level-n interval family: images of [0,1] under all words of length n in
/// x -> lambda x and x -> 1 - lambda x, sorted.
std::vector<Interval> cantor_intervals(const LinearHorseshoeMap& map, int n);

/// Lambda_n = intersection of f^k(I) n I for |k| <= n, exactly.  Throws
/// LevelTooLarge when the number of rectangles exceeds `budget`.
RectangleCover level_cover(const LinearHorseshoeMap& map, int n, std::size_t budget = std::size_t{1} << 20);

struct HausdorffCertificate {
  Rational squared;  // exact d^2
  Rational upper;    // dyadic upper bound of d
  Rational bound;    // lambda^n
  bool holds = false;  // d <= bound, decided exactly on squares
};

/// Exact Hausdorff distance between Lambda_n and Lambda_m (m >= n) from their
/// product structure: d^2 = dx^2 + dy^2 with one-dimensional distances.
HausdorffCertificate hausdorff_certificate(const RectangleCover& coarse, const RectangleCover& fine);
HausdorffCertificate hausdorff_certificate(const LinearHorseshoeMap& map, int n, int m);

/// One-dimensional Hausdorff distance between nested interval unions (fine within coarse).
Rational interval_hausdorff(const std::vector<Interval>& coarse, const std::vector<Interval>& fine);

enum class Membership { Inside, Complement };

/// Digit-wise test of p against Lambda_n in O(n).  Throws OutsideUnitSquare.
Membership membership(const LinearHorseshoeMap& map, const Rational& x, const Rational& y, int n);

struct InvarianceReport {
  bool forward = false;   // f(Lambda_n) n I contains Lambda_{n+1}
  bool backward = false;  // f^-1(Lambda_n) n I contains Lambda_{n+1}
  std::size_t checked = 0;
  std::size_t uncoveredForward = 0;
  std::size_t uncoveredBackward = 0;
};

InvarianceReport invariance_check(const LinearHorseshoeMap& map, int n);

/// Exact test of r being covered by the union of `rects` (closed).
bool covered(const Rect& r, const std::vector<Rect>& rects);

}  // namespace hypman
