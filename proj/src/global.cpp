#include "hypman/global.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypman/error.hpp"
#include "hypman/systems.hpp"

namespace hypman {

GlobalStream::GlobalStream(const ManifoldChart& chart, const PolyVectorField& f, int maxJ, double tol,
                           const FlowOptions& options)
    : field_(f), maxJ_(maxJ), tol_(tol), options_(options) {
  if (maxJ < 0) fail(ErrorCode::InvalidArgument, "maxJ must be nonnegative");
  if (f.dim() != chart.n) fail(ErrorCode::DimensionMismatch, "field and chart dimensions differ");
  for (std::size_t i = 0; i < chart.samples.size(); ++i) {
    current_.push_back(chart.samples[i].point);
    source_.push_back(i);
  }
}

bool GlobalStream::next(PointCloudLayer& out) {
  if (j_ > maxJ_) return false;
  out = PointCloudLayer{};
  out.j = j_;
  out.integratorTolerance = tol_ * j_;
  if (j_ > 0) {
    const long count = static_cast<long>(current_.size());
    std::vector<Point> moved(current_.size());
    std::vector<double> exit(current_.size(), std::numeric_limits<double>::quiet_NaN());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
      const auto k = static_cast<std::size_t>(i);
      try {
        moved[k] = flow(field_, current_[k], -1.0, tol_, options_);
      } catch (const LeftBoundingBoxError& e) {
        exit[k] = e.t_exit();
      } catch (const Error& e) {
        exit[k] = -std::numeric_limits<double>::infinity();
      }
    }
    std::vector<Point> kept;
    std::vector<std::size_t> src;
    for (std::size_t k = 0; k < moved.size(); ++k) {
      if (std::isnan(exit[k])) {
        kept.push_back(std::move(moved[k]));
        src.push_back(source_[k]);
      } else {
        out.log.push_back("sample " + std::to_string(source_[k]) + " dropped in layer " + std::to_string(j_) +
                          (std::isinf(exit[k]) ? ": integrator failure"
                                               : ": left the bounding box at t = " + std::to_string(exit[k])));
      }
    }
    current_ = std::move(kept);
    source_ = std::move(src);
  }
  out.points = current_;
  out.source = source_;
  ++j_;
  return true;
}

GlobalStream enumerate_global(const ManifoldChart& chart, const PolyVectorField& f, int maxJ, double tol,
                              const FlowOptions& options) {
  return GlobalStream(chart, f, maxJ, tol, options);
}

namespace {

double nearest_sq(const Point& p, std::span<const Point> B) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& q : B) {
    double s = 0;
    for (std::size_t c = 0; c < p.size(); ++c) s += (p[c] - q[c]) * (p[c] - q[c]);
    best = std::min(best, s);
  }
  return best;
}

void check_sets(std::span<const Point> A, std::span<const Point> B) {
  if (A.empty() || B.empty()) fail(ErrorCode::EmptySet, "Hausdorff distance of an empty set");
  const std::size_t n = A.front().size();
  for (const Point& p : A)
    if (p.size() != n) fail(ErrorCode::DimensionMismatch, "point dimension");
  for (const Point& p : B)
    if (p.size() != n) fail(ErrorCode::DimensionMismatch, "point dimension");
}

double directed(std::span<const Point> A, std::span<const Point> B) {
  double worst = 0;
  const long count = static_cast<long>(A.size());
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (long i = 0; i < count; ++i) worst = std::max(worst, nearest_sq(A[static_cast<std::size_t>(i)], B));
  return worst;
}

}  // namespace

double hausdorff(std::span<const Point> A, std::span<const Point> B) {
  check_sets(A, B);
  return std::sqrt(std::max(directed(A, B), directed(B, A)));
}

double hausdorff_serial(std::span<const Point> A, std::span<const Point> B) {
  check_sets(A, B);
  double worst = 0;
  for (const Point& p : A) worst = std::max(worst, nearest_sq(p, B));
  for (const Point& p : B) worst = std::max(worst, nearest_sq(p, A));
  return std::sqrt(worst);
}

std::vector<Point> resample(std::span<const Point> poly, double pitch) {
  if (poly.empty()) fail(ErrorCode::EmptySet, "empty polyline");
  std::vector<double> s(poly.size(), 0.0);
  for (std::size_t i = 1; i < poly.size(); ++i) {
    double d = 0;
    for (std::size_t c = 0; c < poly[i].size(); ++c) d += (poly[i][c] - poly[i - 1][c]) * (poly[i][c] - poly[i - 1][c]);
    s[i] = s[i - 1] + std::sqrt(d);
  }
  const double total = s.back();
  const std::size_t count = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(total / pitch)) + 1);
  std::vector<Point> out;
  out.reserve(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = k + 1 == count ? total : total * static_cast<double>(k) / static_cast<double>(count - 1);
    while (seg + 2 < poly.size() && s[seg + 1] < target) ++seg;
    if (poly.size() == 1) {
      out.push_back(poly[0]);
      continue;
    }
    const double len = s[seg + 1] - s[seg];
    const double w = len > 0 ? std::clamp((target - s[seg]) / len, 0.0, 1.0) : 0.0;
    Point p(poly[seg].size());
    for (std::size_t c = 0; c < p.size(); ++c) p[c] = poly[seg][c] + w * (poly[seg + 1][c] - poly[seg][c]);
    out.push_back(std::move(p));
  }
  return out;
}

BranchTrace counterexample_branch(const Rational& mu, const Window& window, double tol, double pitch) {
  if (mu > 0) fail(ErrorCode::InvalidArgument, "the branch experiment needs mu <= 0");
  if (!window.contains(1, 0)) fail(ErrorCode::InvalidArgument, "window must contain z2 = (1, 0)");
  BranchTrace tr;
  tr.mu = mu;
  tr.window = window;
  tr.pitch = pitch;
  if (mu == 0) {
    // the segment U_{l,0} between the two equilibria, sampled from z2 leftwards
    const long m = std::lround(1.0 / pitch);
    for (long i = 2 * m - 1; i >= 1; --i) {
      const double x = -1.0 + static_cast<double>(i) / static_cast<double>(m);
      if (window.contains(x, 0)) tr.polyline.push_back({x, 0.0});
    }
    return tr;
  }
  const double m = mu.get_d();
  const double vx = -1.0, vy = -2.0 * m / 3.0, vn = std::hypot(vx, vy);
  const Point z0{1.0 + 1e-6 * vx / vn, 1e-6 * vy / vn};
  const CompiledField f(systems::counterexample(mu));
  std::vector<Point> fine{z0};
  FlowOptions opt;
  opt.box = 1e3;
  integrate(f, z0, 200.0, tol, opt, [&](const StepView& s) {
    double len = 0;
    for (std::size_t c = 0; c < 2; ++c) len += (s.x1[c] - s.x0[c]) * (s.x1[c] - s.x0[c]);
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::sqrt(len) / (pitch / 10))));
    for (int p = 1; p <= pieces; ++p) {
      const double t = s.t0 + (s.t1 - s.t0) * p / pieces;
      Point q = hermite(s, t);
      if (!window.contains(q[0], q[1])) {
        // last point: bisect for the boundary crossing
        double lo = s.t0 + (s.t1 - s.t0) * (p - 1) / pieces, hi = t;
        for (int it = 0; it < 50; ++it) {
          const double mid = (lo + hi) / 2;
          const Point r = hermite(s, mid);
          (window.contains(r[0], r[1]) ? lo : hi) = mid;
        }
        fine.push_back(hermite(s, lo));
        return true;
      }
      fine.push_back(std::move(q));
    }
    return false;
  });
  tr.polyline = resample(fine, pitch);
  return tr;
}

std::vector<Point> counterexample_a_set(double ymax, double pitch) {
  std::vector<Point> a;
  const long nh = std::lround(2.0 / pitch);
  for (long i = 0; i <= nh; ++i) a.push_back({-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(nh), 0.0});
  const long nv = std::lround(ymax / pitch);
  for (long i = 0; i <= nv; ++i) a.push_back({-1.0, ymax * static_cast<double>(i) / static_cast<double>(nv)});
  return a;
}

}  // namespace hypman
