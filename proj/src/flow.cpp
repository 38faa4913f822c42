#include "hypman/flow.hpp"

#include <algorithm>
#include <cmath>

#include "hypman/error.hpp"

namespace hypman {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b* (fifth minus fourth order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

IntegrationResult integrate(const CompiledField& f, std::span<const double> x, double tau, double tol,
                            const FlowOptions& options, const StepObserver& observer) {
  const std::size_t n = f.dim();
  if (x.size() != n) fail(ErrorCode::DimensionMismatch, "point dimension");
  if (!(tol > 0)) fail(ErrorCode::InvalidArgument, "integrator tolerance must be positive");
  std::vector<double> lo(n, -options.box), hi(n, options.box);
  if (!options.lower.empty()) lo = options.lower;
  if (!options.upper.empty()) hi = options.upper;
  if (lo.size() != n || hi.size() != n) fail(ErrorCode::DimensionMismatch, "bounding box dimension");
  const auto inside = [&](const std::vector<double>& y) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(y[i] >= lo[i] && y[i] <= hi[i])) return false;
    }
    return true;
  };

  IntegrationResult res;
  res.x.assign(x.begin(), x.end());
  if (!inside(res.x)) throw LeftBoundingBoxError(0.0);
  if (tau == 0) return res;

  const double dir = tau > 0 ? 1.0 : -1.0;
  const double span = std::abs(tau);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y(n), xn(n);
  f.eval(res.x.data(), k1.data());

  double h = options.initial_step;
  if (h <= 0) {
    double fn = 0, xn0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      fn = std::max(fn, std::abs(k1[i]));
      xn0 = std::max(xn0, std::abs(res.x[i]));
    }
    h = fn > 0 ? 0.01 * std::max(xn0, 1.0) / fn : 0.01;
    h = std::min({h, span, 0.1});
  }

  double t = 0;
  while (t < span) {
    if (res.steps + res.rejected >= options.max_steps) {
      fail(ErrorCode::StepUnderflow, "integrator step budget exhausted");
    }
    bool last = false;
    if (t + h >= span) {
      h = span - t;
      last = true;
    }
    if (h < 1e-14 * std::max(1.0, t)) {
      fail(ErrorCode::StepUnderflow, "integrator step below 1e-14 at t = " + std::to_string(dir * t));
    }
    const double s = dir * h;
    const double* x0 = res.x.data();
    for (std::size_t i = 0; i < n; ++i) y[i] = x0[i] + s * a21 * k1[i];
    f.eval(y.data(), k2.data());
    for (std::size_t i = 0; i < n; ++i) y[i] = x0[i] + s * (a31 * k1[i] + a32 * k2[i]);
    f.eval(y.data(), k3.data());
    for (std::size_t i = 0; i < n; ++i) y[i] = x0[i] + s * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f.eval(y.data(), k4.data());
    for (std::size_t i = 0; i < n; ++i)
      y[i] = x0[i] + s * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f.eval(y.data(), k5.data());
    for (std::size_t i = 0; i < n; ++i)
      y[i] = x0[i] + s * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f.eval(y.data(), k6.data());
    for (std::size_t i = 0; i < n; ++i)
      xn[i] = x0[i] + s * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f.eval(xn.data(), k7.data());

    double err = 0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = s * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = std::max({1.0, std::abs(x0[i]), std::abs(xn[i])});
      err = std::max(err, std::abs(e) / scale);
      if (!std::isfinite(xn[i])) finite = false;
    }
    const double allowed = tol * h / span;
    if (!finite || err > allowed) {
      const double factor = finite && err > 0 ? std::max(0.2, 0.9 * std::pow(allowed / err, 0.25)) : 0.2;
      h *= factor;
      ++res.rejected;
      continue;
    }

    const double t0 = t;
    t = last ? span : t + h;
    ++res.steps;
    bool stop = false;
    if (observer) {
      StepView view{dir * t0, dir * t, res.x, xn, k1, k7};
      stop = observer(view);
    }
    if (!stop && !inside(xn)) throw LeftBoundingBoxError(dir * t);
    res.x.swap(xn);
    k1.swap(k7);
    res.t = dir * t;
    if (stop) {
      res.stopped = true;
      return res;
    }
    const double grow = err > 0 ? 0.9 * std::pow(allowed / err, 0.25) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
  }
  return res;
}

std::vector<double> flow(const CompiledField& f, std::span<const double> x, double tau, double tol,
                         const FlowOptions& options) {
  return integrate(f, x, tau, tol, options).x;
}

std::vector<double> flow(const PolyVectorField& f, std::span<const double> x, double tau, double tol,
                         const FlowOptions& options) {
  return flow(CompiledField(f), x, tau, tol, options);
}

std::vector<double> hermite(const StepView& s, double t) {
  const double h = s.t1 - s.t0;
  const double th = h == 0 ? 0 : (t - s.t0) / h;
  const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
  const double h10 = th * (1 - th) * (1 - th);
  const double h01 = th * th * (3 - 2 * th);
  const double h11 = th * th * (th - 1);
  std::vector<double> out(s.x0.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = h00 * s.x0[i] + h10 * h * s.f0[i] + h01 * s.x1[i] + h11 * h * s.f1[i];
  }
  return out;
}

}  // namespace hypman
