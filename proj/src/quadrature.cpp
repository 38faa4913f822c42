#include "hypman/quadrature.hpp"

#include <omp.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "hypman/error.hpp"
#include "hypman/rounding.hpp"

namespace hypman {

using namespace rnd;

GaussRule gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(order); it != cache.end()) return it->second;
  if (order < 1) fail(ErrorCode::InvalidArgument, "Gauss rule order must be positive");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const long double pi = 3.141592653589793238462643383279502884L;
  for (int i = 0; i < order; ++i) {
    long double x = std::cos(pi * (i + 0.75L) / (order + 0.5L));
    long double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1;
      dp = order * (x * p1 - p0) / (x * x - 1);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    long double p0 = 1, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (order == 1) p0 = 1;
    dp = order * (x * p1 - p0) / (x * x - 1);
    rule.nodes[static_cast<std::size_t>(i)] = static_cast<double>(x);
    rule.weights[static_cast<std::size_t>(i)] = static_cast<double>(2 / ((1 - x * x) * dp * dp));
  }
  cache.emplace(order, rule);
  return rule;
}

double resolvent_sup(const ComplexBallMatrix& A, const Ball& re, const Ball& im, int depth) {
  const std::size_t n = A.rows();
  ComplexBallMatrix M = A;
  const ComplexBall xi(re, im);
  for (std::size_t i = 0; i < n; ++i) M(i, i) = M(i, i) - xi;
  try {
    return hs_norm_upper(inverse(M));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotCertifiablyInvertible) throw;
  }
  if (depth <= 0) return std::numeric_limits<double>::infinity();
  const double hr = re.rad() / 2, hi = im.rad() / 2;
  const double rr = up(hr), ri = up(hi);
  double worst = 0;
  for (double sr : {-1.0, 1.0}) {
    for (double si : {-1.0, 1.0}) {
      const Ball r(re.mid() + sr * hr, rr);
      const Ball i(im.mid() + si * hi, ri);
      // child boxes must cover the parent; widen by the rounding of the centres
      const Ball rc = inflate(r, (std::fabs(re.mid()) + hr) * 0x1p-52);
      const Ball ic = inflate(i, (std::fabs(im.mid()) + hi) * 0x1p-52);
      worst = std::max(worst, resolvent_sup(A, rc, ic, depth - 1));
      if (!std::isfinite(worst)) return worst;
    }
  }
  return worst;
}

namespace {

constexpr std::array<double, 6> kRhoCandidates{1.25, 1.6, 2.2, 3.2, 5.0, 8.0};

std::complex<double> to_double(const ComplexRational& z) { return {z.re.get_d(), z.im.get_d()}; }

Ball exact_half_sum(double a, double b) { return (Ball(a) + Ball(b)) * Ball(0.5); }
Ball exact_half_diff(double a, double b) { return (Ball(b) - Ball(a)) * Ball(0.5); }

}  // namespace

ContourRule::ContourRule(const RationalMatrix& A, const Contour& contour, const QuadratureOptions& options)
    : n_(A.rows()), A_(A), options_(options) {
  A_ball_ = to_complex(to_ball(A));
  A_mid_ = mid(A_ball_);
  gauss_ = gauss_legendre(options.order);
  gauss_fine_ = gauss_legendre(2 * options.order);

  std::array<std::complex<double>, 4> v;
  for (std::size_t i = 0; i < 4; ++i) v[i] = to_double(contour.vertices[i]);
  double perimeter = 0;
  for (std::size_t i = 0; i < 4; ++i) perimeter += std::abs(v[(i + 1) % 4] - v[i]);
  const double density = 0.25 * options.tolerance / perimeter;

  // initial pieces of length at most 1/2, in contour order
  std::vector<std::pair<std::complex<double>, std::complex<double>>> pieces;
  for (std::size_t e = 0; e < 4; ++e) {
    const std::complex<double> a = v[e], b = v[(e + 1) % 4];
    const auto count = static_cast<int>(std::max(1.0, std::ceil(std::abs(b - a) / 0.5)));
    std::complex<double> prev = a;
    for (int k = 1; k <= count; ++k) {
      const std::complex<double> next = (k == count) ? b : a + (b - a) * (static_cast<double>(k) / count);
      pieces.emplace_back(prev, next);
      prev = next;
    }
  }

  std::vector<std::vector<Segment>> accepted(pieces.size());
  std::vector<int> failure(pieces.size(), 0);
  const std::size_t limit = options.max_segments;
  const int subdivide = std::max(1, options.subdivide);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    std::vector<std::pair<std::complex<double>, std::complex<double>>> stack{pieces[p]};
    std::vector<Segment> out;
    while (!stack.empty()) {
      auto [a, b] = stack.back();
      stack.pop_back();
      Segment seg;
      seg.a = a;
      seg.b = b;
      const double len = std::abs(b - a);
      const bool ok = options.mode == QuadratureMode::Rigorous ? try_segment(seg, density * len)
                                                               : try_segment_fast(seg, density * len);
      if (ok) {
        out.push_back(std::move(seg));
        continue;
      }
      if (len < 1e-9 || out.size() + stack.size() > limit) {
        failure[p] = 1;
        break;
      }
      const std::complex<double> m = a + (b - a) * 0.5;
      stack.emplace_back(m, b);
      stack.emplace_back(a, m);
    }
    if (subdivide > 1 && !failure[p]) {
      std::vector<Segment> fine;
      for (const Segment& s : out) {
        std::complex<double> prev = s.a;
        for (int k = 1; k <= subdivide; ++k) {
          Segment part;
          part.a = prev;
          part.b = (k == subdivide) ? s.b : s.a + (s.b - s.a) * (static_cast<double>(k) / subdivide);
          const bool ok = options.mode == QuadratureMode::Rigorous ? try_segment(part, 1e300)
                                                                   : try_segment_fast(part, 1e300);
          if (!ok) failure[p] = 1;
          prev = part.b;
          fine.push_back(std::move(part));
        }
      }
      out = std::move(fine);
    }
    accepted[p] = std::move(out);
  }
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    if (failure[p]) {
      fail(ErrorCode::QuadratureBudgetExceeded, "contour quadrature could not meet tolerance " +
                                                    std::to_string(options.tolerance));
    }
    for (Segment& s : accepted[p]) segments_.push_back(std::move(s));
  }
  if (segments_.size() > limit) {
    fail(ErrorCode::QuadratureBudgetExceeded, "contour quadrature needs more than " +
                                                  std::to_string(limit) + " segments");
  }
}

bool ContourRule::try_segment(Segment& seg, double budget) const {
  const double ar = seg.a.real(), ai = seg.a.imag(), br = seg.b.real(), bi = seg.b.imag();
  const ComplexBall center(exact_half_sum(ar, br), exact_half_sum(ai, bi));
  const ComplexBall half(exact_half_diff(ar, br), exact_half_diff(ai, bi));
  const double h = half.mag();
  const int n = options_.order;
  const double hre = std::fabs(half.re().mid()) + half.re().rad();
  const double him = std::fabs(half.im().mid()) + half.im().rad();

  seg.ellipses.clear();
  double best = std::numeric_limits<double>::infinity();
  for (double rho : kRhoCandidates) {
    const double a = (rho + 1 / rho) / 2 * (1 + 1e-12);
    const double b = (rho - 1 / rho) / 2 * (1 + 1e-12);
    const double wre = up(hre * a + him * b) * (1 + 1e-12);
    const double wim = up(him * a + hre * b) * (1 + 1e-12);
    const Ball re = inflate(Ball(center.re().mid(), wre), center.re().rad());
    const Ball im = inflate(Ball(center.im().mid(), wim), center.im().rad());
    const double sup = resolvent_sup(A_ball_, re, im, 2);
    if (!std::isfinite(sup)) break;  // larger ellipses contain this one
    const double decay = std::exp(-2.0 * n * std::log(rho)) * (1 + 1e-10);
    const double factor = up(up(h * (64.0 / 15.0)) * up(decay / (rho * rho - 1)) * (1 + 1e-12)) * sup * (1 + 1e-12);
    seg.ellipses.push_back({rho, sup, re.lower(), re.upper(), up(factor)});
    best = std::min(best, factor);
  }
  if (seg.ellipses.empty() || !(best <= budget)) return false;

  seg.nodes.clear();
  seg.weights.clear();
  seg.resolvents.clear();
  for (std::size_t k = 0; k < gauss_.nodes.size(); ++k) {
    const Ball x(gauss_.nodes[k], kGaussNodeError);
    const Ball w(gauss_.weights[k], kGaussNodeError);
    const ComplexBall xi = center + half * ComplexBall(x);
    ComplexBallMatrix M = A_ball_;
    for (std::size_t i = 0; i < n_; ++i) M(i, i) = M(i, i) - xi;
    ComplexBallMatrix R;
    try {
      R = inverse(M);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotCertifiablyInvertible) return false;
      throw;
    }
    seg.nodes.push_back(xi);
    seg.weights.push_back(half * ComplexBall(w));
    seg.resolvents.push_back(std::move(R));
  }
  return true;
}

bool ContourRule::try_segment_fast(Segment& seg, double budget) const {
  const std::complex<double> center = (seg.a + seg.b) * 0.5;
  const std::complex<double> half = (seg.b - seg.a) * 0.5;
  seg.fast_nodes.clear();
  seg.fast_weights.clear();
  seg.fast_resolvents.clear();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (const GaussRule* rule : {&gauss_, &gauss_fine_}) {
    for (std::size_t k = 0; k < rule->nodes.size(); ++k) {
      const std::complex<double> xi = center + half * rule->nodes[k];
      Eigen::MatrixXcd M = A_mid_ - xi * I;
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
      seg.fast_nodes.push_back(xi);
      seg.fast_weights.push_back(half * rule->weights[k]);
      seg.fast_resolvents.push_back(lu.inverse());
    }
  }
  seg.fast_coarse = gauss_.nodes.size();
  Eigen::MatrixXcd coarse = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  Eigen::MatrixXcd fine = coarse;
  for (std::size_t k = 0; k < seg.fast_nodes.size(); ++k) {
    (k < seg.fast_coarse ? coarse : fine) += seg.fast_weights[k] * seg.fast_resolvents[k];
  }
  const double est = (fine - coarse).cwiseAbs().maxCoeff();
  return std::isfinite(est) && fine.allFinite() && est <= budget;
}

ComplexBallMatrix ContourRule::segment_sum(const Segment& seg, const Ball& t) const {
  ComplexBallMatrix acc(n_, n_);
  if (options_.mode == QuadratureMode::Fast) {
    const Eigen::Index n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXcd coarse = Eigen::MatrixXcd::Zero(n, n), fine = coarse;
    for (std::size_t k = 0; k < seg.fast_nodes.size(); ++k) {
      const std::complex<double> e = std::exp(seg.fast_nodes[k] * t.mid());
      (k < seg.fast_coarse ? coarse : fine) += (seg.fast_weights[k] * e) * seg.fast_resolvents[k];
    }
    const double est = (fine - coarse).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        acc(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
            ComplexBall(Ball(fine(i, j).real(), est), Ball(fine(i, j).imag(), est));
    return acc;
  }
  for (std::size_t k = 0; k < seg.nodes.size(); ++k) {
    const ComplexBall coef = seg.weights[k] * exp(seg.nodes[k] * ComplexBall(t));
    const ComplexBallMatrix& R = seg.resolvents[k];
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) acc(i, j) += coef * R(i, j);
  }
  double trunc = std::numeric_limits<double>::infinity();
  for (const Ellipse& e : seg.ellipses) {
    const Ball growth = exp(t * Ball(t.mid() >= 0 ? e.re_hi : e.re_lo));
    trunc = std::min(trunc, mul_up(e.factor, growth.upper()));
  }
  for (auto& z : acc.data()) z = inflate(z, trunc);
  return acc;
}

BallMatrix ContourRule::finish(const std::vector<ComplexBallMatrix>& partials) const {
  ComplexBallMatrix total(n_, n_);
  for (const auto& p : partials) total += p;
  const Ball inv_two_pi = Ball(1.0) / (Ball(2.0) * pi_ball());
  BallMatrix out(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out(i, j) = -(total(i, j).im() * inv_two_pi);
  return out;
}

BallMatrix ContourRule::component(const Rational& t) const {
  const Ball tb = Ball::from_rational(t);
  std::vector<ComplexBallMatrix> partials(segments_.size());
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < segments_.size(); ++s) partials[s] = segment_sum(segments_[s], tb);
  return finish(partials);
}

BallMatrix ContourRule::component_serial(const Rational& t) const {
  const Ball tb = Ball::from_rational(t);
  std::vector<ComplexBallMatrix> partials;
  partials.reserve(segments_.size());
  for (const Segment& seg : segments_) partials.push_back(segment_sum(seg, tb));
  return finish(partials);
}

}  // namespace hypman
