#include "hypman/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "hypman/error.hpp"
#include "hypman/rounding.hpp"

namespace hypman {

using namespace rnd;
using cplx = std::complex<double>;

int EigenvalueEnclosures::stable_count() const {
  int k = 0;
  for (const auto& e : entries) {
    if (e.enclosure.re().upper() < 0) k += e.multiplicity;
  }
  return k;
}

int EigenvalueEnclosures::total() const {
  int k = 0;
  for (const auto& e : entries) k += e.multiplicity;
  return k;
}

std::vector<Rational> characteristic_polynomial(const RationalMatrix& A) {
  if (!A.square()) fail(ErrorCode::DimensionMismatch, "characteristic polynomial of a non-square matrix");
  const std::size_t n = A.rows();
  std::vector<Rational> c(n + 1, Rational(0));
  c[n] = 1;
  RationalMatrix M(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    M = A * M;
    for (std::size_t i = 0; i < n; ++i) M(i, i) += c[n - k + 1];
    const RationalMatrix AM = A * M;
    Rational tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += AM(i, i);
    c[n - k] = -tr / static_cast<long>(k);
  }
  return c;
}

namespace {

Rational eval_exact(const std::vector<Rational>& p, const Rational& x) {
  Rational acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

// Exact division by (x - r); returns the quotient (remainder assumed zero).
std::vector<Rational> deflate(const std::vector<Rational>& p, const Rational& r) {
  const std::size_t d = p.size() - 1;
  std::vector<Rational> q(d, Rational(0));
  Rational carry = 0;
  for (std::size_t i = d; i-- > 0;) {
    carry = p[i + 1] + carry * r;
    q[i] = carry;
  }
  return q;
}

std::vector<cplx> aberth(const std::vector<Rational>& p, int iterations) {
  const std::size_t d = p.size() - 1;
  std::vector<double> c(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) c[i] = p[i].get_d();
  double bound = 0;
  for (std::size_t i = 0; i < d; ++i) bound = std::max(bound, std::fabs(c[i]));
  bound += 1;
  std::vector<cplx> z(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double angle = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d) + 0.4;
    z[k] = std::polar(bound, angle);
  }
  auto eval = [&](cplx x, cplx& dp) {
    cplx v = c[d];
    dp = 0;
    for (std::size_t i = d; i-- > 0;) {
      dp = dp * x + v;
      v = v * x + c[i];
    }
    return v;
  };
  for (int it = 0; it < iterations; ++it) {
    double change = 0;
    for (std::size_t k = 0; k < d; ++k) {
      cplx dp;
      const cplx v = eval(z[k], dp);
      if (v == cplx(0)) continue;
      const cplx ratio = v / dp;
      cplx s = 0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j != k) s += 1.0 / (z[k] - z[j]);
      }
      const cplx w = ratio / (1.0 - ratio * s);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
      z[k] -= w;
      change = std::max(change, std::abs(w) / (1 + std::abs(z[k])));
    }
    if (change < 1e-17) break;
  }
  return z;
}

std::vector<Rational> rational_candidates(double x) {
  std::vector<Rational> out;
  // continued-fraction convergents with small denominators
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 40; ++it) {
    const double a = std::floor(r);
    if (std::fabs(a) > 1e15) break;
    const mpz_class ai(a);
    const mpz_class p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (q1 > 1000000) break;
    Rational cand(p1, q1);
    cand.canonicalize();
    if (std::fabs(cand.get_d() - x) <= 1e-6 * (1 + std::fabs(x))) out.push_back(cand);
    const double frac = r - a;
    if (frac == 0) break;
    r = 1 / frac;
  }
  return out;
}

ComplexBall eval_ball(const std::vector<Ball>& coeffs, const ComplexBall& x) {
  ComplexBall acc = ComplexBall(coeffs.back());
  for (std::size_t i = coeffs.size() - 1; i-- > 0;) acc = acc * x + ComplexBall(coeffs[i]);
  return acc;
}

struct Disk {
  cplx center;
  double radius;
};

std::optional<std::vector<Disk>> smith_disks(const std::vector<Rational>& p, std::vector<cplx> z) {
  const std::size_t d = z.size();
  std::vector<Ball> coeffs;
  for (const Rational& c : p) coeffs.push_back(Ball::from_rational(c));
  std::vector<Disk> disks(d);
  for (std::size_t i = 0; i < d; ++i) {
    const ComplexBall zi(Ball(z[i].real()), Ball(z[i].imag()));
    const double num = eval_ball(coeffs, zi).mag();
    ComplexBall prod(Ball(1.0));
    for (std::size_t j = 0; j < d; ++j) {
      if (j == i) continue;
      prod = prod * (zi - ComplexBall(Ball(z[j].real()), Ball(z[j].imag())));
    }
    const double den = prod.mig();
    if (den <= 0) return std::nullopt;
    disks[i] = {z[i], div_up(mul_up(static_cast<double>(d), num), den)};
  }
  return disks;
}

EigenvalueCluster cluster_from(const std::vector<Disk>& disks, const std::vector<std::size_t>& members) {
  double re_lo = kInf, re_hi = -kInf, im_lo = kInf, im_hi = -kInf;
  for (std::size_t i : members) {
    re_lo = std::min(re_lo, sub_down(disks[i].center.real(), disks[i].radius));
    re_hi = std::max(re_hi, add_up(disks[i].center.real(), disks[i].radius));
    im_lo = std::min(im_lo, sub_down(disks[i].center.imag(), disks[i].radius));
    im_hi = std::max(im_hi, add_up(disks[i].center.imag(), disks[i].radius));
  }
  EigenvalueCluster c;
  c.enclosure = ComplexBall(Ball::from_interval(re_lo, re_hi), Ball::from_interval(im_lo, im_hi));
  c.multiplicity = static_cast<int>(members.size());
  return c;
}

}  // namespace

EigenvalueEnclosures enclose_eigenvalues(const RationalMatrix& A, int precision) {
  std::vector<Rational> p = characteristic_polynomial(A);
  EigenvalueEnclosures out;

  // exact rational roots first, deflated with multiplicity
  while (p.size() > 1) {
    const std::vector<cplx> z = aberth(p, precision);
    bool found = false;
    for (const cplx& zi : z) {
      if (std::fabs(zi.imag()) > 1e-6 * (1 + std::abs(zi))) continue;
      std::optional<Rational> r;
      for (const Rational& cand : rational_candidates(zi.real())) {
        if (eval_exact(p, cand) == 0) {
          r = cand;
          break;
        }
      }
      if (!r) continue;
      int mult = 0;
      while (p.size() > 1 && eval_exact(p, *r) == 0) {
        p = deflate(p, *r);
        ++mult;
      }
      EigenvalueCluster c;
      c.enclosure = ComplexBall(Ball::from_rational(*r), Ball(0.0));
      c.multiplicity = mult;
      c.exact = true;
      out.entries.push_back(c);
      found = true;
      break;
    }
    if (!found) break;
  }

  if (p.size() > 1) {
    std::vector<cplx> z = aberth(p, precision);
    std::optional<std::vector<Disk>> disks;
    for (int attempt = 0; attempt < 8 && !disks; ++attempt) {
      disks = smith_disks(p, z);
      if (!disks) {
        for (std::size_t k = 0; k < z.size(); ++k)
          z[k] += std::polar(1e-9 * (1 + std::abs(z[k])), 0.7 + static_cast<double>(k));
      }
    }
    if (!disks) fail(ErrorCode::NotHyperbolic, "eigenvalue enclosures could not be separated");
    const std::size_t d = disks->size();
    std::vector<std::size_t> parent(d);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        const double dist = std::abs((*disks)[i].center - (*disks)[j].center) * (1 - 1e-12);
        if (dist <= add_up((*disks)[i].radius, (*disks)[j].radius)) parent[find(i)] = find(j);
      }
    }
    for (std::size_t root = 0; root < d; ++root) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < d; ++i) {
        if (find(i) == root) members.push_back(i);
      }
      if (!members.empty()) out.entries.push_back(cluster_from(*disks, members));
    }
  }

  for (const auto& e : out.entries) {
    if (e.enclosure.re().contains_zero()) {
      fail(ErrorCode::NotHyperbolic, "an eigenvalue enclosure meets the imaginary axis");
    }
  }
  std::stable_sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
    if (a.enclosure.re().mid() != b.enclosure.re().mid()) return a.enclosure.re().mid() < b.enclosure.re().mid();
    return a.enclosure.im().mid() < b.enclosure.im().mid();
  });
  return out;
}

namespace {

// Largest dyadic below q with about 24 significant bits.
Rational dyadic_below(const Rational& q) {
  const long bits = 24 + std::max(0L, ceil_log2(1 / q));
  return floor_dyadic(q, bits);
}

}  // namespace

HyperbolicGap compute_gap(const EigenvalueEnclosures& ev) {
  std::optional<Rational> beta_minus, beta_plus;
  double max_mag = 0;
  HyperbolicGap gap;
  for (const auto& e : ev.entries) {
    const Ball& re = e.enclosure.re();
    if (re.contains_zero()) fail(ErrorCode::NotHyperbolic, "eigenvalue enclosure meets the imaginary axis");
    if (re.upper() < 0) {
      const Rational b = Rational(-re.upper());
      if (!beta_minus || b < *beta_minus) beta_minus = b;
      gap.k += e.multiplicity;
    } else {
      const Rational b = Rational(re.lower());
      if (!beta_plus || b < *beta_plus) beta_plus = b;
    }
    gap.n += e.multiplicity;
    max_mag = std::max(max_mag, e.enclosure.mag());
  }
  if (!beta_minus && !beta_plus) fail(ErrorCode::InvalidArgument, "no eigenvalues");
  if (!beta_plus) beta_plus = beta_minus;
  if (!beta_minus) beta_minus = beta_plus;
  const Rational half_min = std::min(*beta_minus, *beta_plus) / 2;
  gap.sigma = dyadic_below(half_min);
  gap.alpha = dyadic_below(*beta_minus / 4);
  gap.alpha1 = gap.alpha / 2;
  gap.alpha2 = gap.alpha - gap.alpha1;
  const Rational lower = std::max(Rational(gap.alpha + gap.sigma), Rational(1));
  const long from_gap = static_cast<long>(floor(lower).get_si()) + 1;
  const long from_spectrum = static_cast<long>(std::ceil(max_mag)) + 1;
  gap.M = std::max(from_gap, from_spectrum);
  return gap;
}

ContourPair build_contours(const HyperbolicGap& gap) {
  ContourPair pair;
  const Rational M(gap.M);
  if (gap.k > 0) {
    const Rational right = -(gap.alpha + gap.sigma);
    pair.stable = Contour{Side::Stable, {{{right, M}, {-M, M}, {-M, -M}, {right, -M}}}};
  }
  if (gap.k < gap.n) {
    pair.unstable = Contour{Side::Unstable, {{{gap.sigma, M}, {gap.sigma, -M}, {M, -M}, {M, M}}}};
  }
  return pair;
}

namespace {

Ball point_on(const Rational& a, const Rational& b, double s) {
  // a + s (b - a) with s an exact double
  return Ball::from_rational(a) + Ball(s) * (Ball::from_rational(b) - Ball::from_rational(a));
}

Ball hull(const Ball& x, const Ball& y) {
  return Ball::from_interval(std::min(x.lower(), y.lower()), std::max(x.upper(), y.upper()));
}

}  // namespace

long resolvent_norm_bound(const RationalMatrix& A, const Contour& contour) {
  const ComplexBallMatrix Ab = to_complex(to_ball(A));
  constexpr int kInitial = 16;
  std::vector<std::pair<std::size_t, int>> tasks;
  for (std::size_t e = 0; e < 4; ++e)
    for (int k = 0; k < kInitial; ++k) tasks.emplace_back(e, k);
  std::vector<double> worst(tasks.size(), 0);
  std::vector<int> failed(tasks.size(), 0);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& [edge, piece] = tasks[t];
    const ComplexRational& a = contour.vertices[edge];
    const ComplexRational& b = contour.vertices[(edge + 1) % 4];
    std::vector<std::pair<double, double>> stack{{static_cast<double>(piece) / kInitial,
                                                  static_cast<double>(piece + 1) / kInitial}};
    double local = 0;
    while (!stack.empty()) {
      const auto [s0, s1] = stack.back();
      stack.pop_back();
      const Ball re = hull(point_on(a.re, b.re, s0), point_on(a.re, b.re, s1));
      const Ball im = hull(point_on(a.im, b.im, s0), point_on(a.im, b.im, s1));
      const double bound = resolvent_sup(Ab, re, im, 0);
      const double sm = s0 + (s1 - s0) / 2;
      const double centre = resolvent_sup(Ab, point_on(a.re, b.re, sm), point_on(a.im, b.im, sm), 0);
      const bool tight = std::isfinite(bound) &&
                         (std::ceil(bound) <= std::ceil(centre) || bound <= centre * (1 + 1.0 / 64));
      if (tight) {
        local = std::max(local, bound);
        continue;
      }
      if (s1 - s0 < 0x1p-40) {
        failed[t] = 1;
        break;
      }
      stack.emplace_back(sm, s1);
      stack.emplace_back(s0, sm);
    }
    worst[t] = local;
  }
  double m = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (failed[t]) fail(ErrorCode::ResolventUncertifiable, "resolvent not certifiable along the contour");
    m = std::max(m, worst[t]);
  }
  return std::max(1L, static_cast<long>(std::ceil(m)));
}

std::vector<BallVector> projection_basis(const BallMatrix& P, int rank) {
  std::vector<BallVector> basis;
  if (rank <= 0) return basis;
  const Eigen::MatrixXd m = mid(P);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd Q = qr.householderQ();
  for (int c = 0; c < rank; ++c) {
    Eigen::VectorXd v = Q.col(c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    BallVector b;
    for (Eigen::Index i = 0; i < v.size(); ++i) b.push_back(Ball(v(i)));
    basis.push_back(std::move(b));
  }
  return basis;
}

SpectralSplit spectral_projections(const RationalMatrix& A, const EigenvalueEnclosures& ev,
                                   const HyperbolicGap& gap, const ContourPair& contours, long K1,
                                   const QuadratureOptions& options) {
  SpectralSplit s;
  const std::size_t n = A.rows();
  s.A = A;
  s.eigenvalues = ev;
  s.gap = gap;
  s.contours = contours;
  s.K1 = K1;
  s.K = 4 * gap.M * K1;
  s.P1 = BallMatrix(n, n);
  s.P2 = BallMatrix(n, n);
  if (contours.stable) {
    s.stable_rule = std::make_shared<const ContourRule>(A, *contours.stable, options);
    s.P1 = s.stable_rule->component(Rational(0));
  }
  if (contours.unstable) {
    s.unstable_rule = std::make_shared<const ContourRule>(A, *contours.unstable, options);
    s.P2 = s.unstable_rule->component(Rational(0));
  }
  s.stable_basis = projection_basis(s.P1, gap.k);
  s.unstable_basis = projection_basis(s.P2, gap.n - gap.k);
  return s;
}

SpectralSplit split_matrix(const RationalMatrix& A, const QuadratureOptions& options) {
  const EigenvalueEnclosures ev = enclose_eigenvalues(A);
  const HyperbolicGap gap = compute_gap(ev);
  const ContourPair contours = build_contours(gap);
  long K1 = 1;
  if (contours.stable) K1 = std::max(K1, resolvent_norm_bound(A, *contours.stable));
  if (contours.unstable) K1 = std::max(K1, resolvent_norm_bound(A, *contours.unstable));
  return spectral_projections(A, ev, gap, contours, K1, options);
}

}  // namespace hypman
