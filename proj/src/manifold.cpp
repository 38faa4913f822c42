#include "hypman/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypman/error.hpp"
#include "hypman/flow.hpp"
#include "hypman/rounding.hpp"

namespace hypman {

using namespace rnd;

namespace {

constexpr double kUnit = 0x1p-52;

double norm2(const double* x, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

double norm2(std::span<const double> x) { return norm2(x.data(), x.size()); }

double radius_hs(const BallMatrix& m) {
  double s = 0;
  for (const Ball& b : m.data()) s = add_up(s, sq_up(b.rad()));
  return sqrt_up(s);
}

// Row-major n x n matrix with a cheap matrix-vector product.
struct Dense {
  std::size_t n = 0;
  std::vector<double> a;

  Dense() = default;
  explicit Dense(const Eigen::MatrixXd& m) : n(static_cast<std::size_t>(m.rows())), a(n * n) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j);
  }
  // out = this * x
  void apply(const double* x, double* out) const {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
      out[i] = s;
    }
  }
};

double max_power_norm(const Eigen::MatrixXd& M, std::size_t N) {
  const Eigen::Index n = M.rows();
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  double q = P.norm();
  for (std::size_t m = 1; m <= N; ++m) {
    P = P * M;
    q = std::max(q, P.norm());
  }
  return mul_up(q, 1 + 1e-10);
}

}  // namespace

RadiusCertificate radius_certificate(const SpectralSplit& split, const NonlinearRemainder& rem) {
  RadiusCertificate c;
  const Rational K(split.K);
  const Rational bound = split.gap.sigma / (4 * K);
  long m = 0;
  while (pow2(-m) > bound) ++m;
  c.m0 = m;
  c.d = modulus_d(rem, m);
  c.eta = pow2(-c.d);
  c.gamma = c.eta;
  c.r = c.eta / (2 * K);
  c.delta = c.r;
  c.dRadius = c.eta / (4 * K * K);
  c.alpha1 = split.gap.alpha1;
  // alpha1 / ln 2 from below, using a rational upper bound of ln 2
  const Rational ln2_up = from_double(std::nextafter(0.6931471805599453, 1.0));
  c.epsilonBase2 = floor_dyadic(c.alpha1 / ln2_up, 40);
  return c;
}

std::span<const double> PicardSolution::at(std::size_t i) const {
  const std::size_t n = a.size();
  return {values.data() + i * n, n};
}

std::vector<double> PicardSolution::value_at(double t) const {
  const double T = h * static_cast<double>(steps);
  if (!(t >= 0 && t <= T)) fail(ErrorCode::InvalidArgument, "time outside the Picard grid");
  const auto i = std::min(static_cast<std::size_t>(t / h), steps == 0 ? 0 : steps - 1);
  const double w = steps == 0 ? 0 : (t - h * static_cast<double>(i)) / h;
  const auto lo = at(i), hi = at(std::min(i + 1, steps));
  std::vector<double> out(lo.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = lo[c] + w * (hi[c] - lo[c]);
  return out;
}

PicardEngine::PicardEngine(std::shared_ptr<const SemigroupEvaluator> semigroup, const NonlinearRemainder& rem,
                           const RadiusCertificate& cert, double a_max, const PicardOptions& options)
    : semigroup_(std::move(semigroup)), rem_(rem), F_(rem.F), cert_(cert), options_(options) {
  const SpectralSplit& split = semigroup_->split();
  n_ = split.A.rows();
  const double tol = options_.tol;
  if (!(tol > 0)) fail(ErrorCode::InvalidArgument, "Picard tolerance must be positive");
  if (!(a_max >= 0) || Rational(a_max) >= cert_.r) {
    fail(ErrorCode::InvalidArgument, "parameter radius must be below r");
  }
  a_max_ = a_max;
  K_ = static_cast<double>(split.K);
  eta_ = to_double_up(cert_.eta);
  alpha1_ = to_double_down(cert_.alpha1);
  const double sigma = to_double_down(split.gap.sigma);
  const double rate = to_double_down(split.gap.alpha + split.gap.sigma);
  const double L = to_double_up(rem_.L);
  const double normA = to_double_up(hs_norm_bound(split.A));
  const double slack = 10 * tol;
  lip_m0_ = mul_up(L, add_up(eta_, slack));

  // a priori bound on the exact solution: |u(t)| <= U0 e^{-alpha1 t}
  const double U0 = std::min(eta_, mul_up(2 * K_, a_max_));
  // |d^2/ds^2 of the integrands| <= K C2 U0^2 times the kernel decay
  const double a1 = normA + L * U0 / 2;
  const double c0 = L / 2, c1 = L * a1, c2 = L * a1 * (a1 + normA + L * U0);
  const double C2 = (normA * normA * c0 + 2 * normA * c1 + c2) * (1 + 1e-12);
  const double trap_coeff = K_ * C2 * U0 * U0 * (1 / rate + 1 / sigma) / 12 * (1 + 1e-12);
  const auto e_trap = [&](double h) { return h * h * std::exp(rate * h) * trap_coeff * (1 + 1e-12); };
  const auto e_tail = [&](double T) {
    return K_ * lip_m0_ * U0 * std::exp(-alpha1_ * T) / (alpha1_ + sigma) * (1 + 1e-12);
  };

  int k = 4;
  if (options_.step_exponent) {
    k = *options_.step_exponent;
  } else {
    while (e_trap(std::ldexp(1.0, -k)) > tol / 8) {
      if (++k > 30) fail(ErrorCode::QuadratureBudgetExceeded, "Picard grid step below 2^-30");
    }
  }
  h_ = std::ldexp(1.0, -k);
  if (options_.horizon) {
    const double T = *options_.horizon;
    if (e_tail(T) > tol / 2) {
      fail(ErrorCode::HorizonTooShort, "tail bound " + std::to_string(e_tail(T)) + " exceeds tol/2 at T = " +
                                           std::to_string(T));
    }
    N_ = static_cast<std::size_t>(std::ceil(T / h_));
  } else {
    double T = 1;
    if (e_tail(T) > tol / 8) T = std::log(K_ * lip_m0_ * U0 / ((alpha1_ + sigma) * tol / 8)) / alpha1_;
    N_ = static_cast<std::size_t>(std::ceil(T / h_));
    while (e_tail(h_ * static_cast<double>(N_)) > tol / 8) ++N_;
  }
  N_ = std::max<std::size_t>(N_, 1);

  const Rational hq = pow2(-k);
  const BallMatrix Ih = semigroup_->eval_component(Side::Stable, hq);
  const BallMatrix Jh = semigroup_->eval_component(Side::Unstable, -hq);
  P1_ = mid(split.P1);
  P2_ = mid(split.P2);
  Ih_ = mid(Ih);
  Jh_ = mid(Jh);
  dP1_ = radius_hs(split.P1);
  dP2_ = radius_hs(split.P2);
  dIh_ = radius_hs(Ih);
  dJh_ = radius_hs(Jh);
  QI_ = max_power_norm(Ih_, N_);
  QJ_ = max_power_norm(Jh_, N_);

  const double h = h_;
  const double Nd = static_cast<double>(N_);
  q_ = lip_m0_ * (K_ * (h / 2) / std::tanh(rate * h / 2) + K_ * (h / 2) / std::tanh(sigma * h / 2) +
                  h * Nd * Nd / 2 * (QI_ * dIh_ + QJ_ * dJh_) * K_ + h * (dP1_ + dP2_));
  q_ *= 1 + 1e-12;
  if (!(q_ < 1)) fail(ErrorCode::MonitorViolation, "discrete Picard operator is not a contraction");

  const double Gmax = lip_m0_ * U0;
  const double SG = lip_m0_ * U0 * (1 / alpha1_ + h);
  const double e_mat = Nd * QI_ * dIh_ * K_ * SG + h / 2 * dP1_ * Gmax + Nd * QJ_ * dJh_ * K_ * SG +
                       h / 2 * dP2_ * Gmax + Nd * QI_ * dIh_ * P1_.norm() * a_max_ + K_ * dP1_ * a_max_;
  const double Q = std::max({QI_, QJ_, 1.0});
  const double Giter = lip_m0_ * (eta_ + slack);
  const double e_round = 4 * Nd * Q * Q * static_cast<double>(n_ + 4) * kUnit *
                         (a_max_ * (K_ + 1) + 4 * Giter * (1 / alpha1_ + h) + h * Giter);
  e_op_ = (e_trap(h) + e_tail(h * Nd) + e_mat + e_round) * (1 + 1e-10);

  // |u''| <= (|A| + L eta)(|A| + L eta / 2) U0 along the exact solution
  interp_ = h * h / 8 * (normA + L * eta_) * (normA + L * eta_ / 2) * U0 * (1 + 1e-12);

  envelope_.resize(N_ + 1);
  for (std::size_t i = 0; i <= N_; ++i) envelope_[i] = std::exp(-alpha1_ * h * static_cast<double>(i));
}

void PicardEngine::sweep_recursive(const std::vector<double>& G, const Eigen::VectorXd& Pa,
                                   std::vector<double>& out, double*) const {
  const std::size_t n = n_, N = N_;
  const double hh = h_ / 2;
  const Dense I(Ih_), J(Jh_), P1(P1_), P2(P2_);
  std::vector<double> z(n), v(n, 0.0), t1(n), t2(n);
  for (std::size_t c = 0; c < n; ++c) z[c] = Pa(static_cast<Eigen::Index>(c));
  out.assign((N + 1) * n, 0.0);
  // forward part z + v
  for (std::size_t c = 0; c < n; ++c) out[c] = z[c];
  for (std::size_t i = 0; i < N; ++i) {
    I.apply(z.data(), t1.data());
    z.swap(t1);
    // v <- I v + h/2 (I G_i + P1 G_{i+1})
    for (std::size_t c = 0; c < n; ++c) t1[c] = v[c] + hh * G[i * n + c];
    I.apply(t1.data(), t2.data());
    P1.apply(&G[(i + 1) * n], t1.data());
    for (std::size_t c = 0; c < n; ++c) v[c] = t2[c] + hh * t1[c];
    for (std::size_t c = 0; c < n; ++c) out[(i + 1) * n + c] = z[c] + v[c];
  }
  // backward part w, w_N = 0
  std::vector<double> w(n, 0.0);
  for (std::size_t i = N; i-- > 0;) {
    // w <- J (w + h/2 G_{i+1}) + h/2 P2 G_i
    for (std::size_t c = 0; c < n; ++c) t1[c] = w[c] + hh * G[(i + 1) * n + c];
    J.apply(t1.data(), t2.data());
    P2.apply(&G[i * n], t1.data());
    for (std::size_t c = 0; c < n; ++c) {
      w[c] = t2[c] + hh * t1[c];
      out[i * n + c] -= w[c];
    }
  }
}

void PicardEngine::sweep_direct(const std::vector<double>& G, const Eigen::VectorXd& Pa,
                                std::vector<double>& out, double*) const {
  const std::size_t n = n_, N = N_;
  std::vector<Dense> KI(N + 1), KJ(N + 1);
  for (std::size_t j = 0; j <= N; ++j) {
    const Rational t = Rational(static_cast<long>(j)) * from_double(h_);
    KI[j] = Dense(mid(semigroup_->eval_component(Side::Stable, t)));
    KJ[j] = Dense(mid(semigroup_->eval_component(Side::Unstable, -t)));
  }
  out.assign((N + 1) * n, 0.0);
  std::vector<double> a(n), tmp(n);
  for (std::size_t c = 0; c < n; ++c) a[c] = Pa(static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i <= N; ++i) {
    double* o = &out[i * n];
    KI[i].apply(a.data(), tmp.data());
    for (std::size_t c = 0; c < n; ++c) o[c] = tmp[c];
    for (std::size_t l = 0; l <= i && i > 0; ++l) {
      const double wgt = (l == 0 || l == i) ? h_ / 2 : h_;
      KI[i - l].apply(&G[l * n], tmp.data());
      for (std::size_t c = 0; c < n; ++c) o[c] += wgt * tmp[c];
    }
    for (std::size_t l = i; l <= N && i < N; ++l) {
      const double wgt = (l == i || l == N) ? h_ / 2 : h_;
      KJ[l - i].apply(&G[l * n], tmp.data());
      for (std::size_t c = 0; c < n; ++c) o[c] -= wgt * tmp[c];
    }
  }
}

template <class Sweep>
PicardSolution PicardEngine::iterate(std::span<const double> a, Sweep&& sweep) const {
  const std::size_t n = n_, N = N_;
  if (a.size() != n) fail(ErrorCode::DimensionMismatch, "parameter dimension");
  Eigen::VectorXd av(static_cast<Eigen::Index>(n));
  for (std::size_t c = 0; c < n; ++c) av(static_cast<Eigen::Index>(c)) = a[c];
  const Eigen::VectorXd Pa = P1_ * av;
  const double a_norm = av.norm();
  const double pa_norm = Pa.norm();
  if (pa_norm > a_max_) fail(ErrorCode::InvalidArgument, "parameter outside the certified radius");
  // |P1 a| with the exact projection
  const double a_eff = add_up(pa_norm, mul_up(dP1_, a_norm)) * (1 + 1e-12);

  const double tol = options_.tol;
  const double slack = 10 * tol;
  PicardSolution sol;
  sol.a.assign(a.begin(), a.end());
  sol.h = h_;
  sol.steps = N;
  MonitorCounters mon;
  ++mon.picard_solves;

  std::vector<double> cur((N + 1) * n, 0.0), next, G((N + 1) * n, 0.0);
  double prev_gap = 0;
  bool violated = false;
  std::string what;
  for (int j = 1;; ++j) {
    if (j > 1) {
      const long rows = static_cast<long>(N + 1);
#pragma omp parallel for schedule(static) if (options_.parallel)
      for (long i = 0; i < rows; ++i) F_.eval(&cur[static_cast<std::size_t>(i) * n], &G[static_cast<std::size_t>(i) * n]);
    }
    sweep(G, Pa, next, nullptr);

    IterationRecord rec;
    rec.ine1_margin = -std::numeric_limits<double>::infinity();
    rec.ine2_margin = -std::numeric_limits<double>::infinity();
    const double ine1_scale = K_ * a_eff * std::ldexp(1.0, -(j - 1));
    for (std::size_t i = 0; i <= N; ++i) {
      const double d = [&] {
        double s = 0;
        for (std::size_t c = 0; c < n; ++c) {
          const double e = next[i * n + c] - cur[i * n + c];
          s += e * e;
        }
        return std::sqrt(s);
      }();
      const double u = norm2(&next[i * n], n);
      rec.gap = std::max(rec.gap, d);
      const double m1 = d - ine1_scale * envelope_[i];
      const double m2 = u - eta_ * envelope_[i];
      rec.ine1_margin = std::max(rec.ine1_margin, m1);
      rec.ine2_margin = std::max(rec.ine2_margin, m2);
    }
    mon.ine1_checks += N + 1;
    mon.ine2_checks += N + 1;
    if (rec.ine1_margin > slack) {
      ++mon.ine1_violations;
      violated = true;
      what = "ine-1 exceeded by " + std::to_string(rec.ine1_margin) + " at iteration " + std::to_string(j);
    }
    if (rec.ine2_margin > slack) {
      ++mon.ine2_violations;
      violated = true;
      what = "ine-2 exceeded by " + std::to_string(rec.ine2_margin) + " at iteration " + std::to_string(j);
    }
    if (j >= 2 && prev_gap > slack) {
      ++mon.ratio_checks;
      const double ratio = rec.gap / prev_gap;
      mon.max_ratio = std::max(mon.max_ratio, ratio);
      if (rec.gap > 0.5 * prev_gap + slack) {
        ++mon.ratio_violations;
        violated = true;
        what = "successive gap ratio " + std::to_string(ratio) + " above 1/2";
      }
    }
    sol.history.push_back(rec);
    cur.swap(next);
    prev_gap = rec.gap;
    sol.iterations = j;
    sol.uniformError = (q_ * rec.gap + e_op_) / (1 - q_) * (1 + 1e-12);
    if (violated && options_.check_monitors) break;
    if (sol.uniformError <= tol || ine1_scale <= tol) break;
    if (j >= 200) {
      violated = true;
      what = "Picard iteration did not settle within 200 iterations";
      break;
    }
  }
  Diagnostics::instance().merge(mon);
  if (violated && options_.check_monitors) fail(ErrorCode::MonitorViolation, what);

  sol.values = std::move(cur);
  for (std::size_t i = 0; i <= N; ++i) sol.sup_norm = std::max(sol.sup_norm, norm2(&sol.values[i * n], n));
  sol.monitors = mon;
  sol.interpolationError = interp_;
  // phi = u(0) - P1 a
  sol.phi.resize(n);
  for (std::size_t c = 0; c < n; ++c) sol.phi[c] = sol.values[c] - Pa(static_cast<Eigen::Index>(c));
  sol.phiError = (sol.uniformError + dP1_ * a_norm) * (1 + 1e-12) + 4 * kUnit * (pa_norm + norm2(sol.phi));
  return sol;
}

PicardSolution PicardEngine::solve(std::span<const double> a) const {
  return iterate(a, [this](const auto& G, const auto& Pa, auto& out, double* e) { sweep_recursive(G, Pa, out, e); });
}

PicardSolution PicardEngine::solve_reference(std::span<const double> a) const {
  return iterate(a, [this](const auto& G, const auto& Pa, auto& out, double* e) { sweep_direct(G, Pa, out, e); });
}

std::vector<double> PicardEngine::phi(std::span<const double> b, double* error) const {
  PicardSolution s = solve(b);
  if (error) *error = s.phiError;
  return s.phi;
}

namespace {

struct NodeResult {
  ChartSample sample;
  std::vector<double> trajectory;  // subsampled u(t, b)
  std::vector<long> index;
  MonitorCounters monitors;
};

void add_counters(MonitorCounters& a, const MonitorCounters& b) {
  a.decay_checks += b.decay_checks;
  a.decay_violations += b.decay_violations;
  a.ine1_checks += b.ine1_checks;
  a.ine1_violations += b.ine1_violations;
  a.ine2_checks += b.ine2_checks;
  a.ine2_violations += b.ine2_violations;
  a.ine3_checks += b.ine3_checks;
  a.ine3_violations += b.ine3_violations;
  a.ratio_checks += b.ratio_checks;
  a.ratio_violations += b.ratio_violations;
  a.max_ratio = std::max(a.max_ratio, b.max_ratio);
  a.picard_solves += b.picard_solves;
}

}  // namespace

ManifoldChart local_manifold(const PolyVectorField& f, std::span<const Rational> x0, Side kind,
                             int gridResolution, double tol, const LocalOptions& options) {
  if (gridResolution < 1) fail(ErrorCode::InvalidArgument, "grid resolution must be positive");
  const PolyVectorField oriented = kind == Side::Stable ? f : f.negated();
  const PolyVectorField g = shift_to_origin(oriented, x0);
  const NonlinearRemainder rem = split_linear(g);
  auto split = std::make_shared<const SpectralSplit>(split_matrix(rem.A, options.quadrature));
  auto ev = std::make_shared<const SemigroupEvaluator>(split, options.quadrature.tolerance);

  ManifoldChart chart;
  chart.kind = kind;
  chart.n = f.dim();
  chart.k = static_cast<std::size_t>(split->gap.k);
  chart.x0.assign(x0.begin(), x0.end());
  chart.basis = split->stable_basis;
  chart.certificate = radius_certificate(*split, rem);
  chart.r = chart.certificate.r;
  chart.gap = split->gap;
  chart.K1 = split->K1;
  chart.K = split->K;
  chart.lipschitz = 3 * Rational(split->K);
  chart.tangency = 3 * Rational(split->K) * Rational(split->K) * pow2(-chart.certificate.m0) / split->gap.sigma;
  chart.graphLipschitz = 1 + chart.tangency;
  chart.tol = tol;
  chart.gridResolution = gridResolution;
  chart.field = f;

  const std::size_t n = chart.n, k = chart.k;
  std::vector<double> x0d(n);
  for (std::size_t i = 0; i < n; ++i) x0d[i] = x0[i].get_d();

  if (k == 0) {
    ChartSample s;
    s.local.assign(n, 0.0);
    s.phi.assign(n, 0.0);
    s.point = x0d;
    chart.samples.push_back(std::move(s));
    return chart;
  }

  PicardOptions popt = options.picard;
  popt.tol = tol;
  const double a_max = to_double_down(chart.r / 2) * (1 + 0x1p-10);
  auto engine = std::make_shared<const PicardEngine>(ev, rem, chart.certificate, a_max, popt);
  chart.engine = engine;

  // lattice nodes c = (r/2) (2 i / (G - 1) - 1) inside the closed r/2 ball
  const int G = gridResolution;
  std::vector<std::vector<long>> nodes;
  {
    std::vector<long> idx(k, 0);
    for (;;) {
      Rational s2 = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const Rational u = G == 1 ? Rational(0) : Rational(2 * idx[j], G - 1) - 1;
        s2 += u * u;
      }
      if (s2 <= 1) nodes.push_back(idx);
      std::size_t j = 0;
      while (j < k && ++idx[j] == G) idx[j++] = 0;
      if (j == k) break;
    }
  }

  const Eigen::MatrixXd& P1 = engine->P1();
  const Eigen::MatrixXd& P2 = engine->P2();
  const double dP1 = radius_hs(split->P1), dP2 = radius_hs(split->P2);
  const double tangency = to_double_up(chart.tangency);
  const double half_r = Rational(chart.r / 2).get_d();
  const std::size_t stride = std::max<std::size_t>(1, engine->steps() / 256);

  std::vector<NodeResult> results(nodes.size());
  const long count = static_cast<long>(nodes.size());
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (long ni = 0; ni < count; ++ni) {
    NodeResult& res = results[static_cast<std::size_t>(ni)];
    res.index = nodes[static_cast<std::size_t>(ni)];
    ChartSample& s = res.sample;
    s.coords.resize(k);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < k; ++j) {
      const double c = G == 1 ? 0.0 : half_r * (2.0 * static_cast<double>(res.index[j]) / (G - 1) - 1.0);
      s.coords[j] = c;
      for (std::size_t i = 0; i < n; ++i) b(static_cast<Eigen::Index>(i)) += c * chart.basis[j][i].mid();
    }
    std::vector<double> bv(b.data(), b.data() + n);
    const PicardSolution sol = engine->solve(bv);
    add_counters(res.monitors, sol.monitors);
    for (std::size_t i = 0; i <= sol.steps; i += stride) {
      const auto u = sol.at(i);
      res.trajectory.insert(res.trajectory.end(), u.begin(), u.end());
    }
    s.phi = sol.phi;
    s.sup_norm = sol.sup_norm;
    s.local.resize(n);
    s.point.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.local[i] = bv[i] + s.phi[i];
      s.point[i] = x0d[i] + s.local[i];
    }
    // |P2 p - phi(P1 p)| <= |P2 b| + |P1 phi~| (1 + Lip phi) + phi error
    Eigen::VectorXd ph = Eigen::Map<const Eigen::VectorXd>(s.phi.data(), static_cast<Eigen::Index>(n));
    const double p2b = (P2 * b).norm() + dP2 * b.norm();
    const double p1phi = (P1 * ph).norm() + dP1 * ph.norm();
    s.error = (sol.phiError + p2b + p1phi * (1 + tangency)) * (1 + 1e-9) + 4 * kUnit * (b.norm() + ph.norm());

    // the initial-value identity u(0, a) = a for a = b + phi(b)
    const PicardSolution again = engine->solve(s.local);
    add_counters(res.monitors, again.monitors);
    const auto u0 = again.at(0);
    double r2 = 0;
    for (std::size_t i = 0; i < n; ++i) r2 += (u0[i] - s.local[i]) * (u0[i] - s.local[i]);
    s.initial_residual = std::sqrt(r2);
  }

  for (const NodeResult& res : results) {
    if (res.sample.initial_residual > tol) {
      fail(ErrorCode::MonitorViolation,
           "u(0, a) differs from a by " + std::to_string(res.sample.initial_residual));
    }
  }

  // ine-3 on grid-adjacent parameters
  MonitorCounters ine3;
  const double slack = 10 * tol;
  const double lip = to_double_up(chart.lipschitz);
  std::map<std::vector<long>, std::size_t> where;
  for (std::size_t i = 0; i < results.size(); ++i) where[results[i].index] = i;
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<long> nb = results[i].index;
      ++nb[j];
      auto it = where.find(nb);
      if (it == where.end()) continue;
      const NodeResult& A = results[i];
      const NodeResult& B = results[it->second];
      double da = 0;
      for (std::size_t c = 0; c < k; ++c) da += std::pow(A.sample.coords[c] - B.sample.coords[c], 2);
      const double bound = lip * std::sqrt(da) + slack;
      for (std::size_t p = 0; p < A.trajectory.size(); p += n) {
        ++ine3.ine3_checks;
        double d2 = 0;
        for (std::size_t c = 0; c < n; ++c) d2 += std::pow(A.trajectory[p + c] - B.trajectory[p + c], 2);
        if (std::sqrt(d2) > bound) ++ine3.ine3_violations;
      }
    }
  }
  Diagnostics::instance().merge(ine3);
  if (ine3.ine3_violations > 0 && options.picard.check_monitors) {
    fail(ErrorCode::MonitorViolation, "ine-3 violated on " + std::to_string(ine3.ine3_violations) + " samples");
  }

  chart.monitors = ine3;
  for (NodeResult& res : results) {
    add_counters(chart.monitors, res.monitors);
    chart.samples.push_back(std::move(res.sample));
  }
  return chart;
}

double graph_distance(const ManifoldChart& chart, std::span<const double> local) {
  const std::size_t n = chart.n;
  if (local.size() != n) fail(ErrorCode::DimensionMismatch, "point dimension");
  if (chart.k == 0) return norm2(local);
  if (!chart.engine) fail(ErrorCode::InvalidArgument, "chart has no engine");
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(local.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd b = chart.engine->P1() * y;
  std::vector<double> bv(b.data(), b.data() + n);
  const std::vector<double> ph = chart.engine->phi(bv);
  const Eigen::VectorXd p2 = chart.engine->P2() * y;
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += (p2(static_cast<Eigen::Index>(i)) - ph[i]) * (p2(static_cast<Eigen::Index>(i)) - ph[i]);
  return std::sqrt(s);
}

DivergenceWitness divergence_check(const ManifoldChart& chart, std::span<const double> x, double maxTime,
                                   double tol) {
  const std::size_t n = chart.n;
  if (x.size() != n) fail(ErrorCode::DimensionMismatch, "point dimension");
  std::vector<double> x0d(n), local(n);
  for (std::size_t i = 0; i < n; ++i) {
    x0d[i] = chart.x0[i].get_d();
    local[i] = x[i] - x0d[i];
  }
  DivergenceWitness w;
  try {
    w.distance_to_chart = graph_distance(chart, local);
  } catch (const Error&) {
    w.distance_to_chart = std::numeric_limits<double>::infinity();
  }
  const CompiledField f(chart.kind == Side::Stable ? chart.field : chart.field.negated());
  const double eta = chart.certificate.eta.get_d();
  const auto dist = [&](std::span<const double> y) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += (y[i] - x0d[i]) * (y[i] - x0d[i]);
    return std::sqrt(s);
  };
  if (dist(x) > eta) {
    w.exited = true;
    return w;
  }
  FlowOptions opt;
  opt.box = 1e6;
  const IntegrationResult res = integrate(f, x, maxTime, tol, opt, [&](const StepView& s) {
    if (dist(s.x1) <= eta) return false;
    double lo = s.t0, hi = s.t1;
    for (int it = 0; it < 60; ++it) {
      const double m = (lo + hi) / 2;
      if (dist(hermite(s, m)) > eta) hi = m; else lo = m;
    }
    w.exit_time = hi;
    return true;
  });
  w.exited = res.stopped;
  return w;
}

}  // namespace hypman
