// Parallel kernels against their serial references: wall time and agreement.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hypman/global.hpp"
#include "hypman/manifold.hpp"
#include "hypman/semigroup.hpp"
#include "hypman/spectral.hpp"
#include "hypman/systems.hpp"

using namespace hypman;

namespace {

double seconds(const std::function<void()>& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double par, double ser, double diff) {
  std::printf("%-28s %12.4f %12.4f %9.2fx %12.3g\n", name, par, ser, ser / par, diff);
}

double max_diff(const BallMatrix& a, const BallMatrix& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    d = std::max(d, std::abs(a.data()[i].mid() - b.data()[i].mid()));
    d = std::max(d, std::abs(a.data()[i].rad() - b.data()[i].rad()));
  }
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 3, threads = 0, grid = 33;
  CLI::App app{"parallel vs serial kernels"};
  app.add_option("--reps", reps)->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the default)");
  app.add_option("--grid", grid)->check(CLI::Range(2, 1025));
  CLI11_PARSE(app, argc, argv);
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
  std::printf("threads: %d\n", omp_get_max_threads());
#endif
  std::printf("%-28s %12s %12s %10s %12s\n", "kernel", "parallel s", "serial s", "speedup", "max |diff|");

  {
    RationalMatrix A(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) A(i, j) = i == j ? Rational(i % 2 ? 1 : -1) * (i + 1) : ratio(1, 7 + i + 3 * j);
    const SpectralSplit s = split_matrix(A);
    const ContourRule& rule = *s.stable_rule;
    std::vector<Rational> ts;
    for (int k = 0; k <= 40; ++k) ts.push_back(ratio(k, 10));
    std::vector<BallMatrix> p(ts.size()), q(ts.size());
    const double tp = seconds([&] { for (std::size_t i = 0; i < ts.size(); ++i) p[i] = rule.component(ts[i]); }, reps);
    const double tq = seconds([&] { for (std::size_t i = 0; i < ts.size(); ++i) q[i] = rule.component_serial(ts[i]); }, reps);
    double d = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) d = std::max(d, max_diff(p[i], q[i]));
    row("contour quadrature (5x5)", tp, tq, d);
  }

  {
    const std::vector<Point> trace = counterexample_branch(ratio(-1, 10)).polyline;
    const std::vector<Point> aset = counterexample_a_set();
    double hp = 0, hs = 0;
    const double tp = seconds([&] { hp = hausdorff(trace, aset); }, reps);
    const double tq = seconds([&] { hs = hausdorff_serial(trace, aset); }, reps);
    row("hausdorff (point sets)", tp, tq, std::abs(hp - hs));
  }

  const std::vector<Rational> origin{Rational(0), Rational(0)};
  const NonlinearRemainder rem = split_linear(shift_to_origin(systems::saddle(), origin));
  auto split = std::make_shared<const SpectralSplit>(split_matrix(rem.A));
  auto ev = std::make_shared<const SemigroupEvaluator>(split);
  const RadiusCertificate cert = radius_certificate(*split, rem);

  {
    PicardOptions po, ps;
    ps.parallel = false;
    const double amax = cert.r.get_d() * 0.99;
    const PicardEngine ep(ev, rem, cert, amax, po), es(ev, rem, cert, amax, ps);
    const std::vector<double> a{cert.r.get_d() / 2, 0};
    PicardSolution sp, ss;
    const double tp = seconds([&] { sp = ep.solve(a); }, reps);
    const double tq = seconds([&] { ss = es.solve(a); }, reps);
    double d = 0;
    for (std::size_t i = 0; i < sp.values.size(); ++i) d = std::max(d, std::abs(sp.values[i] - ss.values[i]));
    row("picard solve (saddle)", tp, tq, d);
  }

  {
    PicardOptions opt;
    opt.tol = 1e-6;
    opt.horizon = 8.0;
    opt.step_exponent = 4;
    const PicardEngine eng(ev, rem, cert, cert.r.get_d() / 1000, opt);
    const std::vector<double> a{cert.r.get_d() / 1200, 0};
    PicardSolution sp, ss;
    const double tp = seconds([&] { sp = eng.solve(a); }, reps);
    const double tq = seconds([&] { ss = eng.solve_reference(a); }, reps);
    double d = 0;
    for (std::size_t i = 0; i < sp.values.size(); ++i) d = std::max(d, std::abs(sp.values[i] - ss.values[i]));
    row("picard recursion vs direct", tp, tq, d);
  }

  {
    LocalOptions lp, ls;
    ls.parallel = false;
    ls.picard.parallel = false;
    ManifoldChart cp, cs;
    const double tp = seconds([&] { cp = local_manifold(systems::saddle(), origin, Side::Stable, grid, 1e-9, lp); }, 1);
    const double tq = seconds([&] { cs = local_manifold(systems::saddle(), origin, Side::Stable, grid, 1e-9, ls); }, 1);
    double d = 0;
    for (std::size_t i = 0; i < cp.samples.size(); ++i)
      for (std::size_t k = 0; k < cp.n; ++k) d = std::max(d, std::abs(cp.samples[i].point[k] - cs.samples[i].point[k]));
    row("local chart (saddle)", tp, tq, d);
  }

  return 0;
}
