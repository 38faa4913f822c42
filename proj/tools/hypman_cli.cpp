#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hypman/diagnostics.hpp"
#include "hypman/error.hpp"
#include "hypman/global.hpp"
#include "hypman/horseshoe.hpp"
#include "hypman/io.hpp"
#include "hypman/manifold.hpp"
#include "hypman/semigroup.hpp"
#include "hypman/spectral.hpp"
#include "hypman/systems.hpp"

using namespace hypman;
using io::json;

namespace {

struct Config {
  std::string system;
  std::vector<std::string> equilibrium;
  std::string mode = "stable";
  std::string quadrature = "rigorous";
  int grid = 9;
  double tol = 1e-9;
  int maxJ = 10;
  int level = 3;
  std::string lambda = "1/4";
  std::string mu = "0";
  std::vector<double> window{-1.1, 1, -0.1, 2};
  double pitch = 1e-3;
  std::vector<double> x;
  double tau = 1;
  double box = 10;
  bool check = false;
  std::string out, csv, svg;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    io::write_text(path, text);
}

QuadratureOptions quadrature(const Config& c) {
  QuadratureOptions q;
  q.mode = c.quadrature == "fast" ? QuadratureMode::Fast : QuadratureMode::Rigorous;
  return q;
}

struct Loaded {
  PolyVectorField field;
  RationalVector x0;
};

Loaded load(const Config& c) {
  io::SystemFile s = io::load_system(c.system);
  RationalVector x0(s.field.dim(), Rational(0));
  if (!c.equilibrium.empty()) {
    if (c.equilibrium.size() != s.field.dim())
      fail(ErrorCode::DimensionMismatch, "--equilibrium length differs from dim");
    x0.clear();
    for (const std::string& e : c.equilibrium) x0.push_back(parse_rational(e));
  } else if (s.equilibrium) {
    x0 = *s.equilibrium;
  }
  return {std::move(s.field), std::move(x0)};
}

/// Constants at an equilibrium: split of the Jacobian plus the radius certificate.
json equilibrium_constants(const PolyVectorField& f, const RationalVector& x0, const QuadratureOptions& q) {
  const NonlinearRemainder rem = split_linear(shift_to_origin(f, x0));
  const SpectralSplit split = split_matrix(rem.A, q);
  return io::constants_json(split.gap, split.K1, split.K, radius_certificate(split, rem));
}

int run_split(const Config& c) {
  const Loaded s = load(c);
  const NonlinearRemainder rem = split_linear(shift_to_origin(s.field, s.x0));
  auto split = std::make_shared<const SpectralSplit>(split_matrix(rem.A, quadrature(c)));
  json doc = io::split_json(*split);
  doc["constants"] = io::constants_json(split->gap, split->K1, split->K, radius_certificate(*split, rem));
  if (c.check) {
    const SemigroupEvaluator ev(split, 1e-8);
    json checks = json::array();
    for (const char* ts : {"0", "1/10", "1/2", "1"}) {
      const Rational t = parse_rational(ts);
      const AnnihilationResiduals a = annihilation_check(ev, t);
      checks.push_back(json{{"t", ts},
                            {"splitting", splitting_check(ev, t, matrix_exponential(split->A, t)).get_d()},
                            {"stableTimesP2", a.stable_times_P2.get_d()},
                            {"unstableTimesP1", a.unstable_times_P1.get_d()},
                            {"unstableProjection", a.unstable_projection.get_d()}});
    }
    doc["checks"] = checks;
  }
  emit(c.out, io::dump(doc));
  return 0;
}

ManifoldChart chart_for(const Config& c, const Loaded& s) {
  if (c.mode != "stable" && c.mode != "unstable") fail(ErrorCode::InvalidArgument, "--mode is stable or unstable");
  LocalOptions opt;
  opt.quadrature = quadrature(c);
  opt.picard.tol = c.tol;
  return local_manifold(s.field, s.x0, c.mode == "stable" ? Side::Stable : Side::Unstable, c.grid, c.tol, opt);
}

int run_local(const Config& c) {
  const Loaded s = load(c);
  const ManifoldChart chart = chart_for(c, s);
  emit(c.out, io::dump(io::chart_json(chart)));
  if (!c.csv.empty()) {
    std::ostringstream o;
    io::write_chart_csv(o, chart);
    io::write_text(c.csv, o.str());
  }
  if (!c.svg.empty() && chart.n == 2) {
    std::vector<Point> pts;
    for (const ChartSample& p : chart.samples) pts.push_back(p.point);
    io::write_text(c.svg, io::svg_points({pts}, "local chart"));
  }
  return 0;
}

int run_global(const Config& c) {
  const Loaded s = load(c);
  const ManifoldChart chart = chart_for(c, s);
  FlowOptions fo;
  fo.box = c.box;
  GlobalStream stream = enumerate_global(chart, s.field, c.maxJ, c.tol, fo);
  std::ostringstream csv;
  std::vector<std::vector<Point>> groups;
  json layers = json::array();
  PointCloudLayer layer;
  bool header = true;
  while (stream.next(layer)) {
    io::write_layer_csv(csv, layer, chart.n, header);
    header = false;
    layers.push_back(json{{"j", layer.j},
                          {"points", layer.points.size()},
                          {"integratorTolerance", layer.integratorTolerance},
                          {"log", layer.log}});
    if (chart.n == 2) groups.push_back(layer.points);
  }
  emit(c.csv.empty() ? c.out : c.csv, csv.str());
  if (!c.csv.empty() && !c.out.empty()) {
    json doc{{"schema", "hypman/layers"}, {"version", io::kSchemaVersion}};
    doc["kind"] = c.mode;
    doc["constants"] = io::constants_json(chart.gap, chart.K1, chart.K, chart.certificate);
    doc["chartError"] = chart.samples.empty() ? 0.0 : [&] {
      double e = 0;
      for (const ChartSample& p : chart.samples) e = std::max(e, p.error);
      return e;
    }();
    doc["layers"] = layers;
    io::write_text(c.out, io::dump(doc));
  }
  if (!c.svg.empty() && chart.n == 2) io::write_text(c.svg, io::svg_points(groups, "global layers"));
  return 0;
}

int run_horseshoe(const Config& c) {
  const LinearHorseshoeMap map = LinearHorseshoeMap{}.with_lambda(parse_rational(c.lambda));
  const RectangleCover cover = level_cover(map, c.level);
  json doc = io::cover_json(cover);
  const HausdorffCertificate h = hausdorff_certificate(map, c.level, c.level + 2);
  doc["certificate"] = json{{"pair", json::array({c.level, c.level + 2})},
                            {"squared", io::rational_json(h.squared)},
                            {"upper", io::rational_json(h.upper)},
                            {"bound", io::rational_json(h.bound)},
                            {"holds", h.holds}};
  doc["lambda"] = io::rational_json(map.lambda);
  if (c.level >= 1 && c.level <= 4) {
    const InvarianceReport inv = invariance_check(map, c.level);
    doc["invariance"] = json{{"forward", inv.forward}, {"backward", inv.backward}, {"checked", inv.checked}};
  }
  emit(c.out, io::dump(doc));
  if (!c.svg.empty()) io::write_text(c.svg, io::svg_cover(cover));
  return 0;
}

int run_counterexample(const Config& c) {
  if (c.window.size() != 4 || !(c.window[0] < c.window[1]) || !(c.window[2] < c.window[3]))
    fail(ErrorCode::InvalidArgument, "--window needs xmin xmax ymin ymax with positive extent");
  const Rational mu = parse_rational(c.mu);
  const Window w{c.window[0], c.window[1], c.window[2], c.window[3]};
  const BranchTrace trace = counterexample_branch(mu, w, 1e-10, c.pitch);
  const std::vector<Point> aset = counterexample_a_set(c.window[3], c.pitch);
  json doc = io::trace_json(trace, hausdorff(trace.polyline, aset));
  const RationalVector z2{Rational(1), Rational(0)};
  doc["constants"] = equilibrium_constants(systems::counterexample(mu), z2, quadrature(c));
  emit(c.out, io::dump(doc));
  if (!c.csv.empty()) {
    std::ostringstream o;
    io::write_polyline_csv(o, trace.polyline);
    io::write_text(c.csv, o.str());
  }
  if (!c.svg.empty()) io::write_text(c.svg, io::svg_points({trace.polyline, aset}, "counterexample branch"));
  return 0;
}

int run_flow(const Config& c) {
  const Loaded s = load(c);
  if (c.x.size() != s.field.dim()) fail(ErrorCode::DimensionMismatch, "--x length differs from dim");
  FlowOptions fo;
  fo.box = c.box;
  const IntegrationResult r = integrate(CompiledField(s.field), c.x, c.tau, c.tol, fo);
  json doc{{"schema", "hypman/flow"}, {"version", io::kSchemaVersion}};
  doc["x0"] = c.x;
  doc["tau"] = c.tau;
  doc["tol"] = c.tol;
  doc["x"] = r.x;
  doc["steps"] = r.steps;
  doc["rejected"] = r.rejected;
  try {
    doc["constants"] = equilibrium_constants(s.field, s.x0, quadrature(c));
  } catch (const Error&) {
    doc["constants"] = nullptr;  // the stated point is not a hyperbolic equilibrium
  }
  emit(c.out, io::dump(doc));
  return 0;
}

void set_threads() {
#ifdef _OPENMP
  for (const char* var : {"HYPMAN_THREADS", "OMP_NUM_THREADS"}) {
    if (const char* v = std::getenv(var)) {
      const int n = std::atoi(v);
      if (n > 0) omp_set_num_threads(n);
      return;
    }
  }
#endif
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Hyperbolic invariant manifolds of polynomial vector fields"};
  app.require_subcommand(1);
  auto positive = CLI::PositiveNumber;

  auto add_common = [&](CLI::App* s, bool system) {
    if (system) {
      s->add_option("--system", c.system, "system file")->required()->check(CLI::ExistingFile);
      s->add_option("--equilibrium", c.equilibrium, "equilibrium as p/q entries");
    }
    s->add_option("--quadrature", c.quadrature, "fast or rigorous")->check(CLI::IsMember({"fast", "rigorous"}));
    s->add_option("--out", c.out, "structured document (default stdout)");
  };

  auto* split = app.add_subcommand("split", "spectral splitting at the equilibrium");
  add_common(split, true);
  split->add_flag("--check", c.check, "splitting and annihilation residuals");

  auto* local = app.add_subcommand("local", "local stable or unstable manifold chart");
  add_common(local, true);
  local->add_option("--mode", c.mode)->check(CLI::IsMember({"stable", "unstable"}));
  local->add_option("--grid", c.grid)->check(CLI::Range(2, 1 << 12));
  local->add_option("--tol", c.tol)->check(positive);
  local->add_option("--csv", c.csv);
  local->add_option("--svg", c.svg);

  auto* global = app.add_subcommand("global", "layers of the global manifold as CSV");
  add_common(global, true);
  global->add_option("--mode", c.mode)->check(CLI::IsMember({"stable", "unstable"}));
  global->add_option("--grid", c.grid)->check(CLI::Range(2, 1 << 12));
  global->add_option("--tol", c.tol)->check(positive);
  global->add_option("--max-j", c.maxJ)->check(CLI::NonNegativeNumber);
  global->add_option("--box", c.box)->check(positive);
  global->add_option("--csv", c.csv, "layer CSV (default --out or stdout)");
  global->add_option("--svg", c.svg);

  auto* horse = app.add_subcommand("horseshoe", "level-n rectangle cover of the horseshoe");
  add_common(horse, false);
  horse->add_option("--level", c.level)->check(CLI::NonNegativeNumber);
  horse->add_option("--lambda", c.lambda, "contraction rate p/q in (0, 1/2)");
  horse->add_option("--svg", c.svg);

  auto* counter = app.add_subcommand("counterexample", "branch trace for the discontinuity family");
  add_common(counter, false);
  counter->add_option("--mu", c.mu, "parameter as p/q");
  counter->add_option("--window", c.window, "xmin xmax ymin ymax")->expected(4);
  counter->add_option("--pitch", c.pitch)->check(positive);
  counter->add_option("--csv", c.csv);
  counter->add_option("--svg", c.svg);

  auto* flow = app.add_subcommand("flow", "integrate the field from a point");
  add_common(flow, true);
  flow->add_option("--x", c.x, "initial point")->required();
  flow->add_option("--tau", c.tau);
  flow->add_option("--tol", c.tol)->check(positive);
  flow->add_option("--box", c.box)->check(positive);

  CLI11_PARSE(app, argc, argv);
  set_threads();
  try {
    if (*split) return run_split(c);
    if (*local) return run_local(c);
    if (*global) return run_global(c);
    if (*horse) return run_horseshoe(c);
    if (*counter) return run_counterexample(c);
    return run_flow(c);
  } catch (const std::exception& e) {
    const std::string doc = io::dump(io::error_json(e));
    std::cout << doc;
    std::cerr << e.what() << '\n';
    return 2;
  }
}
