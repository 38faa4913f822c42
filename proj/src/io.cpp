#include "hypman/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hypman/error.hpp"

namespace hypman::io {

namespace {

[[noreturn]] void schema(const std::string& what) { fail(ErrorCode::SchemaError, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

void check_schema(const json& j, const std::string& name) {
  if (field(j, "schema") != name) schema("expected schema " + name);
  if (field(j, "version") != kSchemaVersion) schema("unsupported schema version");
}

json header(const std::string& name) { return json{{"schema", name}, {"version", kSchemaVersion}}; }

json rationals_json(const RationalVector& v) {
  json a = json::array();
  for (const Rational& q : v) a.push_back(rational_json(q));
  return a;
}

RationalVector rationals_from(const json& j) {
  if (!j.is_array()) schema("expected an array of rationals");
  RationalVector v;
  for (const json& e : j) v.push_back(rational_from(e));
  return v;
}

json doubles_json(const std::vector<double>& v) { return json(v); }

std::vector<double> doubles_from(const json& j) {
  if (!j.is_array()) schema("expected an array of numbers");
  std::vector<double> v;
  for (const json& e : j) {
    if (!e.is_number()) schema("expected a number");
    v.push_back(e.get<double>());
  }
  return v;
}

json rational_matrix_json(const RationalMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) r.push_back(rational_json(m(i, k)));
    rows.push_back(r);
  }
  return rows;
}

RationalMatrix rational_matrix_from(const json& j) {
  if (!j.is_array() || j.empty()) schema("expected a matrix");
  RationalMatrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != m.cols()) schema("ragged matrix");
    for (std::size_t k = 0; k < m.cols(); ++k) m(i, k) = rational_from(j[i][k]);
  }
  return m;
}

json ball_matrix_json(const BallMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) r.push_back(ball_json(m(i, k)));
    rows.push_back(r);
  }
  return rows;
}

BallMatrix ball_matrix_from(const json& j) {
  if (!j.is_array() || j.empty()) schema("expected a matrix");
  BallMatrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != m.cols()) schema("ragged matrix");
    for (std::size_t k = 0; k < m.cols(); ++k) m(i, k) = ball_from(j[i][k]);
  }
  return m;
}

json basis_json(const std::vector<BallVector>& basis) {
  json a = json::array();
  for (const BallVector& v : basis) {
    json b = json::array();
    for (const Ball& x : v) b.push_back(ball_json(x));
    a.push_back(b);
  }
  return a;
}

std::vector<BallVector> basis_from(const json& j) {
  std::vector<BallVector> basis;
  for (const json& v : j) {
    BallVector b;
    for (const json& x : v) b.push_back(ball_from(x));
    basis.push_back(std::move(b));
  }
  return basis;
}

json gap_json(const HyperbolicGap& g) {
  return json{{"sigma", rational_json(g.sigma)}, {"alpha", rational_json(g.alpha)},
              {"alpha1", rational_json(g.alpha1)}, {"alpha2", rational_json(g.alpha2)},
              {"M", g.M}, {"k", g.k}, {"n", g.n}};
}

HyperbolicGap gap_from(const json& j) {
  HyperbolicGap g;
  g.sigma = rational_from(field(j, "sigma"));
  g.alpha = rational_from(field(j, "alpha"));
  g.alpha1 = rational_from(field(j, "alpha1"));
  g.alpha2 = rational_from(field(j, "alpha2"));
  g.M = field(j, "M").get<long>();
  g.k = field(j, "k").get<int>();
  g.n = field(j, "n").get<int>();
  return g;
}

json certificate_json(const RadiusCertificate& c) {
  return json{{"m0", c.m0},
              {"d", c.d},
              {"r", rational_json(c.r)},
              {"eta", rational_json(c.eta)},
              {"dRadius", rational_json(c.dRadius)},
              {"gamma", rational_json(c.gamma)},
              {"epsilonBase2", rational_json(c.epsilonBase2)},
              {"alpha1", rational_json(c.alpha1)},
              {"delta", rational_json(c.delta)}};
}

RadiusCertificate certificate_from(const json& j) {
  RadiusCertificate c;
  c.m0 = field(j, "m0").get<long>();
  c.d = field(j, "d").get<long>();
  c.r = rational_from(field(j, "r"));
  c.eta = rational_from(field(j, "eta"));
  c.dRadius = rational_from(field(j, "dRadius"));
  c.gamma = rational_from(field(j, "gamma"));
  c.epsilonBase2 = rational_from(field(j, "epsilonBase2"));
  c.alpha1 = rational_from(field(j, "alpha1"));
  c.delta = rational_from(field(j, "delta"));
  return c;
}

json monitors_json(const MonitorCounters& m) {
  return json{{"decayChecks", m.decay_checks},     {"decayViolations", m.decay_violations},
              {"ine1Checks", m.ine1_checks},       {"ine1Violations", m.ine1_violations},
              {"ine2Checks", m.ine2_checks},       {"ine2Violations", m.ine2_violations},
              {"ine3Checks", m.ine3_checks},       {"ine3Violations", m.ine3_violations},
              {"ratioChecks", m.ratio_checks},     {"ratioViolations", m.ratio_violations},
              {"maxRatio", m.max_ratio},           {"picardSolves", m.picard_solves}};
}

MonitorCounters monitors_from(const json& j) {
  MonitorCounters m;
  m.decay_checks = field(j, "decayChecks").get<std::uint64_t>();
  m.decay_violations = field(j, "decayViolations").get<std::uint64_t>();
  m.ine1_checks = field(j, "ine1Checks").get<std::uint64_t>();
  m.ine1_violations = field(j, "ine1Violations").get<std::uint64_t>();
  m.ine2_checks = field(j, "ine2Checks").get<std::uint64_t>();
  m.ine2_violations = field(j, "ine2Violations").get<std::uint64_t>();
  m.ine3_checks = field(j, "ine3Checks").get<std::uint64_t>();
  m.ine3_violations = field(j, "ine3Violations").get<std::uint64_t>();
  m.ratio_checks = field(j, "ratioChecks").get<std::uint64_t>();
  m.ratio_violations = field(j, "ratioViolations").get<std::uint64_t>();
  m.max_ratio = field(j, "maxRatio").get<double>();
  m.picard_solves = field(j, "picardSolves").get<std::uint64_t>();
  return m;
}

json contour_json(const Contour& c) {
  json v = json::array();
  for (const ComplexRational& z : c.vertices) v.push_back(json::array({rational_json(z.re), rational_json(z.im)}));
  return json{{"side", c.side == Side::Stable ? "stable" : "unstable"}, {"vertices", v}};
}

Contour contour_from(const json& j) {
  Contour c;
  c.side = field(j, "side") == "stable" ? Side::Stable : Side::Unstable;
  const json& v = field(j, "vertices");
  if (!v.is_array() || v.size() != 4) schema("contour needs 4 vertices");
  for (std::size_t i = 0; i < 4; ++i) c.vertices[i] = {rational_from(v[i][0]), rational_from(v[i][1])};
  return c;
}

json interval_json(const Interval& v) { return json::array({rational_json(v.lo), rational_json(v.hi)}); }
Interval interval_from(const json& j) { return {rational_from(j.at(0)), rational_from(j.at(1))}; }
json rect_json(const Rect& r) {
  return json::array({rational_json(r.x0), rational_json(r.x1), rational_json(r.y0), rational_json(r.y1)});
}
Rect rect_from(const json& j) {
  if (!j.is_array() || j.size() != 4) schema("rectangle needs 4 endpoints");
  return {rational_from(j[0]), rational_from(j[1]), rational_from(j[2]), rational_from(j[3])};
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

json rational_json(const Rational& q) { return to_string(q); }

Rational rational_from(const json& j) {
  if (!j.is_string()) schema("rationals are written as \"p/q\" strings");
  return parse_rational(j.get<std::string>());
}

json ball_json(const Ball& b) { return json{{"mid", b.mid()}, {"rad", b.rad()}}; }

Ball ball_from(const json& j) {
  const double m = field(j, "mid").get<double>(), r = field(j, "rad").get<double>();
  if (!(r >= 0)) schema("ball radius must be nonnegative");
  return Ball(m, r);
}

SystemFile parse_system(const json& j) {
  if (!j.is_object()) schema("system file must be an object");
  const json& dj = field(j, "dim");
  if (!dj.is_number_integer() || dj.get<long>() <= 0) schema("\"dim\" must be a positive integer");
  const std::size_t n = dj.get<std::size_t>();
  const json& cj = field(j, "components");
  if (!cj.is_array()) schema("\"components\" must be an array");
  if (cj.size() != n) fail(ErrorCode::DimensionMismatch, "component count differs from dim");
  std::vector<Polynomial> comps;
  for (const json& comp : cj) {
    if (!comp.is_array()) schema("each component is an array of monomials");
    Polynomial p;
    for (const json& m : comp) {
      Monomial mono;
      mono.coeff = rational_from(field(m, "coeff"));
      const json& pw = field(m, "powers");
      if (!pw.is_array()) schema("\"powers\" must be an array");
      for (const json& e : pw) {
        if (!e.is_number_integer() || e.get<long>() < 0) schema("powers are nonnegative integers");
        mono.powers.push_back(e.get<unsigned>());
      }
      if (mono.powers.size() != n) fail(ErrorCode::DimensionMismatch, "exponent vector length differs from dim");
      p.push_back(std::move(mono));
    }
    comps.push_back(std::move(p));
  }
  SystemFile s{PolyVectorField(n, std::move(comps)), std::nullopt};
  if (j.contains("equilibrium")) {
    s.equilibrium = rationals_from(j.at("equilibrium"));
    if (s.equilibrium->size() != n) fail(ErrorCode::DimensionMismatch, "equilibrium length differs from dim");
  }
  return s;
}

json system_json(const SystemFile& s) {
  json comps = json::array();
  for (const Polynomial& p : s.field.components()) {
    json c = json::array();
    for (const Monomial& m : p) c.push_back(json{{"coeff", rational_json(m.coeff)}, {"powers", m.powers}});
    comps.push_back(c);
  }
  json j{{"dim", s.field.dim()}, {"components", comps}};
  if (s.equilibrium) j["equilibrium"] = rationals_json(*s.equilibrium);
  return j;
}

SystemFile load_system(const std::string& path) { return parse_system(read_json(path)); }

json constants_json(const HyperbolicGap& gap, long K1, long K, const std::optional<RadiusCertificate>& cert) {
  json j = gap_json(gap);
  j["K1"] = K1;
  j["K"] = K;
  if (cert) j.update(certificate_json(*cert));
  return j;
}

json split_json(const SpectralSplit& s) {
  json j = header("hypman/split");
  j["A"] = rational_matrix_json(s.A);
  json ev = json::array();
  for (const EigenvalueCluster& c : s.eigenvalues.entries) {
    ev.push_back(json{{"re", ball_json(c.enclosure.re())},
                      {"im", ball_json(c.enclosure.im())},
                      {"multiplicity", c.multiplicity},
                      {"exact", c.exact}});
  }
  j["eigenvalues"] = ev;
  j["constants"] = constants_json(s.gap, s.K1, s.K, std::nullopt);
  json contours = json::object();
  if (s.contours.stable) contours["stable"] = contour_json(*s.contours.stable);
  if (s.contours.unstable) contours["unstable"] = contour_json(*s.contours.unstable);
  j["contours"] = contours;
  j["P1"] = ball_matrix_json(s.P1);
  j["P2"] = ball_matrix_json(s.P2);
  j["stableBasis"] = basis_json(s.stable_basis);
  j["unstableBasis"] = basis_json(s.unstable_basis);
  return j;
}

SpectralSplit split_from_json(const json& j) {
  check_schema(j, "hypman/split");
  SpectralSplit s;
  s.A = rational_matrix_from(field(j, "A"));
  for (const json& e : field(j, "eigenvalues")) {
    EigenvalueCluster c;
    c.enclosure = ComplexBall(ball_from(field(e, "re")), ball_from(field(e, "im")));
    c.multiplicity = field(e, "multiplicity").get<int>();
    c.exact = field(e, "exact").get<bool>();
    s.eigenvalues.entries.push_back(c);
  }
  const json& c = field(j, "constants");
  s.gap = gap_from(c);
  s.K1 = field(c, "K1").get<long>();
  s.K = field(c, "K").get<long>();
  const json& ct = field(j, "contours");
  if (ct.contains("stable")) s.contours.stable = contour_from(ct.at("stable"));
  if (ct.contains("unstable")) s.contours.unstable = contour_from(ct.at("unstable"));
  s.P1 = ball_matrix_from(field(j, "P1"));
  s.P2 = ball_matrix_from(field(j, "P2"));
  s.stable_basis = basis_from(field(j, "stableBasis"));
  s.unstable_basis = basis_from(field(j, "unstableBasis"));
  return s;
}

json chart_json(const ManifoldChart& c) {
  json j = header("hypman/chart");
  j["kind"] = c.kind == Side::Stable ? "stable" : "unstable";
  j["field"] = system_json({c.field, std::nullopt});
  j["x0"] = rationals_json(c.x0);
  j["n"] = c.n;
  j["k"] = c.k;
  j["constants"] = constants_json(c.gap, c.K1, c.K, c.certificate);
  j["lipschitz"] = rational_json(c.lipschitz);
  j["graphLipschitz"] = rational_json(c.graphLipschitz);
  j["tangency"] = rational_json(c.tangency);
  j["basis"] = basis_json(c.basis);
  j["tol"] = c.tol;
  j["grid"] = c.gridResolution;
  json samples = json::array();
  for (const ChartSample& s : c.samples) {
    samples.push_back(json{{"b", doubles_json(s.coords)},
                           {"local", doubles_json(s.local)},
                           {"point", doubles_json(s.point)},
                           {"phi", doubles_json(s.phi)},
                           {"error", s.error},
                           {"supNorm", s.sup_norm},
                           {"initialResidual", s.initial_residual}});
  }
  j["samples"] = samples;
  j["monitors"] = monitors_json(c.monitors);
  return j;
}

ManifoldChart chart_from_json(const json& j) {
  check_schema(j, "hypman/chart");
  ManifoldChart c;
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind != "stable" && kind != "unstable") schema("chart kind must be stable or unstable");
  c.kind = kind == "stable" ? Side::Stable : Side::Unstable;
  c.field = parse_system(field(j, "field")).field;
  c.x0 = rationals_from(field(j, "x0"));
  c.n = field(j, "n").get<std::size_t>();
  c.k = field(j, "k").get<std::size_t>();
  const json& k = field(j, "constants");
  c.gap = gap_from(k);
  c.K1 = field(k, "K1").get<long>();
  c.K = field(k, "K").get<long>();
  c.certificate = certificate_from(k);
  c.r = c.certificate.r;
  c.lipschitz = rational_from(field(j, "lipschitz"));
  c.graphLipschitz = rational_from(field(j, "graphLipschitz"));
  c.tangency = rational_from(field(j, "tangency"));
  c.basis = basis_from(field(j, "basis"));
  c.tol = field(j, "tol").get<double>();
  c.gridResolution = field(j, "grid").get<int>();
  for (const json& s : field(j, "samples")) {
    ChartSample p;
    p.coords = doubles_from(field(s, "b"));
    p.local = doubles_from(field(s, "local"));
    p.point = doubles_from(field(s, "point"));
    p.phi = doubles_from(field(s, "phi"));
    p.error = field(s, "error").get<double>();
    p.sup_norm = field(s, "supNorm").get<double>();
    p.initial_residual = field(s, "initialResidual").get<double>();
    c.samples.push_back(std::move(p));
  }
  c.monitors = monitors_from(field(j, "monitors"));
  return c;
}

json cover_json(const RectangleCover& c) {
  json j = header("hypman/horseshoe");
  j["level"] = c.level;
  json xs = json::array(), ys = json::array(), closed = json::array(), open = json::array();
  for (const Interval& v : c.xIntervals) xs.push_back(interval_json(v));
  for (const Interval& v : c.yIntervals) ys.push_back(interval_json(v));
  for (const Rect& r : c.closedRects) closed.push_back(rect_json(r));
  for (const Rect& r : c.openComplement) open.push_back(rect_json(r));
  j["xIntervals"] = xs;
  j["yIntervals"] = ys;
  j["closedRects"] = closed;
  j["openComplement"] = open;
  j["alphaOfN"] = c.alphaOfN;
  j["hausdorffBound"] = rational_json(c.hausdorffBound);
  return j;
}

RectangleCover cover_from_json(const json& j) {
  check_schema(j, "hypman/horseshoe");
  RectangleCover c;
  c.level = field(j, "level").get<int>();
  for (const json& v : field(j, "xIntervals")) c.xIntervals.push_back(interval_from(v));
  for (const json& v : field(j, "yIntervals")) c.yIntervals.push_back(interval_from(v));
  for (const json& r : field(j, "closedRects")) c.closedRects.push_back(rect_from(r));
  for (const json& r : field(j, "openComplement")) c.openComplement.push_back(rect_from(r));
  c.alphaOfN = field(j, "alphaOfN").get<std::size_t>();
  c.hausdorffBound = rational_from(field(j, "hausdorffBound"));
  return c;
}

json trace_json(const BranchTrace& t, double hausdorff_to_a) {
  json j = header("hypman/counterexample");
  j["mu"] = rational_json(t.mu);
  j["window"] = json::array({t.window.xmin, t.window.xmax, t.window.ymin, t.window.ymax});
  j["pitch"] = t.pitch;
  json poly = json::array();
  for (const Point& p : t.polyline) poly.push_back(doubles_json(p));
  j["polyline"] = poly;
  j["hausdorffToA"] = hausdorff_to_a;
  return j;
}

BranchTrace trace_from_json(const json& j) {
  check_schema(j, "hypman/counterexample");
  BranchTrace t;
  t.mu = rational_from(field(j, "mu"));
  const std::vector<double> w = doubles_from(field(j, "window"));
  if (w.size() != 4) schema("window needs 4 numbers");
  t.window = {w[0], w[1], w[2], w[3]};
  t.pitch = field(j, "pitch").get<double>();
  for (const json& p : field(j, "polyline")) t.polyline.push_back(doubles_from(p));
  return t;
}

json error_json(const std::exception& e) {
  json j = header("hypman/error");
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["code"] = std::string(to_string(err->code()));
    if (const auto* box = dynamic_cast<const LeftBoundingBoxError*>(&e)) j["tExit"] = box->t_exit();
  } else {
    j["code"] = "InvalidArgument";
  }
  j["message"] = e.what();
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IOError, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    schema(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IOError, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::IOError, "write failed: " + path);
}

void write_chart_csv(std::ostream& out, const ManifoldChart& c) {
  for (std::size_t i = 1; i <= c.k; ++i) out << 'b' << i << ',';
  for (std::size_t i = 1; i <= c.n; ++i) out << 'x' << i << ',';
  out << "err\n";
  for (const ChartSample& s : c.samples) {
    for (double b : s.coords) out << fmt(b) << ',';
    for (double x : s.point) out << fmt(x) << ',';
    out << fmt(s.error) << '\n';
  }
}

void write_layer_csv(std::ostream& out, const PointCloudLayer& layer, std::size_t n, bool header) {
  if (header) {
    out << 'j';
    for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
    out << '\n';
  }
  for (const Point& p : layer.points) {
    out << layer.j;
    for (double x : p) out << ',' << fmt(x);
    out << '\n';
  }
}

void write_polyline_csv(std::ostream& out, const std::vector<Point>& poly) {
  out << "x,y\n";
  for (const Point& p : poly) out << fmt(p[0]) << ',' << fmt(p[1]) << '\n';
}

std::string svg_points(const std::vector<std::vector<Point>>& groups, const std::string& title) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& g : groups)
    for (const Point& p : g) {
      x0 = std::min(x0, p[0]);
      x1 = std::max(x1, p[0]);
      y0 = std::min(y0, p[1]);
      y1 = std::max(y1, p[1]);
    }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  const double w = std::max(x1 - x0, 1e-300), h = std::max(y1 - y0, 1e-300);
  const double size = 600, pad = 20;
  const auto X = [&](double x) { return pad + (x - x0) / w * size; };
  const auto Y = [&](double y) { return pad + (y1 - y) / h * size; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * pad << "\" height=\"" << size + 2 * pad
    << "\">\n<title>" << title << "</title>\n";
  for (std::size_t g = 0; g < groups.size(); ++g) {
    s << "<g fill=\"" << colors[g % 6] << "\">\n";
    for (const Point& p : groups[g]) s << "<circle cx=\"" << X(p[0]) << "\" cy=\"" << Y(p[1]) << "\" r=\"1.2\"/>\n";
    s << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string svg_cover(const RectangleCover& c) {
  const double size = 600;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n"
    << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (const Rect& r : c.closedRects) {
    s << "<rect x=\"" << r.x0.get_d() * size << "\" y=\"" << (1 - r.y1.get_d()) * size << "\" width=\""
      << Rational(r.x1 - r.x0).get_d() * size << "\" height=\"" << Rational(r.y1 - r.y0).get_d() * size << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace hypman::io
