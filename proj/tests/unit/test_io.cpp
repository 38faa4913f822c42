#include <doctest.h>

#include <sstream>

#include "hypman/error.hpp"
#include "hypman/io.hpp"
#include "hypman/systems.hpp"

using namespace hypman;
using io::json;

namespace {

const std::vector<Rational> kOrigin{Rational(0), Rational(0)};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("rationals and balls") {
  CHECK(io::rational_json(ratio(-3, 6)) == "-1/2");
  CHECK(io::rational_from("7/21") == ratio(1, 3));
  CHECK(io::rational_from("5") == Rational(5));
  CHECK(code_of([] { io::rational_from(0.5); }) == ErrorCode::SchemaError);
  const Ball b(0.1, 3e-17);
  const Ball c = io::ball_from(io::ball_json(b));
  CHECK(c.mid() == b.mid());
  CHECK(c.rad() == b.rad());
  CHECK(code_of([] { io::ball_from(json{{"mid", 1.0}, {"rad", -1.0}}); }) == ErrorCode::SchemaError);
}

TEST_CASE("system files") {
  const io::SystemFile s = io::load_system(std::string(HYPMAN_TEST_DATA) + "/saddle.json");
  CHECK(s.field == systems::saddle());
  REQUIRE(s.equilibrium);
  CHECK(*s.equilibrium == kOrigin);
  CHECK(io::dump(io::system_json(io::parse_system(io::system_json(s)))) == io::dump(io::system_json(s)));

  const io::SystemFile ce = io::load_system(std::string(HYPMAN_TEST_DATA) + "/counterexample.json");
  CHECK(ce.field == systems::counterexample(ratio(-1, 10)));

  CHECK(code_of([] { io::load_system(std::string(HYPMAN_TEST_DATA) + "/bad_schema.json"); }) ==
        ErrorCode::SchemaError);
  CHECK(code_of([] { io::load_system("/nonexistent/system.json"); }) == ErrorCode::IOError);
  CHECK(code_of([] { io::parse_system(json::parse(R"({"dim": 2, "components": [[]]})")); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([] {
          io::parse_system(json::parse(R"({"dim": 1, "components": [[{"coeff": "1", "powers": [1, 0]}]]})"));
        }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] {
          io::parse_system(json::parse(R"({"dim": 1, "components": [[{"coeff": "1", "powers": [-1]}]]})"));
        }) == ErrorCode::SchemaError);
  CHECK(code_of([] { io::parse_system(json::parse(R"({"components": []})")); }) == ErrorCode::SchemaError);
}

TEST_CASE("split round trip") {
  RationalMatrix A(3, 3);
  A(0, 0) = -1;
  A(0, 1) = ratio(1, 2);
  A(1, 1) = 2;
  A(2, 2) = ratio(-3, 2);
  A(2, 0) = 1;
  const SpectralSplit s = split_matrix(A);
  const std::string a = io::dump(io::split_json(s));
  const SpectralSplit t = io::split_from_json(json::parse(a));
  CHECK(io::dump(io::split_json(t)) == a);
  CHECK(t.A == A);
  CHECK(t.K1 == s.K1);
  CHECK(t.gap.sigma == s.gap.sigma);

  json wrong = json::parse(a);
  wrong["version"] = 2;
  CHECK(code_of([&] { io::split_from_json(wrong); }) == ErrorCode::SchemaError);
}

TEST_CASE("chart round trip and CSV") {
  const ManifoldChart c = local_manifold(systems::saddle(), kOrigin, Side::Stable, 5, 1e-9);
  const std::string a = io::dump(io::chart_json(c));
  const ManifoldChart d = io::chart_from_json(json::parse(a));
  CHECK(io::dump(io::chart_json(d)) == a);
  CHECK(d.samples.size() == 5);
  CHECK(d.certificate.m0 == 9);
  CHECK(d.field == systems::saddle());

  const json j = json::parse(a);
  for (const char* key : {"sigma", "alpha", "M", "K1", "K", "m0", "r", "eta", "dRadius"})
    CHECK_MESSAGE(j["constants"].contains(key), key);

  std::ostringstream csv;
  io::write_chart_csv(csv, c);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "b1,x1,x2,err");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("layer and polyline CSV") {
  PointCloudLayer l;
  l.j = 3;
  l.points = {{0.5, -0.25}, {1, 2}};
  std::ostringstream o;
  io::write_layer_csv(o, l, 2, true);
  CHECK(o.str() == "j,x1,x2\n3,0.5,-0.25\n3,1,2\n");
  std::ostringstream p;
  io::write_polyline_csv(p, {{0.1, 0}});
  CHECK(p.str() == "x,y\n0.10000000000000001,0\n");
}

TEST_CASE("cover and trace round trip") {
  const RectangleCover c = level_cover(LinearHorseshoeMap{}, 2);
  const std::string a = io::dump(io::cover_json(c));
  CHECK(a.find("\"3/16\"") != std::string::npos);
  CHECK(io::dump(io::cover_json(io::cover_from_json(json::parse(a)))) == a);

  const BranchTrace t = counterexample_branch(Rational(0));
  const std::string b = io::dump(io::trace_json(t, 2.0));
  CHECK(io::dump(io::trace_json(io::trace_from_json(json::parse(b)), 2.0)) == b);
}

TEST_CASE("error documents and file output") {
  const json e = io::error_json(LeftBoundingBoxError(1.5));
  CHECK(e["code"] == "LeftBoundingBox");
  CHECK(e["tExit"] == 1.5);
  CHECK(e["schema"] == "hypman/error");
  CHECK(io::error_json(std::runtime_error("x"))["code"] == "InvalidArgument");
  CHECK(code_of([] { io::write_text("/nonexistent/dir/out.json", "{}"); }) == ErrorCode::IOError);
}
