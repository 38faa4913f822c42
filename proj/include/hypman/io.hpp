#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "hypman/global.hpp"
#include "hypman/horseshoe.hpp"
#include "hypman/manifold.hpp"
#include "hypman/spectral.hpp"

namespace hypman::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json rational_json(const Rational& q);
Rational rational_from(const json& j);
json ball_json(const Ball& b);
Ball ball_from(const json& j);

struct SystemFile {
  PolyVectorField field;
  std::optional<RationalVector> equilibrium;
};

/// {"dim": n, "components": [[{"coeff": "p/q", "powers": [...]}, ...], ...], "equilibrium": [...]}
SystemFile parse_system(const json& j);
json system_json(const SystemFile& s);
SystemFile load_system(const std::string& path);

json split_json(const SpectralSplit& s);
SpectralSplit split_from_json(const json& j);

/// sigma, alpha, M, K1, K and the radius certificate in one object.
json constants_json(const HyperbolicGap& gap, long K1, long K, const std::optional<RadiusCertificate>& cert);

json chart_json(const ManifoldChart& c);
ManifoldChart chart_from_json(const json& j);  // without the engine

json cover_json(const RectangleCover& c);
RectangleCover cover_from_json(const json& j);

json trace_json(const BranchTrace& t, double hausdorff_to_a);
BranchTrace trace_from_json(const json& j);

json error_json(const std::exception& e);

/// Pretty-printed with sorted keys and a trailing newline.
std::string dump(const json& j);
json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// Header "b1..bk,x1..xn,err".
void write_chart_csv(std::ostream& out, const ManifoldChart& c);
/// Header "j,x1..xn" when `header` is set.
void write_layer_csv(std::ostream& out, const PointCloudLayer& layer, std::size_t n, bool header);
void write_polyline_csv(std::ostream& out, const std::vector<Point>& poly);

std::string svg_points(const std::vector<std::vector<Point>>& groups, const std::string& title);
std::string svg_cover(const RectangleCover& c);

}  // namespace hypman::io
