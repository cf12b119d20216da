#include "equipart/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace equipart {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& text, const std::string& where) {
  std::vector<double> out;
  const char* p = text.data();
  const char* end = p + text.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r')) ++p;
    if (p == end) break;
    double v = 0.0;
    const char* start = *p == '+' ? p + 1 : p;
    const auto [next, ec] = std::from_chars(start, end, v);
    if (ec != std::errc() || !std::isfinite(v))
      throw InputError(where + ": cannot parse a number at '" + std::string(p, std::min<std::ptrdiff_t>(end - p, 16)) + "'");
    out.push_back(v);
    p = next;
  }
  return out;
}

ConvexPolygon build(std::vector<Point2> pts) {
  try {
    return ConvexPolygon::from_vertices(std::move(pts));
  } catch (const GeometryError& e) {
    throw InputError(std::string("invalid polygon: ") + e.what());
  }
}

std::vector<Point2> points_from_json(const nlohmann::json& arr, const std::string& what) {
  if (!arr.is_array()) throw InputError(what + ": expected an array of [x, y] pairs");
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& v = arr[i];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw InputError(what + ": vertex " + std::to_string(i) + " is not an [x, y] pair");
    pts.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return pts;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
                                    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

}  // namespace

ConvexPolygon parse_polygon(const std::string& text) {
  const std::string t = trim(text);
  if (!t.empty() && (t.front() == '[' || t.front() == '{')) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(std::string("malformed JSON polygon: ") + e.what());
    }
    if (j.is_object()) {
      if (!j.contains("vertices")) throw InputError("JSON polygon object needs a \"vertices\" field");
      return build(points_from_json(j["vertices"], "vertices"));
    }
    return build(points_from_json(j, "polygon"));
  }
  std::vector<Point2> pts;
  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    const auto v = parse_numbers(line, where);
    if (v.size() != 2) throw InputError(where + ": expected two numbers, found " + std::to_string(v.size()));
    pts.push_back({v[0], v[1]});
  }
  if (pts.empty()) throw InputError("polygon file has no vertices");
  return build(std::move(pts));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

ConvexPolygon read_polygon(const std::string& path) { return parse_polygon(read_file(path)); }

Density parse_density(const std::string& spec) {
  if (spec == "uniform") return Density::uniform();
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const auto args = colon == std::string::npos ? std::vector<double>{}
                                               : parse_numbers(spec.substr(colon + 1), "density '" + spec + "'");
  if (kind == "linear") {
    if (args.size() != 3) throw InputError("density 'linear' needs a,b,c");
    const double a = args[0], b = args[1], c = args[2];
    return Density::from_function([a, b, c](Point2 p) { return std::max(0.0, a * p.x + b * p.y + c); }, spec);
  }
  if (kind == "gauss") {
    if (args.size() != 3 || !(args[2] > 0.0)) throw InputError("density 'gauss' needs cx,cy,s with s > 0");
    const Point2 c{args[0], args[1]};
    const double s2 = 2.0 * args[2] * args[2];
    return Density::from_function([c, s2](Point2 p) { return std::exp(-norm2(p - c) / s2); }, spec);
  }
  throw InputError("unknown density '" + spec + "' (expected uniform, linear:a,b,c or gauss:cx,cy,s)");
}

nlohmann::json partition_document(const ConvexPolygon& body, const PartitionTree& tree, const DocumentInfo& info,
                                  const Report& report) {
  nlohmann::json doc;
  doc["format"] = "equipart-partition/1";
  doc["m"] = tree.m;
  doc["functional"] = info.functional;
  doc["density"] = info.density;
  doc["seed"] = info.seed;
  doc["body"] = polygon_to_json(body);
  doc["common_value"] = tree.root.value;
  auto cells = nlohmann::json::array();
  for (const auto& c : tree.cells()) cells.push_back(polygon_to_json(c));
  doc["cells"] = std::move(cells);
  doc["tree"] = to_json(tree.root);
  doc["report"] = to_json(report);
  return doc;
}

std::vector<std::vector<Point2>> document_cells(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("cells")) throw InputError("partition document needs a \"cells\" field");
  const auto& cells = doc["cells"];
  if (!cells.is_array()) throw InputError("\"cells\" must be an array");
  std::vector<std::vector<Point2>> out;
  for (std::size_t i = 0; i < cells.size(); ++i) out.push_back(points_from_json(cells[i], "cell " + std::to_string(i)));
  return out;
}

std::string partition_svg(const ConvexPolygon& body, const std::vector<ConvexPolygon>& cells) {
  const Box b = body.bounds();
  const double span = std::max(b.hi.x - b.lo.x, b.hi.y - b.lo.y);
  const double pad = 0.05 * span;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(b.lo.x - pad) << ' ' << num(-b.hi.y - pad) << ' '
    << num(b.hi.x - b.lo.x + 2 * pad) << ' ' << num(b.hi.y - b.lo.y + 2 * pad) << "\">\n";
  s << "<g transform=\"scale(1,-1)\" stroke=\"#222\" stroke-width=\"" << num(0.003 * span) << "\">\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    s << "<path fill=\"" << kPalette[i % std::size(kPalette)] << "\" d=\"";
    const auto& v = cells[i].vertices();
    for (std::size_t k = 0; k < v.size(); ++k) s << (k == 0 ? "M" : " L") << num(v[k].x) << ',' << num(v[k].y);
    s << " Z\"/>\n";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

std::string curves_svg(const BranchCurve& gL, const BranchCurve& gM, const Crossing& crossing) {
  double lo = crossing.y, hi = crossing.y;
  for (const auto* g : {&gL, &gM})
    for (const auto& p : g->samples) {
      lo = std::min(lo, p.y);
      hi = std::max(hi, p.y);
    }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double w = 2.0 * std::numbers::pi;
  auto yy = [&](double y) { return num(1.0 - (y - lo) / (hi - lo)); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-0.1 -0.1 " << num(w + 0.2) << " 1.2\""
    << " preserveAspectRatio=\"none\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"1\" fill=\"none\" stroke=\"#999\" stroke-width=\"0.005\"/>\n";
  const char* colors[] = {kPalette[0], kPalette[1]};
  int c = 0;
  for (const auto* g : {&gL, &gM}) {
    s << "<polyline fill=\"none\" stroke=\"" << colors[c++] << "\" stroke-width=\"0.01\" points=\"";
    for (std::size_t k = 0; k < g->samples.size(); ++k)
      s << (k ? " " : "") << num(g->samples[k].t) << ',' << yy(g->samples[k].y);
    s << "\"/>\n";
  }
  s << "<circle cx=\"" << num(crossing.t) << "\" cy=\"" << yy(crossing.y) << "\" r=\"0.03\" fill=\"#e15759\"/>\n";
  s << "</svg>\n";
  return s.str();
}

std::string sweep_table(const BranchCurve& gL, const BranchCurve& gM) {
  std::ostringstream s;
  s << "t\ty_L\ty_M\n";
  const std::size_t n = std::min(gL.samples.size(), gM.samples.size());
  char buf[96];
  for (std::size_t k = 0; k < n; ++k) {
    std::snprintf(buf, sizeof buf, "%.12f\t%.15g\t%.15g\n", gL.samples[k].t, gL.samples[k].y, gM.samples[k].y);
    s << buf;
  }
  return s.str();
}

}  // namespace equipart
