#include "equipart/partition_tree.hpp"

#include <algorithm>
#include <cmath>

namespace equipart {

namespace {

void collect_leaves(const PartitionNode& n, std::vector<const PartitionNode*>& out) {
  if (n.is_leaf()) {
    out.push_back(&n);
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

nlohmann::json point_json(Point2 p) { return nlohmann::json::array({p.x, p.y}); }

}  // namespace

std::vector<const PartitionNode*> PartitionNode::leaves() const {
  std::vector<const PartitionNode*> out;
  collect_leaves(*this, out);
  return out;
}

std::size_t PartitionNode::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth() + 1);
  return d;
}

Point2 Frame::to_local(Point2 p) const {
  const Point2 d = p - origin;
  const double det = cross(e1, e2);
  return {cross(d, e2) / det, cross(e1, d) / det};
}

Point2 Frame::to_world(Point2 q) const { return origin + q.x * e1 + q.y * e2; }

Frame moment_frame(const ConvexPolygon& body) {
  const Point2 c = centroid(body);
  const Density one = Density::uniform();
  const double a = area(body);
  const double sxx = integrate(body, one, [c](Point2 p) { return (p.x - c.x) * (p.x - c.x); }, 2) / a;
  const double sxy = integrate(body, one, [c](Point2 p) { return (p.x - c.x) * (p.y - c.y); }, 2) / a;
  const double syy = integrate(body, one, [c](Point2 p) { return (p.y - c.y) * (p.y - c.y); }, 2) / a;
  // sqrt of a 2x2 SPD matrix: (S + sqrt(det) I) / sqrt(trace + 2 sqrt(det)).
  const double s = std::sqrt(sxx * syy - sxy * sxy);
  const double t = std::sqrt(sxx + syy + 2.0 * s);
  return Frame{c, {(sxx + s) / t, sxy / t}, {sxy / t, (syy + s) / t}};
}

Frame chord_frame(Point2 a, Point2 b, double body_area) {
  const Point2 d = b - a;
  const double len = norm(d);
  const Point2 n{-d.y / len, d.x / len};
  return Frame{0.5 * (a + b), 0.5 * d, (body_area / len) * n};
}

PartitionNode transport(const PartitionNode& node, const Frame& from, const Frame& to) {
  auto map = [&](Point2 p) { return to.to_world(from.to_local(p)); };
  // Linear part of the map, column by column.
  const Point2 c1 = map(from.origin + Point2{1.0, 0.0}) - to.origin;
  const Point2 c2 = map(from.origin + Point2{0.0, 1.0}) - to.origin;
  const Point2 src = map(Point2{0.0, 0.0});
  const double area_ratio = cross(to.e1, to.e2) / cross(from.e1, from.e2);

  PartitionNode out(node.body.transformed({0.0, 0.0}, src, c1.x, c2.x, c1.y, c2.y));
  out.mass = node.mass;
  out.value = node.value;
  out.prime = node.prime;
  out.y = node.y;
  if (const auto* ps = std::get_if<PowerSplit>(&node.split)) {
    std::vector<Point2> sites;
    std::vector<double> weights;
    for (Point2 s : ps->config.sites()) sites.push_back(map(s));
    for (double w : ps->config.weights()) weights.push_back(w * area_ratio);
    out.split = PowerSplit{SiteConfig(std::move(sites), std::move(weights))};
  } else if (const auto* ls = std::get_if<LineSplit>(&node.split)) {
    const Point2 a = map(ls->a), b = map(ls->b);
    const Point2 dir = b - a;
    out.split = LineSplit{std::atan2(dir.y, dir.x), a, b};
  } else if (const auto* cs = std::get_if<CutSplit>(&node.split)) {
    // Normals map by the inverse transpose of the linear part.
    const double det = cross(c1, c2);
    CutSplit moved;
    for (double a : cs->angles) {
      const Point2 n{std::cos(a), std::sin(a)};
      const Point2 m = Point2{c2.y * n.x - c1.y * n.y, c1.x * n.y - c2.x * n.x} / det;
      moved.angles.push_back(std::atan2(m.y, m.x));
    }
    out.split = std::move(moved);
  }
  out.children.reserve(node.children.size());
  for (const auto& c : node.children) out.children.push_back(transport(c, from, to));
  return out;
}

nlohmann::json polygon_to_json(const ConvexPolygon& p) {
  auto arr = nlohmann::json::array();
  for (Point2 v : p.vertices()) arr.push_back(point_json(v));
  return arr;
}

nlohmann::json to_json(const PartitionNode& node) {
  nlohmann::json j;
  j["vertices"] = polygon_to_json(node.body);
  j["mass"] = node.mass;
  j["value"] = node.value;
  if (!node.is_leaf()) {
    j["prime"] = node.prime;
    j["y"] = node.y;
    if (const auto* ps = std::get_if<PowerSplit>(&node.split)) {
      auto sites = nlohmann::json::array();
      for (Point2 s : ps->config.sites()) sites.push_back(point_json(s));
      j["split"] = {{"kind", "power"}, {"sites", sites}, {"weights", ps->config.weights()}};
    } else if (const auto* ls = std::get_if<LineSplit>(&node.split)) {
      j["split"] = {{"kind", "line"}, {"angle", ls->angle}, {"chord", {point_json(ls->a), point_json(ls->b)}}};
    } else if (const auto* cs = std::get_if<CutSplit>(&node.split)) {
      j["split"] = {{"kind", "cuts"}, {"angles", cs->angles}};
    }
    auto kids = nlohmann::json::array();
    for (const auto& c : node.children) kids.push_back(to_json(c));
    j["children"] = std::move(kids);
  }
  return j;
}

}  // namespace equipart
