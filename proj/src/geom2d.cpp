#include "equipart/geom2d.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/legendre.hpp>

namespace equipart {

namespace {

constexpr int kMaxGaussPoints = 32;

struct TaggedVertex {
  Point2 p;
  int tag;
  bool on_cut = false;
};

double segment_distance(Point2 q, Point2 a, Point2 b) {
  const Point2 e = b - a;
  const double len2 = norm2(e);
  if (len2 == 0.0) return distance(q, a);
  const double t = std::clamp(dot(q - a, e) / len2, 0.0, 1.0);
  return distance(q, a + t * e);
}

double directed_hausdorff(const ConvexPolygon& from, const ConvexPolygon& to) {
  double worst = 0.0;
  for (const Point2& v : from.vertices()) worst = std::max(worst, distance_to(to, v));
  return worst;
}

}  // namespace

ConvexPolygon ConvexPolygon::from_vertices(std::vector<Point2> vertices) {
  std::vector<int> tags(vertices.size(), -1);
  ConvexPolygon p(std::move(vertices), std::move(tags));
  if (auto why = p.validate(); !why.empty()) throw GeometryError("invalid convex polygon: " + why);
  return p;
}

ConvexPolygon ConvexPolygon::rectangle(double x0, double y0, double x1, double y1) {
  return from_vertices({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

ConvexPolygon ConvexPolygon::regular(int n, Point2 center, double radius, double phase) {
  std::vector<Point2> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double a = phase + 2.0 * std::numbers::pi * k / n;
    v.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return from_vertices(std::move(v));
}

Box ConvexPolygon::bounds() const {
  Box b{vertices_.front(), vertices_.front()};
  for (const Point2& v : vertices_) {
    b.lo.x = std::min(b.lo.x, v.x);
    b.lo.y = std::min(b.lo.y, v.y);
    b.hi.x = std::max(b.hi.x, v.x);
    b.hi.y = std::max(b.hi.y, v.y);
  }
  return b;
}

std::string ConvexPolygon::validate() const {
  const std::size_t n = vertices_.size();
  if (n < 3) return "fewer than 3 vertices";
  for (const Point2& v : vertices_)
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) return "non-finite coordinate";
  const double s = scale();
  if (!(s > 0.0)) return "zero extent";
  double turning = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point2 a = vertices_[k];
    const Point2 b = vertices_[(k + 1) % n];
    const Point2 c = vertices_[(k + 2) % n];
    if (distance(a, b) < kGeomEps * s) {
      std::ostringstream os;
      os << "vertices " << k << " and " << (k + 1) % n << " coincide";
      return os.str();
    }
    const Point2 e1 = b - a, e2 = c - b;
    const double cr = cross(e1, e2);
    if (cr < -kGeomEps * s * s) {
      std::ostringstream os;
      os << "reflex or clockwise turn at vertex " << (k + 1) % n;
      return os.str();
    }
    turning += std::atan2(cr, dot(e1, e2));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) return "total turning is not 2*pi";
  if (!(area(*this) > 0.0)) return "non-positive area";
  return {};
}

ConvexPolygon ConvexPolygon::transformed(Point2 from, Point2 origin, double a00, double a01,
                                         double a10, double a11) const {
  std::vector<Point2> v;
  v.reserve(vertices_.size());
  for (const Point2& p : vertices_) {
    const Point2 d = p - from;
    v.push_back({origin.x + a00 * d.x + a01 * d.y, origin.y + a10 * d.x + a11 * d.y});
  }
  return ConvexPolygon(std::move(v), tags_);
}

ConvexPolygon ConvexPolygon::translated(Point2 delta) const {
  std::vector<Point2> v = vertices_;
  for (Point2& p : v) p += delta;
  return ConvexPolygon(std::move(v), tags_);
}

double area(const ConvexPolygon& p) {
  const auto& v = p.vertices();
  const Point2 o = v.front();
  double twice = 0.0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) twice += cross(v[k] - o, v[k + 1] - o);
  return 0.5 * twice;
}

double perimeter(const ConvexPolygon& p) {
  const auto& v = p.vertices();
  double sum = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) sum += distance(v[k], v[(k + 1) % v.size()]);
  return sum;
}

Point2 centroid(const ConvexPolygon& p) {
  const auto& v = p.vertices();
  const Point2 o = v.front();
  double twice = 0.0;
  Point2 acc{};
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    const Point2 a = v[k] - o, b = v[k + 1] - o;
    const double c = cross(a, b);
    twice += c;
    acc += c * (a + b);
  }
  return o + acc / (3.0 * twice);
}

double diameter(const ConvexPolygon& p) {
  const auto& v = p.vertices();
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, norm2(v[i] - v[j]));
  return std::sqrt(best);
}

double width(const ConvexPolygon& p) {
  const auto& v = p.vertices();
  const std::size_t n = v.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const Point2 a = v[k];
    const Point2 e = v[(k + 1) % n] - a;
    const double len = norm(e);
    double far = 0.0;
    for (const Point2& q : v) far = std::max(far, cross(e, q - a) / len);
    best = std::min(best, far);
  }
  return best;
}

std::optional<ConvexPolygon> clip_halfplane(const ConvexPolygon& p, const HalfPlane& h) {
  const double nn = norm(h.normal);
  if (!(nn > 0.0)) throw GeometryError("clip_halfplane: zero normal");
  const auto& v = p.vertices_;
  const auto& tags = p.tags_;
  const std::size_t n = v.size();

  std::vector<double> s(n);
  bool any_out = false, any_in = false;
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = (dot(h.normal, v[k]) - h.offset) / nn;
    if (s[k] > 0.0) any_out = true;
    if (s[k] < 0.0) any_in = true;
  }
  if (!any_out) return p;
  if (!any_in) return std::nullopt;

  std::vector<TaggedVertex> out;
  out.reserve(n + 2);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = (k + 1) % n;
    const Point2 a = v[k], b = v[j];
    const double sa = s[k], sb = s[j];
    if (sa <= 0.0) {
      out.push_back({a, tags[k]});
      if (sb > 0.0) out.push_back({a + (sa / (sa - sb)) * (b - a), h.tag, true});
    } else if (sb < 0.0) {
      out.push_back({a + (sa / (sa - sb)) * (b - a), tags[k], true});
    }
  }

  // Near-coincident points merge. The survivor sits on the cutting line, so
  // the clipped measure stays continuous in the offset.
  const double tol = kMergeEps * p.scale();
  auto absorb = [](TaggedVertex& keep, const TaggedVertex& other) {
    if (other.on_cut && !keep.on_cut) {
      keep.p = other.p;
      keep.on_cut = true;
    }
  };
  std::vector<TaggedVertex> merged;
  merged.reserve(out.size());
  for (const TaggedVertex& tv : out) {
    if (!merged.empty() && distance(merged.back().p, tv.p) <= tol) {
      absorb(merged.back(), tv);
      merged.back().tag = tv.tag;
      continue;
    }
    merged.push_back(tv);
  }
  while (merged.size() >= 2 && distance(merged.back().p, merged.front().p) <= tol) {
    absorb(merged.front(), merged.back());
    merged.pop_back();
  }
  if (merged.size() < 3) return std::nullopt;

  std::vector<Point2> pts;
  std::vector<int> out_tags;
  pts.reserve(merged.size());
  out_tags.reserve(merged.size());
  for (const TaggedVertex& tv : merged) {
    pts.push_back(tv.p);
    out_tags.push_back(tv.tag);
  }
  ConvexPolygon result(std::move(pts), std::move(out_tags));
  if (!(area(result) > tol * tol)) return std::nullopt;
  return result;
}

std::optional<ConvexPolygon> intersect(const ConvexPolygon& a, const ConvexPolygon& b) {
  std::optional<ConvexPolygon> cur = a;
  const auto& v = b.vertices();
  for (std::size_t k = 0; k < v.size() && cur; ++k) {
    const Point2 e = v[(k + 1) % v.size()] - v[k];
    const Point2 normal{e.y, -e.x};
    cur = clip_halfplane(*cur, normal, dot(normal, v[k]));
  }
  return cur;
}

bool contains(const ConvexPolygon& p, Point2 q, double tol) {
  const auto& v = p.vertices();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point2 e = v[(k + 1) % v.size()] - v[k];
    if (cross(e, q - v[k]) / norm(e) < -tol) return false;
  }
  return true;
}

double distance_to(const ConvexPolygon& p, Point2 q) {
  if (contains(p, q)) return 0.0;
  const auto& v = p.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k)
    best = std::min(best, segment_distance(q, v[k], v[(k + 1) % v.size()]));
  return best;
}

double hausdorff(const ConvexPolygon& a, const ConvexPolygon& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

Density Density::uniform(double value) {
  if (!(value > 0.0)) throw std::invalid_argument("uniform density must be positive");
  Density d;
  d.value_ = value;
  d.name_ = "uniform";
  return d;
}

Density Density::from_function(Evaluator f, std::string name) {
  Density d;
  d.uniform_ = false;
  d.f_ = std::move(f);
  d.name_ = std::move(name);
  return d;
}

Density Density::scaled(double factor) const {
  if (uniform_) {
    Density d = uniform(value_ * factor);
    d.name_ = name_;
    return d;
  }
  Density d = from_function([f = f_, factor](Point2 p) { return factor * f(p); }, name_);
  return d;
}

const GaussRule& gauss_legendre(int n) {
  static const std::array<GaussRule, kMaxGaussPoints + 1> rules = [] {
    std::array<GaussRule, kMaxGaussPoints + 1> r{};
    for (int m = 1; m <= kMaxGaussPoints; ++m) {
      const auto zeros = boost::math::legendre_p_zeros<double>(m);
      GaussRule& rule = r[static_cast<std::size_t>(m)];
      for (double x : zeros) {
        const double dp = boost::math::legendre_p_prime(m, x);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        if (x == 0.0) {
          rule.nodes.push_back(0.5);
          rule.weights.push_back(0.5 * w);
        } else {
          rule.nodes.push_back(0.5 * (1.0 - x));
          rule.weights.push_back(0.5 * w);
          rule.nodes.push_back(0.5 * (1.0 + x));
          rule.weights.push_back(0.5 * w);
        }
      }
    }
    return r;
  }();
  if (n < 1 || n > kMaxGaussPoints) throw std::invalid_argument("gauss_legendre: unsupported point count");
  return rules[static_cast<std::size_t>(n)];
}

double integrate(const ConvexPolygon& p, const Density& rho, const std::function<double(Point2)>& g,
                 int order) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  // Collapsed (Duffy) coordinates raise the degree in the radial direction
  // by one, hence (order + 3) / 2 points.
  const GaussRule& rule = gauss_legendre(std::min((order + 3) / 2, kMaxGaussPoints));
  const Point2 c = centroid(p);
  const auto& v = p.vertices();
  double total = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point2 a = v[k] - c;
    const Point2 ab = v[(k + 1) % v.size()] - v[k];
    const double jac = cross(a, v[(k + 1) % v.size()] - c);
    double tri = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double u = rule.nodes[i];
      double inner = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const Point2 q = c + u * (a + rule.nodes[j] * ab);
        inner += rule.weights[j] * rho(q) * g(q);
      }
      tri += rule.weights[i] * u * inner;
    }
    total += jac * tri;
  }
  return total;
}

double integrate(const ConvexPolygon& p, const Density& rho, int order) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  if (rho.is_uniform()) return rho.uniform_value() * area(p);
  return integrate(p, rho, [](Point2) { return 1.0; }, order);
}

double second_moment(const ConvexPolygon& p, const Density& rho, Point2 center, int order) {
  if (rho.is_uniform()) {
    const auto& v = p.vertices();
    const Point2 a = v.front() - center;
    double sum = 0.0;
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
      const Point2 b = v[k] - center, c = v[k + 1] - center;
      const double twice_area = cross(b - a, c - a);
      sum += twice_area * (norm2(a) + norm2(b) + norm2(c) + dot(a, b) + dot(b, c) + dot(c, a));
    }
    return rho.uniform_value() * sum / 12.0;
  }
  return integrate(p, rho, [center](Point2 q) { return norm2(q - center); }, order + 2);
}

double integrate_segment(Point2 a, Point2 b, const Density& rho, int order) {
  const double len = distance(a, b);
  if (rho.is_uniform()) return rho.uniform_value() * len;
  const GaussRule& rule = gauss_legendre(std::min((order + 2) / 2, kMaxGaussPoints));
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * rho(a + rule.nodes[i] * (b - a));
  return sum * len;
}

}  // namespace equipart
