#pragma once

/// @file geom2d.hpp
/// Convex polygon kernel: construction, half-plane clipping, metric
/// quantities and density integration.
///
/// All tolerances are relative to the polygon scale (bounding-box diagonal),
/// with `kGeomEps` as the unit. Clipping never fails: a result of measure
/// zero is reported as `std::nullopt` so that callers never hand a
/// degenerate compactum to a functional.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "equipart/errors.hpp"

namespace equipart {

inline constexpr double kGeomEps = 1e-9;
/// Clipping merges output vertices closer than this (relative). It is kept
/// far below kGeomEps because each merge can shift the clipped measure by
/// up to the merge distance times an edge length.
inline constexpr double kMergeEps = 1e-12;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point2&, const Point2&) = default;

  constexpr Point2& operator+=(Point2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Point2& operator-=(Point2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
};

constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
constexpr Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
constexpr Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }
constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(Point2 a) { return dot(a, a); }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
/// Counterclockwise rotation by `angle`.
inline Point2 rotate(Point2 a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Closed half-plane {x : normal . x <= offset}. `tag` labels the edge that
/// clipping by this half-plane creates (power diagrams store the index of
/// the neighbouring site there).
struct HalfPlane {
  Point2 normal;
  double offset = 0.0;
  int tag = -1;
};

struct Box {
  Point2 lo;
  Point2 hi;
  double diagonal() const { return distance(lo, hi); }
};

/// Counterclockwise convex polygon with at least three vertices.
///
/// Every edge (k, k+1) carries an integer tag; input polygons use -1 and
/// clipping propagates tags, so a cell knows which constraint produced each
/// of its edges.
class ConvexPolygon {
 public:
  /// Validates convexity, orientation and nondegeneracy; throws
  /// GeometryError with a description of the first violated invariant.
  static ConvexPolygon from_vertices(std::vector<Point2> vertices);
  static ConvexPolygon rectangle(double x0, double y0, double x1, double y1);
  static ConvexPolygon regular(int n, Point2 center, double radius, double phase = 0.0);

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  const std::vector<int>& edge_tags() const noexcept { return tags_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const Point2& operator[](std::size_t k) const { return vertices_[k]; }

  Box bounds() const;
  /// Bounding-box diagonal; the length unit of all relative tolerances.
  double scale() const { return bounds().diagonal(); }

  /// Empty string when all invariants hold, else the first violation.
  std::string validate() const;
  bool is_valid() const { return validate().empty(); }

  /// Applies x -> origin + A (x - from) with A = [[a00, a01], [a10, a11]],
  /// det A > 0. Tags are preserved.
  ConvexPolygon transformed(Point2 from, Point2 origin, double a00, double a01, double a10,
                            double a11) const;
  ConvexPolygon translated(Point2 delta) const;
  /// Same vertices with every tag reset to -1.
  ConvexPolygon untagged() const { return ConvexPolygon(vertices_, std::vector<int>(vertices_.size(), -1)); }

 private:
  ConvexPolygon(std::vector<Point2> vertices, std::vector<int> tags)
      : vertices_(std::move(vertices)), tags_(std::move(tags)) {}

  std::vector<Point2> vertices_;
  std::vector<int> tags_;

  friend std::optional<ConvexPolygon> clip_halfplane(const ConvexPolygon&, const HalfPlane&);
};

double area(const ConvexPolygon& p);
double perimeter(const ConvexPolygon& p);
Point2 centroid(const ConvexPolygon& p);
/// Largest vertex-to-vertex distance.
double diameter(const ConvexPolygon& p);
/// Minimal width over all directions (attained perpendicular to an edge).
double width(const ConvexPolygon& p);

/// P intersected with {x : normal . x <= offset}. Output vertices closer
/// than kMergeEps * scale(P) are merged, keeping the one on the cutting
/// line; a result of measure zero is nullopt.
std::optional<ConvexPolygon> clip_halfplane(const ConvexPolygon& p, const HalfPlane& h);
inline std::optional<ConvexPolygon> clip_halfplane(const ConvexPolygon& p, Point2 normal,
                                                   double offset) {
  return clip_halfplane(p, HalfPlane{normal, offset, -1});
}
/// Intersection of two convex polygons (nullopt when of measure zero).
std::optional<ConvexPolygon> intersect(const ConvexPolygon& a, const ConvexPolygon& b);

bool contains(const ConvexPolygon& p, Point2 q, double tol = 0.0);
/// Distance from q to the closed region bounded by p (0 inside).
double distance_to(const ConvexPolygon& p, Point2 q);
/// Hausdorff distance between the two closed convex regions.
double hausdorff(const ConvexPolygon& a, const ConvexPolygon& b);

/// Nonnegative integrable density. Uniform densities take closed-form
/// fast paths everywhere; general ones are integrated by quadrature.
class Density {
 public:
  using Evaluator = std::function<double(Point2)>;

  static Density uniform(double value = 1.0);
  static Density from_function(Evaluator f, std::string name);

  double operator()(Point2 p) const { return uniform_ ? value_ : f_(p); }
  bool is_uniform() const noexcept { return uniform_; }
  double uniform_value() const noexcept { return value_; }
  const std::string& name() const noexcept { return name_; }
  Density scaled(double factor) const;

 private:
  Density() = default;
  bool uniform_ = true;
  double value_ = 1.0;
  Evaluator f_;
  std::string name_ = "uniform";
};

/// Default quadrature order: exact for polynomial densities of degree <= 7.
inline constexpr int kDefaultQuadratureOrder = 7;

/// Integral of rho over P: fan triangulation from the centroid and a
/// collapsed Gauss-Legendre rule per triangle, exact for polynomials of
/// total degree <= order.
double integrate(const ConvexPolygon& p, const Density& rho, int order = kDefaultQuadratureOrder);
/// Integral of g * rho over P, same rule as `integrate`.
double integrate(const ConvexPolygon& p, const Density& rho, const std::function<double(Point2)>& g,
                 int order);
/// Integral of |x - center|^2 rho(x) over P.
double second_moment(const ConvexPolygon& p, const Density& rho, Point2 center,
                     int order = kDefaultQuadratureOrder);
/// Integral of rho over the segment [a, b] with respect to arc length.
double integrate_segment(Point2 a, Point2 b, const Density& rho, int order = kDefaultQuadratureOrder);

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

}  // namespace equipart
