#include <doctest.h>

#include <cmath>
#include <numbers>

#include "corpus.hpp"
#include "equipart/equalize_area.hpp"
#include "equipart/equalize_fn.hpp"

using namespace equipart;

namespace {

constexpr double kPi = std::numbers::pi;

double shoelace(const std::vector<Point2>& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += cross(v[k], v[(k + 1) % v.size()]);
  return 0.5 * s;
}

double length(const std::vector<Point2>& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += distance(v[k], v[(k + 1) % v.size()]);
  return s;
}

// Part of v with dot(n, x) <= s (Sutherland-Hodgman against one line).
std::vector<Point2> keep_below(const std::vector<Point2>& v, Point2 n, double s) {
  std::vector<Point2> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point2 p = v[k], q = v[(k + 1) % v.size()];
    const double dp = dot(n, p) - s, dq = dot(n, q) - s;
    if (dp <= 0) out.push_back(p);
    if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) out.push_back(p + (dp / (dp - dq)) * (q - p));
  }
  return out;
}

// Equal-area cut of v with normal direction theta: lower and upper pieces.
std::pair<std::vector<Point2>, std::vector<Point2>> bisect(const std::vector<Point2>& v, double theta) {
  const Point2 n{std::cos(theta), std::sin(theta)};
  double lo = 1e300, hi = -1e300;
  for (Point2 p : v) lo = std::min(lo, dot(n, p)), hi = std::max(hi, dot(n, p));
  const double half = 0.5 * shoelace(v);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shoelace(keep_below(v, n, mid)) < half ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  return {keep_below(v, n, s), keep_below(v, -n, -s)};
}

double split_gap(const std::vector<Point2>& v, double theta) {
  auto [a, b] = bisect(v, theta);
  return length(a) - length(b);
}

std::vector<double> radial_angles(std::size_t m) {
  std::vector<double> a(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) a[k] = 0.3 + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
  return a;
}

}  // namespace

TEST_CASE("solve_weights keeps symmetric fixed points at zero") {
  SUBCASE("two sites about the square center") {
    const std::vector<Point2> sites{{0.3, 0.4}, {0.7, 0.6}};
    const auto caps = equal_capacities(corpus::square(), Density::uniform(), 2);
    const auto r = solve_weights(corpus::square(), sites, caps, Density::uniform());
    CHECK(r.converged);
    for (double w : r.config.weights()) CHECK(std::abs(w) < 1e-12);
  }
  SUBCASE("orbit on a disk-like polygon") {
    // 240 vertices keep the m-fold symmetry for m = 3, 5 and 8.
    const auto disk = ConvexPolygon::regular(240, {0.5, 0.5}, 0.5);
    for (std::size_t m : {3u, 5u, 8u}) {
      std::vector<Point2> sites;
      for (std::size_t k = 0; k < m; ++k) sites.push_back(Point2{0.5, 0.5} + 0.2 * Point2{std::cos(2 * kPi * k / m), std::sin(2 * kPi * k / m)});
      const auto r = solve_weights(disk, sites, equal_capacities(disk, Density::uniform(), m), Density::uniform());
      CHECK(r.converged);
      for (double w : r.config.weights()) CHECK(std::abs(w) < 1e-10);
    }
  }
}

TEST_CASE("solve_weights masses agree with an independent cell_set") {
  Rng rng(17);
  std::vector<Point2> sites(3);
  for (auto& p : sites) p = {uniform(rng), uniform(rng)};
  const std::vector<double> caps(3, 1.0 / 3.0);
  const auto r = solve_weights(corpus::square(), sites, caps, Density::uniform());
  REQUIRE(r.converged);
  const CellSet cs = cell_set(corpus::square(), r.config, Density::uniform());
  for (double m : cs.masses) CHECK(std::abs(m - 1.0 / 3.0) <= 1e-9);
}

TEST_CASE("solve_weights with unequal capacities and a linear density") {
  const Density rho = Density::from_function([](Point2 p) { return 1.0 + p.x; }, "linear");
  const auto body = corpus::nonagon();
  const double total = integrate(body, rho);
  Rng rng(23);
  std::vector<Point2> sites;
  while (sites.size() < 5) {
    const Point2 p{uniform(rng), uniform(rng)};
    if (contains(body, p)) sites.push_back(p);
  }
  const std::vector<double> share{0.1, 0.15, 0.2, 0.25, 0.3};
  std::vector<double> caps;
  for (double s : share) caps.push_back(s * total);
  const auto r = solve_weights(body, sites, caps, rho);
  REQUIRE(r.converged);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(r.cells.masses[i] - caps[i]) <= 1e-9 * total);
  for (std::size_t k = 1; k < r.dual_trace.size(); ++k) CHECK(r.dual_trace[k] >= r.dual_trace[k - 1]);
}

TEST_CASE("solve_weights rejects bad capacities") {
  const std::vector<Point2> sites{{0.3, 0.4}, {0.7, 0.6}};
  CHECK_THROWS_AS(solve_weights(corpus::square(), sites, std::vector<double>{0.5, 0.4}, Density::uniform()),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_weights(corpus::square(), sites, std::vector<double>{1.5, -0.5}, Density::uniform()),
                  std::invalid_argument);
}

TEST_CASE("discrepancy examples") {
  const auto per = perimeter_functional();
  SUBCASE("quarter centers") {
    const SiteConfig cfg({{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}});
    const auto d = discrepancy(corpus::square(), cfg, Density::uniform(), per);
    CHECK(d.max_abs() < 1e-14);
    CHECK(d.mean == doctest::Approx(2.0));
  }
  SUBCASE("mirror pair in an isosceles triangle") {
    const auto tri = ConvexPolygon::from_vertices({{0, 0}, {2, 0}, {1, 1.5}});
    const SiteConfig cfg({{0.7, 0.5}, {1.3, 0.5}});
    CHECK(discrepancy(tri, cfg, Density::uniform(), per).max_abs() < 1e-14);
  }
  SUBCASE("equal-area pair in the square splits at x = 0.5") {
    const std::vector<Point2> sites{{0.2, 0.5}, {0.8, 0.5}};
    const auto r = solve_weights(corpus::square(), sites, std::vector<double>{0.5, 0.5}, Density::uniform());
    REQUIRE(r.cells.cells[0]);
    CHECK(hausdorff(*r.cells.cells[0], ConvexPolygon::rectangle(0, 0, 0.5, 1)) < 1e-12);
    CHECK(discrepancy(r.cells, per).max_abs() < 1e-12);
  }
  SUBCASE("components sum to zero") {
    Rng rng(2);
    std::vector<Point2> s(6);
    for (auto& p : s) p = {uniform(rng), uniform(rng)};
    const auto d = discrepancy(corpus::square(), SiteConfig(s), Density::uniform(), per);
    double sum = 0.0;
    for (double c : d.components) sum += c;
    CHECK(std::abs(sum) <= 1e-12 * d.mean);
  }
}

TEST_CASE("epicycle_init") {
  SUBCASE("m = 2") {
    const auto p = epicycle_init(2, 0.1, {0.0});
    REQUIRE(p.size() == 2);
    CHECK(distance(p[0], {1, 0}) < 1e-15);
    CHECK(distance(p[1], {-1, 0}) < 1e-15);
  }
  SUBCASE("m = 4") {
    const auto p = epicycle_init(4, 0.1, {0.0, kPi / 2, kPi / 2});
    const std::vector<Point2> want{{1, 0.1}, {1, -0.1}, {-1, 0.1}, {-1, -0.1}};
    REQUIRE(p.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(distance(p[k], want[k]) < 1e-15);
  }
  SUBCASE("m = 8 points are distinct") {
    Rng rng(8);
    std::vector<double> a(7);
    for (auto& x : a) x = uniform(rng, 0.0, 2 * kPi);
    const auto p = epicycle_init(8, 0.05, a);
    REQUIRE(p.size() == 8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = i + 1; j < 8; ++j) CHECK(distance(p[i], p[j]) >= 0.05 * 0.05 * 0.05);
  }
  CHECK_THROWS_AS(epicycle_init(3, 0.1, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("square m = 3 from strips gives 8/3") {
  PartitionOptions o;
  o.inits = {InitKind::Strips};
  const auto r = solve_partition(corpus::square(), 3, perimeter_functional(), Density::uniform(), o);
  CHECK(r.common_value == doctest::Approx(8.0 / 3.0).epsilon(1e-6));
  CHECK(r.mass_error <= 1e-9);
}

TEST_CASE("disk from the orbit initializer gives sectors") {
  const double r0 = 0.5;
  for (std::size_t m : {3u, 5u}) {
    PartitionOptions o;
    o.inits = {InitKind::Orbit};
    const auto r = solve_partition(corpus::disk(), m, perimeter_functional(), Density::uniform(), o);
    CHECK(std::abs(r.common_value - (2 * r0 + 2 * kPi * r0 / m)) <= 1e-4);
  }
}

TEST_CASE("triangle m = 2 matches the one-parameter line oracle") {
  const auto tri = corpus::triangle();
  const auto r = solve_partition(tri, 2, perimeter_functional(), Density::uniform());
  REQUIRE(r.cells.cells[0]);
  REQUIRE(r.cells.cells[1]);

  // Roots of the perimeter gap over normal directions in [0, pi).
  const std::vector<Point2> v = tri.vertices();
  const int n = 360;
  double best = 1e300;
  for (int k = 0; k < n; ++k) {
    double a = kPi * k / n, b = kPi * (k + 1) / n;
    double fa = split_gap(v, a), fb = split_gap(v, b);
    if ((fa < 0) == (fb < 0)) continue;
    for (int it = 0; it < 100; ++it) {
      const double c = 0.5 * (a + b), fc = split_gap(v, c);
      if ((fc < 0) == (fa < 0)) a = c, fa = fc;
      else b = c;
    }
    auto [lo, up] = bisect(v, 0.5 * (a + b));
    const auto P = ConvexPolygon::from_vertices(lo), Q = ConvexPolygon::from_vertices(up);
    const auto& c0 = *r.cells.cells[0];
    const auto& c1 = *r.cells.cells[1];
    best = std::min({best, std::max(hausdorff(c0, P), hausdorff(c1, Q)), std::max(hausdorff(c0, Q), hausdorff(c1, P))});
  }
  CHECK(best <= 1e-6);
}

TEST_CASE("cut partitions carry equal masses") {
  const Density rho = Density::from_function([](Point2 p) { return 1.0 + p.x; }, "linear");
  for (const auto& b : corpus::all()) {
    CAPTURE(b.name);
    const double total = integrate(b.polygon, rho);
    for (std::size_t m : {2u, 3u, 5u}) {
      const auto cuts = cut_partition(b.polygon, rho, radial_angles(m));
      REQUIRE(cuts);
      REQUIRE(cuts->cells.size() == m);
      for (const auto& c : cuts->cells) CHECK(std::abs(integrate(c, rho) - total / m) <= 1e-9 * total);
    }
  }
}

TEST_CASE("parallel cuts are realized by a power diagram") {
  const auto sq = corpus::square();
  const std::vector<double> angles{0.0, 0.0, 0.0};
  const auto cuts = cut_partition(sq, Density::uniform(), angles);
  REQUIRE(cuts);
  const auto sites = cut_sites(sq, *cuts);
  REQUIRE(sites);
  const auto r = solve_weights(sq, *sites, equal_capacities(sq, Density::uniform(), 4), Density::uniform());
  REQUIRE(r.converged);
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(r.cells.cells[i]);
    double h = 1e300;
    for (const auto& c : cuts->cells) h = std::min(h, hausdorff(*r.cells.cells[i], c));
    CHECK(h < 1e-8);
  }
}

TEST_CASE("solve_partition is deterministic for a seed") {
  PartitionOptions o;
  o.seed = 4;
  const auto a = solve_partition(corpus::nonagon(), 5, perimeter_functional(), Density::uniform(), o);
  const auto b = solve_partition(corpus::nonagon(), 5, perimeter_functional(), Density::uniform(), o);
  CHECK(a.common_value == b.common_value);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells.cells[i]->vertices() == b.cells.cells[i]->vertices());
}

TEST_CASE("solve_partition equalizes diameter under a linear density") {
  const Density rho = Density::from_function([](Point2 p) { return std::max(0.0, p.x + 0.1); }, "linear:1,0,0.1");
  const auto r = solve_partition(corpus::triangle(), 3, diameter_functional(), rho);
  CHECK(r.max_deviation <= 1e-8 * r.common_value);
  CHECK(r.mass_error <= 1e-9);
}
