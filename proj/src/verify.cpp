#include "equipart/verify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace equipart {

Report check_partition(const ConvexPolygon& body, const std::vector<std::vector<Point2>>& cells,
                       const Density& rho, const Functional& f, double tol_area, double tol_f) {
  Report r;
  r.cells = cells.size();
  r.tol_area = tol_area;
  r.tol_f = tol_f;
  auto fail = [&](std::string why) {
    if (r.reason.empty()) r.reason = std::move(why);
  };
  if (cells.empty()) {
    fail("no cells");
    return r;
  }

  std::vector<std::optional<ConvexPolygon>> polys;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    try {
      polys.push_back(ConvexPolygon::from_vertices(cells[i]));
      r.convex.push_back(true);
    } catch (const GeometryError& e) {
      polys.emplace_back();
      r.convex.push_back(false);
      fail("cell " + std::to_string(i) + " is not a valid convex polygon: " + e.what());
    }
  }

  const double total = integrate(body, rho);
  const double body_area = area(body);
  const double share = total / static_cast<double>(cells.size());
  double covered = 0.0, fsum = 0.0;
  std::size_t valid = 0;
  for (const auto& p : polys) {
    const double mass = p ? integrate(*p, rho) : 0.0;
    const double value = p ? f(*p) : 0.0;
    r.masses.push_back(mass);
    r.values.push_back(value);
    covered += mass;
    if (p) {
      fsum += value;
      ++valid;
      const auto inside = intersect(*p, body);
      r.outside_area += area(*p) - (inside ? area(*inside) : 0.0);
    }
  }
  r.coverage_gap = std::abs(total - covered);
  const double fmean = valid ? fsum / static_cast<double>(valid) : 0.0;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    r.max_mass_deviation = std::max(r.max_mass_deviation, std::abs(r.masses[i] - share) / share);
    if (polys[i] && fmean != 0.0)
      r.max_f_deviation = std::max(r.max_f_deviation, std::abs(r.values[i] - fmean) / std::abs(fmean));
    for (std::size_t j = i + 1; j < polys.size(); ++j) {
      if (!polys[i] || !polys[j]) continue;
      const auto both = intersect(*polys[i], *polys[j]);
      if (both) r.max_overlap = std::max(r.max_overlap, area(*both));
    }
  }

  if (r.coverage_gap > tol_area * total) fail("coverage gap " + std::to_string(r.coverage_gap));
  if (r.max_overlap > tol_area * body_area) fail("overlapping cells");
  if (r.outside_area > tol_area * body_area) fail("cells extend outside the body");
  if (r.max_mass_deviation > tol_area) fail("unequal masses");
  if (r.max_f_deviation > tol_f) fail("unequal functional values");
  r.pass = r.reason.empty();
  return r;
}

nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["pass"] = r.pass;
  j["reason"] = r.reason;
  j["cells"] = r.cells;
  j["coverage_gap"] = r.coverage_gap;
  j["max_overlap"] = r.max_overlap;
  j["outside_area"] = r.outside_area;
  j["max_mass_deviation"] = r.max_mass_deviation;
  j["max_f_deviation"] = r.max_f_deviation;
  j["tol_area"] = r.tol_area;
  j["tol_f"] = r.tol_f;
  j["convex"] = r.convex;
  j["masses"] = r.masses;
  j["values"] = r.values;
  return j;
}

}  // namespace equipart
