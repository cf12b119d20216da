#pragma once

/// @file verify.hpp
/// Independent checker for claimed equipartitions. Works from raw vertex
/// lists only and never reads solver state.

#include <vector>

#include <json.hpp>

#include "equipart/functional.hpp"

namespace equipart {

struct Report {
  std::size_t cells = 0;
  /// |mu(K) - sum mu(cell_i)|.
  double coverage_gap = 0.0;
  /// Largest area of a pairwise intersection.
  double max_overlap = 0.0;
  /// Total cell area outside K.
  double outside_area = 0.0;
  /// max_i |mu(cell_i) - mu(K)/m| / (mu(K)/m).
  double max_mass_deviation = 0.0;
  /// max_i |f(cell_i) - mean f| / mean f.
  double max_f_deviation = 0.0;
  std::vector<bool> convex;
  std::vector<double> masses;
  std::vector<double> values;
  double tol_area = 0.0;
  double tol_f = 0.0;
  bool pass = false;
  /// First failed check, empty on pass.
  std::string reason;
};

/// Pass requires every cell convex, coverage gap, overlap and outside
/// area within tol_area relative to mu(K) (resp. area(K)), mass deviation
/// <= tol_area and f deviation <= tol_f.
Report check_partition(const ConvexPolygon& body, const std::vector<std::vector<Point2>>& cells,
                       const Density& rho, const Functional& f, double tol_area = 1e-6, double tol_f = 1e-5);

nlohmann::json to_json(const Report& report);

}  // namespace equipart
