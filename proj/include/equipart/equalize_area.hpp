#pragma once

/// @file equalize_area.hpp
/// Capacity-constrained power diagrams: given sites, find the weights that
/// give every cell a prescribed share of the measure.
///
/// The weights maximize the concave dual
///
///   g(w) = sum_i c_i w_i + integral_K min_i (|x - x_i|^2 - w_i) drho(x),
///
/// whose gradient is c_i - mass_i(w). The ascent is a damped Newton method
/// whose Hessian is assembled from density line integrals over the shared
/// cell edges; steps are backtracked until the dual increases (Armijo).

#include <span>
#include <vector>

#include "equipart/powerdiag.hpp"

namespace equipart {

struct WeightSolveOptions {
  /// Stop when max_i |mass_i - capacity_i| <= tol * mu(K).
  double tol = 1e-10;
  int max_iterations = 200;
  int max_backtracks = 40;
  int quadrature_order = kDefaultQuadratureOrder;
};

struct WeightSolveResult {
  SiteConfig config;
  CellSet cells;
  bool converged = false;
  int iterations = 0;
  /// max_i |mass_i - capacity_i| / mu(K) at the returned iterate.
  double max_error = 0.0;
  /// Dual value at the start and after every accepted step, accumulated
  /// from the measured increase of each step.
  std::vector<double> dual_trace;
};

/// Capacities are read as shares of the measure: they are rescaled by the
/// measured total of the cells, so quadrature differences between K and
/// its cells never make the targets infeasible. Throws std::invalid_argument
/// on non-positive capacities or capacities not summing to mu(K) within
/// 1e-12 relative, and DegenerateConfig on coincident sites. On
/// non-convergence the best iterate is returned with converged = false.
WeightSolveResult solve_weights(const ConvexPolygon& body, std::span<const Point2> sites,
                                std::span<const double> capacities, const Density& rho,
                                const WeightSolveOptions& options = {},
                                std::span<const double> initial_weights = {});

/// Capacities mu(K)/m for all m cells.
std::vector<double> equal_capacities(const ConvexPolygon& body, const Density& rho, std::size_t m,
                                     int order = kDefaultQuadratureOrder);

/// g(w) evaluated from an already computed cell set of `cfg`.
double dual_value(const SiteConfig& cfg, const CellSet& cells, std::span<const double> capacities,
                  const Density& rho, int order = kDefaultQuadratureOrder);

}  // namespace equipart
