#include "equipart/equalize_area.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace equipart {

namespace {

struct Iterate {
  SiteConfig config;
  CellSet cells;
  std::vector<double> gradient;  // target_i - mass_i
  double error = 0.0;            // max |gradient| / measured total
  double dual = 0.0;
};

Iterate evaluate(const ConvexPolygon& body, std::span<const Point2> sites, std::vector<double> weights,
                 std::span<const double> capacities, double capacity_sum, const Density& rho, int order) {
  Iterate it;
  it.config = SiteConfig(std::vector<Point2>(sites.begin(), sites.end()), std::move(weights));
  it.cells = cell_set(body, it.config, rho, order);
  const double total = it.cells.total_mass();
  it.gradient.resize(sites.size());
  std::vector<double> targets(sites.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    targets[i] = capacities[i] * total / capacity_sum;
    it.gradient[i] = targets[i] - it.cells.masses[i];
    worst = std::max(worst, std::abs(it.gradient[i]));
  }
  it.error = worst / total;
  it.dual = dual_value(it.config, it.cells, targets, rho, order);
  return it;
}

// d mass_i / d w_j: a weighted graph Laplacian over the cell adjacency.
Eigen::MatrixXd mass_jacobian(const SiteConfig& cfg, const CellSet& cells, const Density& rho, int order) {
  const auto m = static_cast<Eigen::Index>(cfg.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& cell = cells.cells[static_cast<std::size_t>(i)];
    if (!cell) continue;
    const auto& v = cell->vertices();
    const auto& tags = cell->edge_tags();
    for (std::size_t k = 0; k < v.size(); ++k) {
      const int j = tags[k];
      if (j < 0) continue;
      const double len = integrate_segment(v[k], v[(k + 1) % v.size()], rho, order);
      const double coef = len / (2.0 * distance(cfg.sites()[static_cast<std::size_t>(i)],
                                                cfg.sites()[static_cast<std::size_t>(j)]));
      h(i, j) -= coef;
      h(i, i) += coef;
    }
  }
  return 0.5 * (h + h.transpose());
}

// Solves the Newton system on the zero-sum subspace. Empty cells have a
// zero row; they get the mean diagonal so that their step is a scaled
// subgradient. Returns false when no factorization succeeds.
bool newton_direction(Eigen::MatrixXd h, const std::vector<double>& gradient, const CellSet& cells,
                      Eigen::VectorXd& step) {
  const Eigen::Index m = h.rows();
  double diag_sum = 0.0;
  int diag_count = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (h(i, i) > 0.0) {
      diag_sum += h(i, i);
      ++diag_count;
    }
  if (diag_count == 0) return false;
  const double mean_diag = diag_sum / diag_count;
  for (Eigen::Index i = 0; i < m; ++i)
    if (!cells.cells[static_cast<std::size_t>(i)] || h(i, i) <= 0.0) h(i, i) = mean_diag;
  // The constant vector spans the kernel of the Laplacian; adding a rank-one
  // term along it leaves zero-sum solutions unchanged.
  h.array() += mean_diag / static_cast<double>(m);

  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(gradient.data(), m);
  double lambda = 1e-12 * h.trace();
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0.0).all()) {
      step = ldlt.solve(rhs);
      if (step.allFinite()) {
        step.array() -= step.mean();
        return true;
      }
    }
    h.diagonal().array() += lambda;
    lambda *= 1e3;
  }
  return false;
}

}  // namespace

std::vector<double> equal_capacities(const ConvexPolygon& body, const Density& rho, std::size_t m, int order) {
  const double total = integrate(body, rho, order);
  return std::vector<double>(m, total / static_cast<double>(m));
}

double dual_value(const SiteConfig& cfg, const CellSet& cells, std::span<const double> capacities,
                  const Density& rho, int order) {
  double g = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const double w = cfg.weights()[i];
    g += capacities[i] * w;
    if (cells.cells[i]) g += second_moment(*cells.cells[i], rho, cfg.sites()[i], order) - w * cells.masses[i];
  }
  return g;
}

WeightSolveResult solve_weights(const ConvexPolygon& body, std::span<const Point2> sites,
                                std::span<const double> capacities, const Density& rho,
                                const WeightSolveOptions& options, std::span<const double> initial_weights) {
  const std::size_t m = sites.size();
  if (m == 0 || capacities.size() != m) throw std::invalid_argument("solve_weights: size mismatch");
  if (!initial_weights.empty() && initial_weights.size() != m)
    throw std::invalid_argument("solve_weights: initial weight count mismatch");
  for (double c : capacities)
    if (!(c > 0.0)) throw std::invalid_argument("solve_weights: capacities must be positive");
  const double capacity_sum = std::accumulate(capacities.begin(), capacities.end(), 0.0);
  const double body_mass = integrate(body, rho, options.quadrature_order);
  if (std::abs(capacity_sum - body_mass) > 1e-12 * body_mass)
    throw std::invalid_argument("solve_weights: capacities must sum to the measure of the body");

  std::vector<double> w0 = initial_weights.empty() ? std::vector<double>(m, 0.0)
                                                   : std::vector<double>(initial_weights.begin(), initial_weights.end());
  Iterate cur = evaluate(body, sites, std::move(w0), capacities, capacity_sum, rho, options.quadrature_order);

  WeightSolveResult result;
  double dual = cur.dual;
  result.dual_trace.push_back(dual);
  const double dual_scale = body_mass * std::pow(body.scale(), 2);

  while (cur.error > options.tol && result.iterations < options.max_iterations) {
    Eigen::VectorXd step;
    const Eigen::MatrixXd h = mass_jacobian(cur.config, cur.cells, rho, options.quadrature_order);
    if (!newton_direction(h, cur.gradient, cur.cells, step)) {
      step = Eigen::Map<const Eigen::VectorXd>(cur.gradient.data(), static_cast<Eigen::Index>(m)) *
             (area(body) / body_mass);
    }
    const double predicted =
        step.dot(Eigen::Map<const Eigen::VectorXd>(cur.gradient.data(), static_cast<Eigen::Index>(m)));
    const std::size_t empties = cur.cells.empty_count();

    bool accepted = false;
    double tau = 1.0;
    for (int b = 0; b <= options.max_backtracks && !accepted; ++b, tau *= 0.5) {
      std::vector<double> w = cur.config.weights();
      for (std::size_t i = 0; i < m; ++i) w[i] += tau * step(static_cast<Eigen::Index>(i));
      Iterate trial = evaluate(body, sites, std::move(w), capacities, capacity_sum, rho, options.quadrature_order);
      if (trial.cells.empty_count() > empties) continue;
      double increase = trial.dual - cur.dual;
      bool ok = increase >= 1e-4 * tau * predicted;
      // Close to the optimum the increase drops below the rounding noise of
      // the dual itself. Measure it instead as the path integral of the
      // gradient (trapezoid rule), and accept on a decreasing residual as
      // long as the dual does not decrease.
      const double noise = 1e-14 * dual_scale;
      if (!ok && tau * predicted <= 1e3 * noise) {
        increase = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          increase += 0.5 * (cur.gradient[i] + trial.gradient[i]) * (trial.config.weights()[i] - cur.config.weights()[i]);
        ok = trial.error < cur.error && increase >= 0.0;
      }
      if (ok) {
        cur = std::move(trial);
        dual += increase;
        accepted = true;
      }
    }
    if (!accepted) break;
    ++result.iterations;
    result.dual_trace.push_back(dual);
  }

  result.converged = cur.error <= options.tol;
  result.max_error = cur.error;
  result.config = std::move(cur.config);
  result.cells = std::move(cur.cells);
  return result;
}

}  // namespace equipart
