#pragma once

/// @file equalize_fn.hpp
/// Equal-measure, equal-functional partitions by moving power-diagram sites.
///
/// The problem is bilevel: for every site configuration the weights are
/// solved exactly for equal capacities, and the outer search moves the 2m
/// site coordinates to zero the discrepancy vector (f(V_i) - mean f). The
/// outer search is a Levenberg-Marquardt iteration on a forward-difference
/// Jacobian with minimum-norm steps, restarted from a list of initializers.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "equipart/equalize_area.hpp"
#include "equipart/functional.hpp"

namespace equipart {

/// Zero-sum vector f(V_i) - mean_j f(V_j).
struct DiscrepancyVector {
  std::vector<double> components;
  double mean = 0.0;

  double max_abs() const;
};

/// Requires a cell set with no empty cell and every cell of area at least
/// `area_floor`; throws DegenerateCell otherwise.
DiscrepancyVector discrepancy(const CellSet& cells, const Functional& f, double area_floor = 0.0);
/// Runs cell_set first.
DiscrepancyVector discrepancy(const ConvexPolygon& body, const SiteConfig& cfg, const Density& rho,
                              const Functional& f, double area_floor = 0.0);

/// Epicycle configuration for m = 2^k: the points
///   +-v_1 +- eps v_2 +- ... +- eps^(k-1) v_k
/// where the vector at each level depends on the signs chosen above it.
/// Internal nodes of the sign tree are numbered breadth first (root 0,
/// children 2i+1 for + and 2i+2 for -), and `angles[i]` is the direction of
/// the vector at node i, so m - 1 angles are needed. Throws
/// std::invalid_argument unless m is a power of two, eps in (0, 1/2) and
/// the angle count matches, and DegenerateConfig when two points coincide
/// within 1e-12 of the configuration scale.
std::vector<Point2> epicycle_init(std::size_t m, double eps, const std::vector<double>& angles);

enum class InitKind { Orbit, Lattice, Epicycle, Strips, Random, Chain };

const char* to_string(InitKind kind);

using Rng = std::mt19937_64;

/// Uniform in [lo, hi) from the top 53 bits of one draw, so streams are
/// reproducible across standard libraries.
inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Initial sites for one of the initializers. Orbit: a regular m-gon about
/// the mass centroid. Lattice: a ceil(sqrt m)-column grid scaled about the
/// centroid. Epicycle: epicycle_init about the centroid (m = 2^k only,
/// otherwise std::invalid_argument). Strips: centroids of m equal-mass
/// strips across the longer bounding-box side. Random: uniform in K.
/// Chain: a random polyline through the centroid with turns below pi/4,
/// whose power diagrams are fans of nearly parallel chords.
std::vector<Point2> initial_sites(const ConvexPolygon& body, const Density& rho, std::size_t m, InitKind kind,
                                  Rng& rng);

/// Centroids of m equal-mass strips cut perpendicular to `axis`.
std::vector<Point2> strip_sites(const ConvexPolygon& body, const Density& rho, std::size_t m, Point2 axis);

/// Partition by sequential cuts: cell k is the part of the remainder R_k on
/// the side a_k . x <= s_k that holds 1/m of the mass, a_k = (cos th_k,
/// sin th_k); the last cell is what remains.
struct CutPartition {
  std::vector<ConvexPolygon> cells;
  /// Chord endpoints of cut k.
  std::vector<std::pair<Point2, Point2>> chords;
  std::vector<Point2> normals;
};

/// nullopt when a cut leaves an empty part.
std::optional<CutPartition> cut_partition(const ConvexPolygon& body, const Density& rho,
                                          std::span<const double> angles);

/// Sites whose equal-capacity power diagram reproduces the cut partition;
/// nullopt when a chord ends inside K on an earlier chord, which no power
/// diagram realizes.
std::optional<std::vector<Point2>> cut_sites(const ConvexPolygon& body, const CutPartition& cuts);

struct PartitionOptions {
  /// Stop when max_i |f_i - mean| <= tol_f * mean (or |f_i - target|).
  double tol_f = 1e-8;
  int restart_budget = 16;
  int max_iterations = 80;
  /// Cells below area_floor * area(K) / m reject the iterate.
  double area_floor = 1e-6;
  WeightSolveOptions weights{1e-12, 200, 40, kDefaultQuadratureOrder};
  std::uint64_t seed = 0;
  /// Initializers tried in order after any warm start; empty means the
  /// default list (Orbit, Lattice, Epicycle when m = 2^k, Strips), followed
  /// by one start from a solved cut partition and by screened chain and
  /// random starts alternating with perturbed ones up to the restart budget.
  std::vector<InitKind> inits;
  /// When set, the first start uses these sites and weights.
  std::vector<Point2> warm_sites;
  std::vector<double> warm_weights;
  /// When set (and warm_sites is empty), the first start is the cut
  /// partition with these m - 1 angles.
  std::vector<double> warm_angles;
  /// Index-matched anchors for stateful functionals.
  std::vector<Functional::State> warm_states;
  /// Whether to fall back to the initializer list when the warm start fails.
  bool cold_fallback = true;
  /// Drive every f_i to this value instead of to the common mean.
  std::optional<double> target;
};

struct PartitionResult {
  SiteConfig config;
  /// Nonempty when the cells are a cut partition with these angles that no
  /// power diagram realizes; config is then empty.
  std::vector<double> cut_angles;
  CellSet cells;
  std::vector<double> values;
  std::vector<Functional::State> states;
  double common_value = 0.0;
  /// max_i |f_i - common_value| / common_value.
  double max_deviation = 0.0;
  /// Largest relative mass deviation from mu(K)/m.
  double mass_error = 0.0;
  int iterations = 0;
  int starts = 0;
};

/// Throws NonConvergence (best max-deviation attached) when no start
/// reaches tol_f within the restart budget.
PartitionResult solve_partition(const ConvexPolygon& body, std::size_t m, const Functional& f,
                                const Density& rho, const PartitionOptions& options = {});

}  // namespace equipart
