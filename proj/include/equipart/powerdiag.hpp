#pragma once

/// @file powerdiag.hpp
/// Power (weighted Voronoi) diagrams restricted to a convex body.
///
/// Cell i is {x : |x - x_i|^2 - w_i <= |x - x_j|^2 - w_j for all j}, so a
/// larger weight grows its cell. Cells are computed by direct half-plane
/// clipping of K; the clip order is canonical (sorted by site, then
/// weight) so permuting the configuration permutes the cells bit-for-bit.

#include <optional>
#include <span>
#include <vector>

#include "equipart/geom2d.hpp"

namespace equipart {

/// Pairwise distinct sites with weights in the zero-mean gauge.
class SiteConfig {
 public:
  SiteConfig() = default;
  /// Throws DegenerateConfig on size mismatch or coincident sites. Weights
  /// are shifted to zero mean (the diagram is invariant under that shift).
  SiteConfig(std::vector<Point2> sites, std::vector<double> weights);
  explicit SiteConfig(std::vector<Point2> sites);

  const std::vector<Point2>& sites() const noexcept { return sites_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return sites_.size(); }

  double min_separation() const;
  /// new[i] = old[perm[i]].
  SiteConfig permuted(std::span<const std::size_t> perm) const;

 private:
  std::vector<Point2> sites_;
  std::vector<double> weights_;
};

/// Half-plane of points at least as close (in power distance) to site i as
/// to site j, tagged with j.
HalfPlane power_bisector(const SiteConfig& cfg, std::size_t i, std::size_t j);

std::optional<ConvexPolygon> power_cell(const ConvexPolygon& body, const SiteConfig& cfg,
                                        std::size_t i);

struct CellSet {
  std::vector<std::optional<ConvexPolygon>> cells;
  std::vector<double> masses;

  std::size_t size() const noexcept { return cells.size(); }
  double total_mass() const;
  std::size_t empty_count() const;
};

CellSet cell_set(const ConvexPolygon& body, const SiteConfig& cfg, const Density& rho,
                 int order = kDefaultQuadratureOrder);

}  // namespace equipart
