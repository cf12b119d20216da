#include "equipart/powerdiag.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

namespace equipart {

SiteConfig::SiteConfig(std::vector<Point2> sites, std::vector<double> weights)
    : sites_(std::move(sites)), weights_(std::move(weights)) {
  if (sites_.size() != weights_.size()) throw DegenerateConfig("site and weight counts differ");
  if (sites_.empty()) throw DegenerateConfig("empty site configuration");
  if (sites_.size() > 1 && !(min_separation() > 0.0)) throw DegenerateConfig("coincident sites");
  // Summed in sorted order so the gauge does not depend on the site order.
  std::vector<double> sorted = weights_;
  std::sort(sorted.begin(), sorted.end());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  for (double& w : weights_) w -= mean;
}

SiteConfig::SiteConfig(std::vector<Point2> sites)
    : SiteConfig(sites, std::vector<double>(sites.size(), 0.0)) {}

double SiteConfig::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sites_.size(); ++i)
    for (std::size_t j = i + 1; j < sites_.size(); ++j) best = std::min(best, distance(sites_[i], sites_[j]));
  return best;
}

SiteConfig SiteConfig::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != sites_.size()) throw DegenerateConfig("permutation size differs from the site count");
  SiteConfig out;
  for (std::size_t k : perm) {
    out.sites_.push_back(sites_.at(k));
    out.weights_.push_back(weights_.at(k));
  }
  return out;
}

HalfPlane power_bisector(const SiteConfig& cfg, std::size_t i, std::size_t j) {
  const Point2 xi = cfg.sites()[i], xj = cfg.sites()[j];
  const Point2 diff = xj - xi;
  // 2 (x_j - x_i) . x <= |x_j|^2 - |x_i|^2 + w_i - w_j
  const double offset = dot(diff, xj + xi) + cfg.weights()[i] - cfg.weights()[j];
  return HalfPlane{2.0 * diff, offset, static_cast<int>(j)};
}

std::optional<ConvexPolygon> power_cell(const ConvexPolygon& body, const SiteConfig& cfg,
                                        std::size_t i) {
  const auto& s = cfg.sites();
  const auto& w = cfg.weights();
  std::vector<std::size_t> others;
  others.reserve(s.size());
  for (std::size_t j = 0; j < s.size(); ++j)
    if (j != i) others.push_back(j);
  std::sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(s[a].x, s[a].y, w[a]) < std::tie(s[b].x, s[b].y, w[b]);
  });
  // Tags of the body (from an enclosing diagram) must not alias site indices.
  const auto& tags = body.edge_tags();
  std::optional<ConvexPolygon> cell =
      std::all_of(tags.begin(), tags.end(), [](int t) { return t < 0; }) ? body : body.untagged();
  for (std::size_t j : others) {
    cell = clip_halfplane(*cell, power_bisector(cfg, i, j));
    if (!cell) break;
  }
  return cell;
}

double CellSet::total_mass() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }

std::size_t CellSet::empty_count() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return !c; }));
}

CellSet cell_set(const ConvexPolygon& body, const SiteConfig& cfg, const Density& rho, int order) {
  CellSet out;
  out.cells.reserve(cfg.size());
  out.masses.reserve(cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    out.cells.push_back(power_cell(body, cfg, i));
    out.masses.push_back(out.cells.back() ? integrate(*out.cells.back(), rho, order) : 0.0);
  }
  return out;
}

}  // namespace equipart
