#pragma once

/// @file partition_tree.hpp
/// Hierarchical partitions. A node is split either by a power diagram
/// (odd prime levels and direct solves) or by a halving line (p = 2 levels
/// of the recursion); leaves are the final parts. The same structure is the
/// warm-start state of the solvers: transporting a node by an affine map
/// gives an initial guess for a nearby body.

#include <memory>
#include <variant>
#include <vector>

#include <json.hpp>

#include "equipart/powerdiag.hpp"

namespace equipart {

struct PowerSplit {
  SiteConfig config;
};

/// Sequential cuts: children[k] is the part of what children[0..k-1] leave
/// on the side (cos a_k, sin a_k) . x <= s_k; the last child is the rest.
struct CutSplit {
  std::vector<double> angles;
};

/// Directed halving line through chord [a, b]; children[0] lies to the
/// left of a -> b, children[1] to the right.
struct LineSplit {
  double angle = 0.0;
  Point2 a;
  Point2 b;
};

struct PartitionNode {
  explicit PartitionNode(ConvexPolygon b) : body(std::move(b)) {}

  ConvexPolygon body;
  double mass = 0.0;
  /// f(body) for leaves; for internal nodes the mean leaf value.
  double value = 0.0;
  /// Number of children (the prime of this level), 0 for a leaf.
  int prime = 0;
  /// Common value achieved by the leaves below this node.
  double y = 0.0;
  std::variant<std::monostate, PowerSplit, LineSplit, CutSplit> split;
  std::vector<PartitionNode> children;

  bool is_leaf() const noexcept { return children.empty(); }
  std::vector<const PartitionNode*> leaves() const;
  std::size_t depth() const;
};

/// Affine frame: origin plus two (not necessarily orthonormal) axes.
struct Frame {
  Point2 origin;
  Point2 e1{1.0, 0.0};
  Point2 e2{0.0, 1.0};

  Point2 to_local(Point2 p) const;
  Point2 to_world(Point2 q) const;
};

/// Centroid origin; axes are the columns of the symmetric square root of
/// the (uniform) covariance matrix. Varies smoothly with the body, so the
/// map between the frames of two nearby bodies is close to the identity.
Frame moment_frame(const ConvexPolygon& body);

/// Frame of a body lying to the left of the directed chord a -> b: origin
/// at the chord midpoint, e1 = (b - a) / 2, e2 normal to the chord with
/// length area / |b - a|.
Frame chord_frame(Point2 a, Point2 b, double body_area);

/// Maps every coordinate of `node` (bodies, sites, chords) from frame `from`
/// to frame `to`. Weights are scaled by the area ratio of the frames.
PartitionNode transport(const PartitionNode& node, const Frame& from, const Frame& to);

nlohmann::json to_json(const PartitionNode& node);
nlohmann::json polygon_to_json(const ConvexPolygon& p);

}  // namespace equipart
