#pragma once

/// @file recursive.hpp
/// General m by prime factorization m = p_1 ... p_n.
///
/// A level with prime p splits a body into p parts of equal mass whose
/// branch values (the common f-value of a solved sub-partition of the
/// remaining order) agree. p = 2 levels use the halving-line sweep; odd
/// levels run solve_partition with the branch value as the functional.
/// The branch value is a single tracked branch: evaluations are anchored at
/// nearby solved states and checked against a continuity budget.

#include <cstddef>
#include <deque>
#include <memory>
#include <span>
#include <vector>

#include "equipart/equalize_fn.hpp"
#include "equipart/partition_tree.hpp"
#include "equipart/sweep.hpp"

namespace equipart {

/// Prime factors of m, 2s first, then odd primes ascending: 12 -> {2, 2, 3}.
std::vector<int> prime_levels(std::size_t m);

struct RecursiveOptions {
  /// Options of every solve_partition call; tol_f applies at the top level
  /// and tightens by 100x per level of nesting (never below 1e-13).
  PartitionOptions partition;
  /// Sweep options; refine_tol tightens with nesting like tol_f.
  SweepOptions sweep;
  /// Continuity budget of a branch value anchored at a body at Hausdorff
  /// distance dH: 1e-6 |y| + continuity_factor * dH / diameter(C) * |y|.
  double continuity_factor = 50.0;
  std::size_t cache_size = 8;
  /// Level order of solve_general; empty means prime_levels(m).
  std::vector<int> levels;
  /// solve_general retries the other orders of the same primes (at most
  /// max_orders orders in total) when one fails.
  bool reorder = true;
  std::size_t max_orders = 6;
};

/// Solved partition of C into prod(levels) parts. `warm` (if given) must
/// already live in C's coordinates. Throws NonConvergence or
/// NoCrossingFound.
PartitionNode solve_node(const ConvexPolygon& body, std::span<const int> levels, const Functional& f,
                         const Density& rho, const RecursiveOptions& opts, const PartitionNode* warm = nullptr,
                         int depth = 0);

/// The branch value of order prod(levels) as a function of the body.
class BranchValueFn {
 public:
  BranchValueFn(std::vector<int> levels, Functional f, Density rho, RecursiveOptions opts, int depth = 0);

  /// Anchored at `anchor` (any nearby solved body) or, without one, at the
  /// nearest cached body within a quarter diameter. A result outside the
  /// continuity budget clears the cache and is re-solved cold.
  Functional::Result evaluate(const ConvexPolygon& body, const Functional::State& anchor = {});

  std::size_t order() const;

 private:
  Functional::State nearest(const ConvexPolygon& body) const;
  PartitionNode solve(const ConvexPolygon& body, const PartitionNode* warm) const;

  std::vector<int> levels_;
  Functional f_;
  Density rho_;
  RecursiveOptions opts_;
  int depth_;
  std::deque<Functional::State> cache_;
};

/// Stateful functional over a shared BranchValueFn; the states are the
/// solved PartitionNodes.
Functional branch_functional(std::vector<int> levels, const Functional& f, const Density& rho,
                             const RecursiveOptions& opts, int depth = 0);

/// Common f-value y of a solved m'-partition of C with its sub-partition.
Functional::Result branch_value(BranchValueFn& g, const ConvexPolygon& body);

struct PartitionTree {
  PartitionNode root;
  std::size_t m = 1;

  std::vector<const PartitionNode*> leaves() const { return root.leaves(); }
  std::vector<ConvexPolygon> cells() const;
};

PartitionTree solve_general(const ConvexPolygon& body, std::size_t m, const Functional& f, const Density& rho,
                            const RecursiveOptions& opts = {});

}  // namespace equipart
