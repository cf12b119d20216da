#pragma once

/// @file sweep.hpp
/// Halving-line sweep for m = 2 m'.
///
/// For every direction t the halving line splits K into a left half L_t
/// and a right half M_t = L_{t+pi}. Solving the m'-problem on each half
/// gives the branch curves G_L(t) and G_M(t) = G_L(t + pi); their
/// difference d(t) changes sign between t and t + pi, so a crossing exists
/// on every half turn.
///
/// The sub-problem is a (usually stateful) Functional on halves. Every half
/// is solved from one reference solution transported into the half's chord
/// frame, which makes y a function of the half alone and keeps the
/// interchange relation exact.

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "equipart/functional.hpp"
#include "equipart/partition_tree.hpp"

namespace equipart {

/// K cut along the directed line through chord [a, b] with direction
/// (cos t, sin t); L lies to the left, M to the right.
struct HalfPair {
  double t = 0.0;
  ConvexPolygon L;
  ConvexPolygon M;
  Point2 a;
  Point2 b;
};

/// Directions are quantized to 2^-40 rad modulo pi, so halving_line(t + pi)
/// returns exactly the halves of halving_line(t), swapped.
HalfPair halving_line(const ConvexPolygon& body, double t, const Density& rho);

/// Hausdorff distance between L_{t+pi} and M_t.
double interchange_check(const ConvexPolygon& body, double t, const Density& rho);

enum class Side { L, M };

struct BranchSample {
  double t = 0.0;
  double y = 0.0;
  Functional::State state;
};

struct BranchCurve {
  Side side = Side::L;
  std::vector<BranchSample> samples;
  bool continuous = true;

  double max_jump() const;
  double range() const;
};

class BranchBroken : public std::runtime_error {
 public:
  BranchBroken(const std::string& what, BranchCurve curve)
      : std::runtime_error(what), curve_(std::move(curve)) {}
  const BranchCurve& curve() const noexcept { return curve_; }

 private:
  BranchCurve curve_;
};

class NoCrossingFound : public std::runtime_error {
 public:
  NoCrossingFound(const std::string& what, std::vector<std::pair<double, double>> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  /// (t, d(t)) over the scanned grid.
  const std::vector<std::pair<double, double>>& trace() const noexcept { return trace_; }

 private:
  std::vector<std::pair<double, double>> trace_;
};

struct SweepOptions {
  /// Uniform samples over [0, 2 pi).
  int grid = 64;
  /// Adaptive refinement stops at 2 pi / min_step_divisor.
  int min_step_divisor = 4096;
  /// Crossing accepted when |G_L - G_M| <= refine_tol * y.
  double refine_tol = 1e-9;
  /// Continuity budget: max(jump_fraction * range, 1e-7 * |mean y|).
  double jump_fraction = 0.05;
};

/// Both halves of one halving line with their solved sub-problems.
struct SplitEval {
  HalfPair halves;
  Functional::Result left;
  Functional::Result right;

  double d() const { return left.value - right.value; }
  double y() const { return 0.5 * (left.value + right.value); }
};

/// A solved sub-problem together with the chord frame it was solved in.
struct Anchor {
  Functional::State state;
  Frame frame;
};

/// Solves the sub-problem on halves of K, anchored at references.
class HalfSolver {
 public:
  HalfSolver(const ConvexPolygon& body, const Density& rho, Functional sub);

  /// Cold-solves L_t and uses it as the reference of both sides.
  void adopt_reference(double t);
  void set_references(Anchor left, Anchor right);

  /// Solves `half` lying to the left of chord a -> b.
  Functional::Result solve(const ConvexPolygon& half, Point2 a, Point2 b, Side side) const;
  SplitEval split(double t) const;
  Functional::Result solve_side(double t, Side side) const;

  const ConvexPolygon& body() const noexcept { return body_; }
  const Density& density() const noexcept { return rho_; }

 private:
  const ConvexPolygon& body_;
  const Density& rho_;
  Functional sub_;
  Anchor left_;
  Anchor right_;
};

/// G_side sampled on `grid` uniform angles over [0, 2 pi), refined where
/// neighbouring samples jump by more than the continuity budget. Throws
/// BranchBroken (carrying the curve) if refinement reaches the floor step.
BranchCurve branch_curve(const HalfSolver& solver, Side side, const SweepOptions& opts = {});

/// Solves the missing angles so that both curves share one grid.
void align_curves(const HalfSolver& solver, BranchCurve& gL, BranchCurve& gM);

struct Crossing {
  double t = 0.0;
  double y = 0.0;
  double d = 0.0;
};

/// (G_L(t), G_M(t)) from fresh sub-problem solves.
using CrossingEvaluator = std::function<std::pair<double, double>(double)>;

/// Scans the common grid in increasing t. The first sample with
/// |d| <= refine_tol * yscale is returned; otherwise each sign change of d
/// (including the wrap-around to t + 2 pi) is refined by TOMS 748 on
/// `evaluate` until |d| <= refine_tol * yscale. Without an evaluator the
/// first bracket is resolved by linear interpolation. yscale is the mean
/// |y| over both curves. Throws NoCrossingFound with the d(t) trace.
Crossing find_crossing(const BranchCurve& gL, const BranchCurve& gM, const CrossingEvaluator& evaluate,
                       double refine_tol);

/// Refines a sign change of d on [ea.t, eb.t]; nullopt when the bracket
/// closes on a jump instead of a root.
std::optional<SplitEval> refine_bracket(const HalfSolver& solver, const SplitEval& ea, const SplitEval& eb,
                                        double tol);

/// Lazy scan of d in steps of 2 pi / grid. Without `chain` the solver must
/// hold a single reference for both sides and half a turn suffices
/// (d(pi) = -d(0) closes the last bracket). With `chain` every step is
/// anchored at the halves solved one step earlier and the scan runs over a
/// full turn. Throws NoCrossingFound with the d(t) trace.
SplitEval scan_crossing(HalfSolver& solver, int grid, double tol, bool chain = false);

/// Search outward from t0 for a nearby root of d, each step anchored at the
/// previous one; nullopt when none is found within half a turn.
std::optional<SplitEval> local_crossing(HalfSolver& solver, double t0, double tol);

/// Node of K split at the crossing; children are the solved states, or
/// leaves when the sub-problem is a plain functional.
PartitionNode assemble_split(const ConvexPolygon& body, const Density& rho, const SplitEval& e);

struct SweepResult {
  BranchCurve gL;
  BranchCurve gM;
  Crossing crossing;
  PartitionNode root;
};

/// Full sweep: both curves over [0, 2 pi), crossing, assembled partition.
/// Broken curves are kept (continuous = false); only the crossing has to
/// verify.
SweepResult sweep_partition(const ConvexPolygon& body, const Density& rho, const Functional& sub,
                            const SweepOptions& opts = {});

}  // namespace equipart
