#include "equipart/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <boost/math/tools/roots.hpp>

namespace equipart {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool opposite(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

}  // namespace

HalfPair halving_line(const ConvexPolygon& body, double t, const Density& rho) {
  // The line is computed for the undirected angle in [0, pi), quantized so
  // that t and t + pi give bitwise the same halves with L and M swapped.
  double q = std::fmod(t, kTwoPi);
  if (q < 0.0) q += kTwoPi;
  const bool flip = q >= std::numbers::pi;
  if (flip) q -= std::numbers::pi;
  q = std::ldexp(std::nearbyint(std::ldexp(q, 40)), -40);
  const Point2 u{std::cos(q), std::sin(q)};
  const Point2 n{-u.y, u.x};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Point2 v : body.vertices()) {
    lo = std::min(lo, dot(n, v));
    hi = std::max(hi, dot(n, v));
  }
  const double half = 0.5 * integrate(body, rho);
  auto excess = [&](double s) {
    const auto part = clip_halfplane(body, n, s);
    return (part ? integrate(*part, rho) : 0.0) - half;
  };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(excess, lo, hi, -half, half,
                                                   boost::math::tools::eps_tolerance<double>(53), iters);
  const double s = 0.5 * (r.first + r.second);

  auto m_half = clip_halfplane(body, n, s);
  auto l_half = clip_halfplane(body, -n, -s);
  if (!m_half || !l_half) throw GeometryError("halving line produced an empty half");

  const auto& v = body.vertices();
  double amin = std::numeric_limits<double>::infinity(), amax = -amin;
  Point2 a, b;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point2 p = v[k], q = v[(k + 1) % v.size()];
    const double dp = dot(n, p) - s, dq = dot(n, q) - s;
    if ((dp > 0.0 && dq > 0.0) || (dp < 0.0 && dq < 0.0) || dp == dq) continue;
    const Point2 x = p + (dp / (dp - dq)) * (q - p);
    const double along = dot(u, x);
    if (along < amin) {
      amin = along;
      a = x;
    }
    if (along > amax) {
      amax = along;
      b = x;
    }
  }
  if (flip) return HalfPair{t, std::move(*m_half), std::move(*l_half), b, a};
  return HalfPair{t, std::move(*l_half), std::move(*m_half), a, b};
}

double interchange_check(const ConvexPolygon& body, double t, const Density& rho) {
  return hausdorff(halving_line(body, t + std::numbers::pi, rho).L, halving_line(body, t, rho).M);
}

double BranchCurve::max_jump() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k)
    worst = std::max(worst, std::abs(samples[(k + 1) % samples.size()].y - samples[k].y));
  return worst;
}

double BranchCurve::range() const {
  if (samples.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                            [](const auto& x, const auto& y) { return x.y < y.y; });
  return hi->y - lo->y;
}

HalfSolver::HalfSolver(const ConvexPolygon& body, const Density& rho, Functional sub)
    : body_(body), rho_(rho), sub_(std::move(sub)) {}

void HalfSolver::adopt_reference(double t) {
  const HalfPair h = halving_line(body_, t, rho_);
  auto r = sub_.evaluate(h.L, nullptr);
  left_ = Anchor{r.state, chord_frame(h.a, h.b, area(h.L))};
  right_ = left_;
}

void HalfSolver::set_references(Anchor left, Anchor right) {
  left_ = std::move(left);
  right_ = std::move(right);
}

Functional::Result HalfSolver::solve(const ConvexPolygon& half, Point2 a, Point2 b, Side side) const {
  const Anchor& ref = side == Side::L ? left_ : right_;
  if (!ref.state) return sub_.evaluate(half, nullptr);
  auto moved = std::make_shared<const PartitionNode>(transport(*ref.state, ref.frame, chord_frame(a, b, area(half))));
  return sub_.evaluate(half, moved);
}

SplitEval HalfSolver::split(double t) const {
  HalfPair h = halving_line(body_, t, rho_);
  auto left = solve(h.L, h.a, h.b, Side::L);
  auto right = solve(h.M, h.b, h.a, Side::M);
  return SplitEval{std::move(h), std::move(left), std::move(right)};
}

Functional::Result HalfSolver::solve_side(double t, Side side) const {
  const HalfPair h = halving_line(body_, t, rho_);
  return side == Side::L ? solve(h.L, h.a, h.b, Side::L) : solve(h.M, h.b, h.a, Side::M);
}

BranchCurve branch_curve(const HalfSolver& solver, Side side, const SweepOptions& opts) {
  if (opts.grid < 1) throw std::invalid_argument("branch_curve: grid must be positive");
  BranchCurve curve;
  curve.side = side;
  for (int k = 0; k < opts.grid; ++k) {
    const double t = kTwoPi * k / opts.grid;
    auto r = solver.solve_side(t, side);
    curve.samples.push_back({t, r.value, std::move(r.state)});
  }
  const double floor_step = kTwoPi / opts.min_step_divisor;
  for (;;) {
    double mean = 0.0;
    for (const auto& s : curve.samples) mean += std::abs(s.y);
    mean /= static_cast<double>(curve.samples.size());
    const double budget = std::max(opts.jump_fraction * curve.range(), 1e-7 * mean);

    std::vector<BranchSample> refined;
    bool inserted = false, stuck = false;
    const std::size_t n = curve.samples.size();
    for (std::size_t k = 0; k < n; ++k) {
      refined.push_back(curve.samples[k]);
      const auto& s0 = curve.samples[k];
      const auto& s1 = curve.samples[(k + 1) % n];
      const double t1 = k + 1 < n ? s1.t : s1.t + kTwoPi;
      if (std::abs(s1.y - s0.y) <= budget) continue;
      if (t1 - s0.t <= floor_step * (1.0 + 1e-9)) {
        stuck = true;
        continue;
      }
      const double tm = 0.5 * (s0.t + t1);
      auto r = solver.solve_side(tm, side);
      refined.push_back({tm, r.value, std::move(r.state)});
      inserted = true;
    }
    curve.samples = std::move(refined);
    if (!inserted) {
      if (stuck) {
        curve.continuous = false;
        throw BranchBroken("branch curve jumps at the floor step", std::move(curve));
      }
      return curve;
    }
  }
}

void align_curves(const HalfSolver& solver, BranchCurve& gL, BranchCurve& gM) {
  auto fill = [&](BranchCurve& dst, const BranchCurve& src) {
    std::map<double, BranchSample> merged;
    for (const auto& s : dst.samples) merged.emplace(s.t, s);
    for (const auto& s : src.samples)
      if (!merged.count(s.t)) {
        auto r = solver.solve_side(s.t, dst.side);
        merged.emplace(s.t, BranchSample{s.t, r.value, std::move(r.state)});
      }
    dst.samples.clear();
    for (auto& [t, s] : merged) dst.samples.push_back(std::move(s));
  };
  fill(gL, gM);
  fill(gM, gL);
}

Crossing find_crossing(const BranchCurve& gL, const BranchCurve& gM, const CrossingEvaluator& evaluate,
                       double refine_tol) {
  const std::size_t n = gL.samples.size();
  if (n == 0 || gM.samples.size() != n) throw std::invalid_argument("find_crossing: curves need a common grid");
  std::vector<std::pair<double, double>> trace;
  double yscale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (gL.samples[k].t != gM.samples[k].t) throw std::invalid_argument("find_crossing: curves need a common grid");
    trace.emplace_back(gL.samples[k].t, gL.samples[k].y - gM.samples[k].y);
    yscale += 0.5 * (std::abs(gL.samples[k].y) + std::abs(gM.samples[k].y));
  }
  yscale /= static_cast<double>(n);
  const double tol = refine_tol * yscale;

  for (std::size_t k = 0; k < n; ++k) {
    const auto [t0, d0] = trace[k];
    if (std::abs(d0) <= tol) return {t0, 0.5 * (gL.samples[k].y + gM.samples[k].y), d0};
    const double t1 = k + 1 < n ? trace[k + 1].first : trace[0].first + kTwoPi;
    const double d1 = trace[(k + 1) % n].second;
    if (!opposite(d0, d1)) continue;
    if (!evaluate) {
      const double t = t0 + (t1 - t0) * d0 / (d0 - d1);
      const double w = (t - t0) / (t1 - t0);
      const double y0 = 0.5 * (gL.samples[k].y + gM.samples[k].y);
      const double y1 = 0.5 * (gL.samples[(k + 1) % n].y + gM.samples[(k + 1) % n].y);
      return {std::fmod(t, kTwoPi), y0 + w * (y1 - y0), 0.0};
    }
    Crossing best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    auto d = [&](double t) {
      const auto [yl, ym] = evaluate(std::fmod(t, kTwoPi));
      if (std::abs(yl - ym) < std::abs(best.d)) best = {std::fmod(t, kTwoPi), 0.5 * (yl + ym), yl - ym};
      return yl - ym;
    };
    std::uintmax_t iters = 60;
    auto stop = [&](double a, double b) { return std::abs(best.d) <= tol || b - a <= 1e-13; };
    try {
      boost::math::tools::toms748_solve(d, t0, t1, d0, d1, stop, iters);
    } catch (const std::exception&) {
    }
    if (std::abs(best.d) <= tol) return best;
  }
  throw NoCrossingFound("no crossing of the branch curves", std::move(trace));
}

std::optional<SplitEval> refine_bracket(const HalfSolver& solver, const SplitEval& ea, const SplitEval& eb,
                                        double tol) {
  const SplitEval* lo = &ea;
  const SplitEval* hi = &eb;
  if (lo->halves.t > hi->halves.t) std::swap(lo, hi);
  std::optional<SplitEval> best;
  auto d = [&](double t) {
    SplitEval e = solver.split(t);
    const double v = e.d();
    if (!best || std::abs(v) < std::abs(best->d())) best = std::move(e);
    return v;
  };
  auto small = [&] { return best && std::abs(best->d()) <= tol * std::abs(best->y()); };
  // A bracket that narrows to 1e-6 with |d| still above 1e-4 |y| closes on a jump.
  auto jump = [&](double a, double b) { return b - a <= 1e-6 && best && std::abs(best->d()) > 1e-4 * std::abs(best->y()); };
  auto done = [&](double a, double b) { return small() || jump(a, b) || b - a <= 1e-13; };
  std::uintmax_t iters = 60;
  try {
    boost::math::tools::toms748_solve(d, lo->halves.t, hi->halves.t, lo->d(), hi->d(), done, iters);
  } catch (const std::exception&) {
  }
  if (small()) return best;
  return std::nullopt;
}

namespace {

bool small_enough(const SplitEval& e, double tol) { return std::abs(e.d()) <= tol * std::abs(e.y()); }

// Anchors every later solve at the halves solved in `e`.
void chain_to(HalfSolver& solver, const SplitEval& e) {
  if (!e.left.state || !e.right.state) return;
  solver.set_references(Anchor{e.left.state, chord_frame(e.halves.a, e.halves.b, area(e.halves.L))},
                        Anchor{e.right.state, chord_frame(e.halves.b, e.halves.a, area(e.halves.M))});
}

}  // namespace

SplitEval scan_crossing(HalfSolver& solver, int grid, double tol, bool chain) {
  if (grid < 2) throw std::invalid_argument("scan_crossing: grid must be at least 2");
  const int steps = chain ? grid : grid / 2;
  std::vector<std::pair<double, double>> trace;
  SplitEval prev = solver.split(0.0);
  trace.emplace_back(0.0, prev.d());
  if (small_enough(prev, tol)) return prev;
  for (int k = 1; k <= steps; ++k) {
    if (chain) chain_to(solver, prev);
    const double t = kTwoPi * k / grid;
    SplitEval cur = solver.split(t);
    trace.emplace_back(t, cur.d());
    if (small_enough(cur, tol)) return cur;
    if (opposite(prev.d(), cur.d())) {
      if (auto root = refine_bracket(solver, prev, cur, tol)) return std::move(*root);
    }
    prev = std::move(cur);
  }
  throw NoCrossingFound(chain ? "no crossing over a full turn" : "no crossing over half a turn", std::move(trace));
}

std::optional<SplitEval> local_crossing(HalfSolver& solver, double t0, double tol) {
  SplitEval e0 = solver.split(t0);
  if (small_enough(e0, tol)) return e0;
  const double h = 1e-3;
  SplitEval e1 = solver.split(t0 + h);
  if (small_enough(e1, tol)) return e1;
  if (opposite(e0.d(), e1.d())) return refine_bracket(solver, e0, e1, tol);

  const double slope = (e1.d() - e0.d()) / h;
  const double guess = slope != 0.0 ? -e0.d() / slope : h;
  const double dir = guess >= 0.0 ? 1.0 : -1.0;
  double span = std::clamp(1.5 * std::abs(guess), 2.0 * h, std::numbers::pi / 8.0);
  SplitEval prev = dir > 0.0 ? std::move(e1) : std::move(e0);
  while (span <= std::numbers::pi + 2.0 * h) {
    chain_to(solver, prev);
    SplitEval cur = solver.split(t0 + dir * span);
    if (small_enough(cur, tol)) return cur;
    if (opposite(prev.d(), cur.d())) return refine_bracket(solver, prev, cur, tol);
    prev = std::move(cur);
    span *= 2.0;
  }
  return std::nullopt;
}

PartitionNode assemble_split(const ConvexPolygon& body, const Density& rho, const SplitEval& e) {
  PartitionNode node(body);
  node.mass = integrate(body, rho);
  node.prime = 2;
  node.y = e.y();
  node.split = LineSplit{e.halves.t, e.halves.a, e.halves.b};
  auto child = [&](const ConvexPolygon& half, const Functional::Result& r) {
    if (r.state) return *r.state;
    PartitionNode leaf(half);
    leaf.mass = integrate(half, rho);
    leaf.value = r.value;
    leaf.y = r.value;
    return leaf;
  };
  node.children.push_back(child(e.halves.L, e.left));
  node.children.push_back(child(e.halves.M, e.right));
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto* leaf : node.leaves()) {
    sum += leaf->value;
    ++count;
  }
  node.value = sum / static_cast<double>(count);
  return node;
}

SweepResult sweep_partition(const ConvexPolygon& body, const Density& rho, const Functional& sub,
                            const SweepOptions& opts) {
  HalfSolver solver(body, rho, sub);
  solver.adopt_reference(0.0);
  auto curve = [&](Side side) {
    try {
      return branch_curve(solver, side, opts);
    } catch (const BranchBroken& e) {
      return e.curve();
    }
  };
  BranchCurve gL = curve(Side::L);
  BranchCurve gM = curve(Side::M);
  align_curves(solver, gL, gM);

  std::map<double, SplitEval> memo;
  auto evaluate = [&](double t) {
    SplitEval e = solver.split(t);
    const std::pair<double, double> out{e.left.value, e.right.value};
    memo.insert_or_assign(t, std::move(e));
    return out;
  };
  const Crossing c = find_crossing(gL, gM, evaluate, opts.refine_tol);
  auto it = memo.find(c.t);
  SplitEval at = it != memo.end() ? std::move(it->second) : solver.split(c.t);
  PartitionNode root = assemble_split(body, rho, at);
  return SweepResult{std::move(gL), std::move(gM), c, std::move(root)};
}

}  // namespace equipart
