#include "equipart/recursive.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace equipart {

std::vector<int> prime_levels(std::size_t m) {
  if (m == 0) throw std::invalid_argument("prime_levels: m must be positive");
  std::vector<int> twos, odd;
  while (m % 2 == 0) {
    twos.push_back(2);
    m /= 2;
  }
  for (std::size_t p = 3; p * p <= m; p += 2)
    while (m % p == 0) {
      odd.push_back(static_cast<int>(p));
      m /= p;
    }
  if (m > 1) odd.push_back(static_cast<int>(m));
  twos.insert(twos.end(), odd.begin(), odd.end());
  return twos;
}

namespace {

double level_tol(double base, int depth) { return std::max(base * std::pow(1e-2, depth), 1e-13); }

PartitionNode make_leaf(const ConvexPolygon& body, double value, double mass) {
  PartitionNode leaf(body);
  leaf.mass = mass;
  leaf.value = value;
  leaf.y = value;
  return leaf;
}

double mean_leaf_value(const PartitionNode& node) {
  double sum = 0.0;
  const auto leaves = node.leaves();
  for (const auto* leaf : leaves) sum += leaf->value;
  return sum / static_cast<double>(leaves.size());
}

PartitionNode solve_power_level(const ConvexPolygon& body, int p, std::span<const int> rest, const Functional& f,
                                const Density& rho, const RecursiveOptions& opts, const PartitionNode* warm,
                                int depth) {
  PartitionOptions po = opts.partition;
  po.tol_f = level_tol(opts.partition.tol_f, depth);
  const Functional g = rest.empty() ? f : branch_functional({rest.begin(), rest.end()}, f, rho, opts, depth + 1);
  if (warm && warm->children.size() == static_cast<std::size_t>(p)) {
    if (const auto* ps = std::get_if<PowerSplit>(&warm->split)) {
      po.warm_sites = ps->config.sites();
      po.warm_weights = ps->config.weights();
      if (!rest.empty())
        for (const auto& c : warm->children) po.warm_states.push_back(std::make_shared<const PartitionNode>(c));
    } else if (const auto* cs = std::get_if<CutSplit>(&warm->split)) {
      po.warm_angles = cs->angles;
      if (!rest.empty())
        for (const auto& c : warm->children) po.warm_states.push_back(std::make_shared<const PartitionNode>(c));
    }
  }
  PartitionResult res = solve_partition(body, static_cast<std::size_t>(p), g, rho, po);

  PartitionNode node(body);
  node.mass = res.cells.total_mass();
  node.prime = p;
  node.y = res.common_value;
  for (std::size_t i = 0; i < res.cells.size(); ++i) {
    if (res.states[i]) {
      node.children.push_back(*res.states[i]);
    } else {
      node.children.push_back(make_leaf(*res.cells.cells[i], res.values[i], res.cells.masses[i]));
    }
  }
  if (res.cut_angles.empty()) {
    node.split = PowerSplit{std::move(res.config)};
  } else {
    node.split = CutSplit{std::move(res.cut_angles)};
  }
  node.value = mean_leaf_value(node);
  return node;
}

PartitionNode solve_line_level(const ConvexPolygon& body, std::span<const int> rest, const Functional& f,
                               const Density& rho, const RecursiveOptions& opts, const PartitionNode* warm,
                               int depth) {
  const Functional g = branch_functional({rest.begin(), rest.end()}, f, rho, opts, depth + 1);
  HalfSolver solver(body, rho, g);
  const double tol = level_tol(opts.sweep.refine_tol, depth);
  std::optional<SplitEval> root;
  if (warm && warm->children.size() == 2) {
    if (const auto* ls = std::get_if<LineSplit>(&warm->split)) {
      const auto& c0 = warm->children[0];
      const auto& c1 = warm->children[1];
      const Anchor left{std::make_shared<const PartitionNode>(c0), chord_frame(ls->a, ls->b, area(c0.body))};
      const Anchor right{std::make_shared<const PartitionNode>(c1), chord_frame(ls->b, ls->a, area(c1.body))};
      solver.set_references(left, right);
      root = local_crossing(solver, ls->angle, tol);
      if (!root) {
        solver.set_references(left, right);
        try {
          root = scan_crossing(solver, opts.sweep.grid, tol, true);
        } catch (const NoCrossingFound&) {
        }
      }
    }
  }
  if (!root) {
    solver.adopt_reference(0.0);
    root = scan_crossing(solver, opts.sweep.grid, tol, true);
  }
  return assemble_split(body, rho, *root);
}

}  // namespace

PartitionNode solve_node(const ConvexPolygon& body, std::span<const int> levels, const Functional& f,
                         const Density& rho, const RecursiveOptions& opts, const PartitionNode* warm, int depth) {
  if (levels.empty()) return make_leaf(body, f(body), integrate(body, rho));
  const int p = levels[0];
  const auto rest = levels.subspan(1);
  if (p == 2 && !rest.empty()) return solve_line_level(body, rest, f, rho, opts, warm, depth);
  return solve_power_level(body, p, rest, f, rho, opts, warm, depth);
}

BranchValueFn::BranchValueFn(std::vector<int> levels, Functional f, Density rho, RecursiveOptions opts, int depth)
    : levels_(std::move(levels)), f_(std::move(f)), rho_(std::move(rho)), opts_(std::move(opts)), depth_(depth) {}

std::size_t BranchValueFn::order() const {
  std::size_t m = 1;
  for (int p : levels_) m *= static_cast<std::size_t>(p);
  return m;
}

Functional::State BranchValueFn::nearest(const ConvexPolygon& body) const {
  Functional::State best;
  double best_d = 0.25 * diameter(body);
  for (const auto& s : cache_) {
    const double d = hausdorff(s->body, body);
    if (d <= best_d) {
      best_d = d;
      best = s;
    }
  }
  return best;
}

PartitionNode BranchValueFn::solve(const ConvexPolygon& body, const PartitionNode* warm) const {
  return solve_node(body, levels_, f_, rho_, opts_, warm, depth_);
}

Functional::Result BranchValueFn::evaluate(const ConvexPolygon& body, const Functional::State& anchor) {
  const Functional::State base = anchor ? anchor : nearest(body);
  std::optional<PartitionNode> moved;
  double dh = 0.0;
  if (base) {
    moved = transport(*base, moment_frame(base->body), moment_frame(body));
    dh = hausdorff(base->body, body);
  }
  auto attempt = [&]() -> PartitionNode {
    try {
      return solve(body, moved ? &*moved : nullptr);
    } catch (const NonConvergence&) {
      if (!moved) throw;
    } catch (const NoCrossingFound&) {
      if (!moved) throw;
    }
    return solve(body, nullptr);
  };
  PartitionNode node = attempt();
  if (base) {
    const double y = std::abs(node.y);
    const double budget = 1e-6 * y + opts_.continuity_factor * dh / diameter(body) * y;
    if (std::abs(node.y - base->y) > budget) {
      cache_.clear();
      node = solve(body, nullptr);
    }
  }
  auto state = std::make_shared<const PartitionNode>(std::move(node));
  cache_.push_front(state);
  while (cache_.size() > opts_.cache_size) cache_.pop_back();
  return {state->y, state};
}

Functional branch_functional(std::vector<int> levels, const Functional& f, const Density& rho,
                             const RecursiveOptions& opts, int depth) {
  auto g = std::make_shared<BranchValueFn>(std::move(levels), f, rho, opts, depth);
  return Functional::stateful("branch:" + f.name(), [g](const ConvexPolygon& body, const Functional::State& anchor) {
    return g->evaluate(body, anchor);
  });
}

Functional::Result branch_value(BranchValueFn& g, const ConvexPolygon& body) { return g.evaluate(body); }

std::vector<ConvexPolygon> PartitionTree::cells() const {
  std::vector<ConvexPolygon> out;
  for (const auto* leaf : leaves()) out.push_back(leaf->body);
  return out;
}

PartitionTree solve_general(const ConvexPolygon& body, std::size_t m, const Functional& f, const Density& rho,
                            const RecursiveOptions& opts) {
  std::vector<int> levels = opts.levels.empty() ? prime_levels(m) : opts.levels;
  std::size_t product = 1;
  for (int p : levels) product *= static_cast<std::size_t>(p);
  if (product != m) throw std::invalid_argument("solve_general: levels do not multiply to m");
  if (!opts.reorder) return PartitionTree{solve_node(body, levels, f, rho, opts), m};

  // The given order first, then the other distinct orders in lexicographic
  // order; the first failure is reported if none succeeds.
  std::vector<std::vector<int>> orders{levels};
  std::vector<int> perm = levels;
  std::sort(perm.begin(), perm.end());
  do {
    if (perm != levels && orders.size() < opts.max_orders) orders.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::exception_ptr first;
  for (const auto& order : orders) {
    try {
      return PartitionTree{solve_node(body, order, f, rho, opts), m};
    } catch (const NonConvergence&) {
      if (!first) first = std::current_exception();
    } catch (const NoCrossingFound&) {
      if (!first) first = std::current_exception();
    }
  }
  std::rethrow_exception(first);
}

}  // namespace equipart
