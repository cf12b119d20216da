#include "equipart/equalize_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

namespace equipart {

double DiscrepancyVector::max_abs() const {
  double worst = 0.0;
  for (double c : components) worst = std::max(worst, std::abs(c));
  return worst;
}

DiscrepancyVector discrepancy(const CellSet& cells, const Functional& f, double area_floor) {
  DiscrepancyVector out;
  out.components.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells.cells[i]) throw DegenerateCell("cell " + std::to_string(i) + " is empty");
    if (area(*cells.cells[i]) < area_floor) throw DegenerateCell("cell " + std::to_string(i) + " is below the area floor");
    out.components.push_back(f(*cells.cells[i]));
  }
  for (double v : out.components) out.mean += v;
  out.mean /= static_cast<double>(out.components.size());
  for (double& v : out.components) v -= out.mean;
  return out;
}

DiscrepancyVector discrepancy(const ConvexPolygon& body, const SiteConfig& cfg, const Density& rho,
                              const Functional& f, double area_floor) {
  return discrepancy(cell_set(body, cfg, rho), f, area_floor);
}

std::vector<Point2> epicycle_init(std::size_t m, double eps, const std::vector<double>& angles) {
  if (m == 0 || (m & (m - 1)) != 0) throw std::invalid_argument("epicycle_init: m must be a power of two");
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("epicycle_init: eps must lie in (0, 1/2)");
  if (angles.size() != m - 1) throw std::invalid_argument("epicycle_init: need m - 1 angles");
  std::size_t k = 0;
  while ((std::size_t{1} << k) < m) ++k;

  std::vector<Point2> out;
  out.reserve(m);
  auto rec = [&](auto&& self, std::size_t node, std::size_t depth, Point2 base, double scale) -> void {
    if (depth == k) {
      out.push_back(base);
      return;
    }
    const Point2 v{scale * std::cos(angles[node]), scale * std::sin(angles[node])};
    self(self, 2 * node + 1, depth + 1, base + v, scale * eps);
    self(self, 2 * node + 2, depth + 1, base - v, scale * eps);
  };
  rec(rec, 0, 0, {0.0, 0.0}, 1.0);

  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (distance(out[i], out[j]) <= 1e-12) throw DegenerateConfig("epicycle points collide");
  return out;
}

const char* to_string(InitKind kind) {
  switch (kind) {
    case InitKind::Orbit: return "orbit";
    case InitKind::Lattice: return "lattice";
    case InitKind::Epicycle: return "epicycle";
    case InitKind::Strips: return "strips";
    case InitKind::Random: return "random";
    case InitKind::Chain: return "chain";
  }
  return "?";
}

namespace {

Point2 mass_centroid(const ConvexPolygon& body, const Density& rho) {
  if (rho.is_uniform()) return centroid(body);
  const double mass = integrate(body, rho);
  return {integrate(body, rho, [](Point2 p) { return p.x; }, kDefaultQuadratureOrder) / mass,
          integrate(body, rho, [](Point2 p) { return p.y; }, kDefaultQuadratureOrder) / mass};
}

Point2 pull_inside(const ConvexPolygon& body, Point2 c, Point2 p) {
  for (int k = 0; k < 60 && !contains(body, p); ++k) p = c + 0.5 * (p - c);
  return p;
}

}  // namespace

std::vector<Point2> strip_sites(const ConvexPolygon& body, const Density& rho, std::size_t m, Point2 axis) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Point2 v : body.vertices()) {
    lo = std::min(lo, dot(axis, v));
    hi = std::max(hi, dot(axis, v));
  }
  const double total = integrate(body, rho);

  auto mass_below = [&](double s) {
    const auto part = clip_halfplane(body, axis, s);
    return part ? integrate(*part, rho) : 0.0;
  };
  std::vector<double> cuts{lo};
  for (std::size_t k = 1; k < m; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(m);
    std::uintmax_t iters = 100;
    const auto r = boost::math::tools::toms748_solve([&](double s) { return mass_below(s) - target; }, cuts.back(),
                                                     hi, boost::math::tools::eps_tolerance<double>(50), iters);
    cuts.push_back(0.5 * (r.first + r.second));
  }
  cuts.push_back(hi);

  std::vector<Point2> sites;
  for (std::size_t k = 0; k < m; ++k) {
    auto strip = clip_halfplane(body, axis, cuts[k + 1]);
    if (strip) strip = clip_halfplane(*strip, -axis, -cuts[k]);
    if (!strip) throw DegenerateConfig("empty strip");
    sites.push_back(centroid(*strip));
  }
  return sites;
}

namespace {

double boundary_distance(const ConvexPolygon& p, Point2 q) {
  const auto& v = p.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i], b = v[(i + 1) % v.size()];
    const double len2 = dot(b - a, b - a);
    const double u = len2 > 0.0 ? std::clamp(dot(q - a, b - a) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, distance(q, a + u * (b - a)));
  }
  return best;
}

}  // namespace

std::optional<CutPartition> cut_partition(const ConvexPolygon& body, const Density& rho,
                                          std::span<const double> angles) {
  const double share = integrate(body, rho) / static_cast<double>(angles.size() + 1);
  const double eps = kGeomEps * body.scale();
  CutPartition out;
  ConvexPolygon rest = body;
  for (double th : angles) {
    const Point2 a{std::cos(th), std::sin(th)};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Point2 v : rest.vertices()) {
      lo = std::min(lo, dot(a, v));
      hi = std::max(hi, dot(a, v));
    }
    auto excess = [&](double s) {
      const auto part = clip_halfplane(rest, a, s);
      return (part ? integrate(*part, rho) : 0.0) - share;
    };
    if (!(excess(lo) < 0.0 && excess(hi) > 0.0)) return std::nullopt;
    std::uintmax_t iters = 100;
    const auto r = boost::math::tools::toms748_solve(excess, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    const double s = 0.5 * (r.first + r.second);
    auto cell = clip_halfplane(rest, a, s);
    auto next = clip_halfplane(rest, -a, -s);
    if (!cell || !next) return std::nullopt;
    const Point2 dir{-a.y, a.x};
    Point2 p0, p1;
    double t0 = std::numeric_limits<double>::infinity(), t1 = -t0;
    for (Point2 v : cell->vertices()) {
      if (std::abs(dot(a, v) - s) > 1e3 * eps) continue;
      const double t = dot(dir, v);
      if (t < t0) t0 = t, p0 = v;
      if (t > t1) t1 = t, p1 = v;
    }
    if (!(t1 > t0)) return std::nullopt;
    out.cells.push_back(std::move(*cell));
    out.chords.emplace_back(p0, p1);
    out.normals.push_back(a);
    rest = std::move(*next);
  }
  out.cells.push_back(std::move(rest));
  return out;
}

std::optional<std::vector<Point2>> cut_sites(const ConvexPolygon& body, const CutPartition& cuts) {
  const std::size_t m = cuts.cells.size();
  const double eps = 1e3 * kGeomEps * body.scale();
  for (const auto& [p0, p1] : cuts.chords)
    if (boundary_distance(body, p0) > eps || boundary_distance(body, p1) > eps) return std::nullopt;
  const double step = std::sqrt(area(body) / static_cast<double>(m));
  std::vector<Point2> sites(m);
  sites[m - 1] = centroid(cuts.cells[m - 1]);
  for (std::size_t k = m - 1; k-- > 0;) {
    const Point2 mid = 0.5 * (cuts.chords[k].first + cuts.chords[k].second);
    std::size_t across = k + 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = k + 1; j < m; ++j) {
      const double d = distance_to(cuts.cells[j], mid);
      if (d < best) best = d, across = j;
    }
    sites[k] = sites[across] - step * cuts.normals[k];
  }
  return sites;
}

std::vector<Point2> initial_sites(const ConvexPolygon& body, const Density& rho, std::size_t m, InitKind kind,
                                  Rng& rng) {
  const Point2 c = mass_centroid(body, rho);
  const double r = 0.25 * std::sqrt(area(body) / std::numbers::pi);
  std::vector<Point2> sites;
  switch (kind) {
    case InitKind::Orbit:
      for (std::size_t k = 0; k < m; ++k) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        sites.push_back(c + r * Point2{std::cos(a), std::sin(a)});
      }
      break;
    case InitKind::Lattice: {
      const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
      const std::size_t rows = (m + cols - 1) / cols;
      const Box b = body.bounds();
      for (std::size_t k = 0; k < m; ++k) {
        const double u = (static_cast<double>(k % cols) + 0.5) / static_cast<double>(cols);
        const double v = (static_cast<double>(k / cols) + 0.5) / static_cast<double>(rows);
        const Point2 p{b.lo.x + u * (b.hi.x - b.lo.x), b.lo.y + v * (b.hi.y - b.lo.y)};
        sites.push_back(pull_inside(body, c, c + 0.8 * (p - c)));
      }
      break;
    }
    case InitKind::Epicycle: {
      std::vector<double> angles(m > 0 ? m - 1 : 0);
      for (std::size_t i = 0; i < angles.size(); ++i) {
        std::size_t depth = 0;
        for (std::size_t n = i + 1; n > 1; n /= 2) ++depth;
        angles[i] = 0.5 * std::numbers::pi * static_cast<double>(depth);
      }
      for (Point2 p : epicycle_init(m, 0.3, angles)) sites.push_back(c + r * p);
      break;
    }
    case InitKind::Strips: {
      const Box b = body.bounds();
      sites = strip_sites(body, rho, m, b.hi.x - b.lo.x >= b.hi.y - b.lo.y ? Point2{1.0, 0.0} : Point2{0.0, 1.0});
      break;
    }
    case InitKind::Random: {
      const Box b = body.bounds();
      while (sites.size() < m) {
        const Point2 p{uniform(rng, b.lo.x, b.hi.x), uniform(rng, b.lo.y, b.hi.y)};
        if (contains(body, p)) sites.push_back(p);
      }
      break;
    }
    case InitKind::Chain: {
      const double step = std::sqrt(area(body) / static_cast<double>(m));
      double heading = uniform(rng, 0.0, std::numbers::pi);
      Point2 p{0.0, 0.0}, mean{0.0, 0.0};
      for (std::size_t k = 0; k < m; ++k) {
        sites.push_back(p);
        mean += p / static_cast<double>(m);
        p += step * Point2{std::cos(heading), std::sin(heading)};
        heading += uniform(rng, -0.25 * std::numbers::pi, 0.25 * std::numbers::pi);
      }
      for (Point2& s : sites) s += c - mean;
      break;
    }
  }
  return sites;
}

namespace {

struct Eval {
  SiteConfig config;
  CellSet cells;
  std::vector<double> values;
  std::vector<Functional::State> states;
  Eigen::VectorXd residual;
  double objective = 0.0;  // max |residual|
  double norm2 = 0.0;
};

class Problem {
 public:
  Problem(const ConvexPolygon& body, std::size_t m, const Functional& f, const Density& rho,
          const PartitionOptions& opts)
      : body_(body), m_(m), f_(f), rho_(rho), opts_(opts) {
    capacities_ = equal_capacities(body, rho, m, opts.weights.quadrature_order);
    floor_ = opts.area_floor * area(body) / static_cast<double>(m);
    const Box b = body.bounds();
    const double d = diameter(body);
    lo_ = b.lo - Point2{d, d};
    hi_ = b.hi + Point2{d, d};
    scale_ = body.scale();
  }

  double scale() const { return scale_; }
  std::size_t m() const { return m_; }

  Point2 project(Point2 p) const { return {std::clamp(p.x, lo_.x, hi_.x), std::clamp(p.y, lo_.y, hi_.y)}; }

  std::optional<Eval> evaluate(const std::vector<Point2>& sites, const std::vector<double>& w0,
                               const std::vector<Functional::State>& anchors) const {
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (std::size_t j = i + 1; j < sites.size(); ++j)
        if (distance(sites[i], sites[j]) <= kGeomEps * scale_) return std::nullopt;
    Eval e;
    try {
      auto ws = solve_weights(body_, sites, capacities_, rho_, opts_.weights, w0);
      if (!ws.converged && ws.max_error > 1e-9) return std::nullopt;
      e.config = std::move(ws.config);
      e.cells = std::move(ws.cells);
    } catch (const DegenerateConfig&) {
      return std::nullopt;
    }
    e.values.resize(m_);
    e.states.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& cell = e.cells.cells[i];
      if (!cell || area(*cell) < floor_) return std::nullopt;
      try {
        auto r = f_.evaluate(*cell, i < anchors.size() ? anchors[i] : nullptr);
        if (!std::isfinite(r.value)) return std::nullopt;
        e.values[i] = r.value;
        e.states[i] = std::move(r.state);
      } catch (const NonConvergence&) {
        return std::nullopt;
      } catch (const DegenerateCell&) {
        return std::nullopt;
      }
    }
    double ref = 0.0;
    if (opts_.target) {
      ref = *opts_.target;
    } else {
      for (double v : e.values) ref += v;
      ref /= static_cast<double>(m_);
    }
    if (!(std::abs(ref) > 0.0)) return std::nullopt;
    e.residual.resize(static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) e.residual(static_cast<Eigen::Index>(i)) = (e.values[i] - ref) / std::abs(ref);
    e.objective = e.residual.cwiseAbs().maxCoeff();
    e.norm2 = e.residual.squaredNorm();
    return e;
  }

  // Forward differences, or central ones (with a step `shrink` times
  // smaller) when the forward Jacobian no longer gives a descent step.
  Eigen::MatrixXd jacobian(const Eval& base, bool central = false, double shrink = 1.0) const {
    const auto m = static_cast<Eigen::Index>(m_);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, 2 * m);
    const double h = (f_.is_stateful() ? 1e-5 : 1e-6) * scale_ * shrink;
    auto shifted = [&](Eigen::Index k, double step) {
      std::vector<Point2> sites = base.config.sites();
      auto& p = sites[static_cast<std::size_t>(k / 2)];
      (k % 2 == 0 ? p.x : p.y) += step;
      return evaluate(sites, base.config.weights(), base.states);
    };
    for (Eigen::Index k = 0; k < 2 * m; ++k) {
      if (central) {
        const auto ep = shifted(k, h), em = shifted(k, -h);
        if (ep && em) {
          j.col(k) = (ep->residual - em->residual) / (2.0 * h);
          continue;
        }
      }
      for (double step : {h, -h}) {
        if (const auto e = shifted(k, step)) {
          j.col(k) = (e->residual - base.residual) / step;
          break;
        }
      }
    }
    return j;
  }

 private:
  const ConvexPolygon& body_;
  std::size_t m_;
  const Functional& f_;
  const Density& rho_;
  const PartitionOptions& opts_;
  std::vector<double> capacities_;
  double floor_ = 0.0;
  Point2 lo_, hi_;
  double scale_ = 1.0;
};

struct RunOutcome {
  std::optional<Eval> best;
  bool converged = false;
  int iterations = 0;
};

// One Levenberg-Marquardt run from a starting iterate.
RunOutcome levenberg_marquardt(const Problem& prob, Eval cur, const PartitionOptions& opts) {
  RunOutcome out;
  const double max_move = 0.5 * prob.scale() / std::sqrt(static_cast<double>(prob.m()));
  double lambda = 1e-3;
  // Finite-difference steps tried in turn when no step is accepted.
  constexpr double kShrink[] = {1.0, 0.01, 10.0, 1e-4};
  int refined = 0;
  while (cur.objective > opts.tol_f && out.iterations < opts.max_iterations) {
    const Eigen::MatrixXd j = refined ? prob.jacobian(cur, true, kShrink[refined]) : prob.jacobian(cur);
    const Eigen::MatrixXd a = j * j.transpose();
    const double diag = std::max(a.trace() / static_cast<double>(prob.m()), 1e-300);
    bool accepted = false;
    while (!accepted && lambda < 1e10) {
      Eigen::MatrixXd damped = a;
      damped.diagonal().array() += lambda * diag;
      const Eigen::VectorXd z = damped.ldlt().solve(cur.residual);
      Eigen::VectorXd dx = -j.transpose() * z;
      double longest = 0.0;
      for (Eigen::Index i = 0; i < dx.size(); i += 2) longest = std::max(longest, std::hypot(dx(i), dx(i + 1)));
      if (!dx.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      if (longest > max_move) dx *= max_move / longest;
      std::vector<Point2> sites = cur.config.sites();
      for (std::size_t i = 0; i < sites.size(); ++i)
        sites[i] = prob.project(sites[i] + Point2{dx(static_cast<Eigen::Index>(2 * i)),
                                                  dx(static_cast<Eigen::Index>(2 * i + 1))});
      auto trial = prob.evaluate(sites, cur.config.weights(), cur.states);
      if (trial && trial->norm2 < cur.norm2) {
        cur = std::move(*trial);
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) {
      // Close to a solution the residual is only piecewise smooth (cell
      // boundaries crossing vertices of K); retry with other difference steps.
      if (refined == 3 || cur.objective > 1e3 * opts.tol_f) break;
      ++refined;
      lambda = 1e-3;
      continue;
    }
    ++out.iterations;
  }
  out.converged = cur.objective <= opts.tol_f;
  out.best = std::move(cur);
  return out;
}

struct CutEval {
  std::vector<double> angles;
  CutPartition cuts;
  std::vector<double> values;
  std::vector<Functional::State> states;
  Eigen::VectorXd residual;
  double objective = 0.0;
  double norm2 = 0.0;
};

class CutProblem {
 public:
  CutProblem(const ConvexPolygon& body, std::size_t m, const Functional& f, const Density& rho,
             const PartitionOptions& opts)
      : body_(body), m_(m), f_(f), rho_(rho), opts_(opts), floor_(opts.area_floor * area(body) / static_cast<double>(m)) {}

  std::optional<CutEval> evaluate(std::vector<double> angles, const std::vector<Functional::State>& anchors) const {
    auto cuts = cut_partition(body_, rho_, angles);
    if (!cuts) return std::nullopt;
    CutEval e;
    for (std::size_t i = 0; i < cuts->cells.size(); ++i) {
      const auto& cell = cuts->cells[i];
      if (area(cell) < floor_) return std::nullopt;
      try {
        auto r = f_.evaluate(cell, i < anchors.size() ? anchors[i] : nullptr);
        if (!std::isfinite(r.value)) return std::nullopt;
        e.values.push_back(r.value);
        e.states.push_back(std::move(r.state));
      } catch (const NonConvergence&) {
        return std::nullopt;
      } catch (const DegenerateCell&) {
        return std::nullopt;
      }
    }
    double ref = 0.0;
    if (opts_.target) {
      ref = *opts_.target;
    } else {
      for (double v : e.values) ref += v;
      ref /= static_cast<double>(m_);
    }
    if (!(std::abs(ref) > 0.0)) return std::nullopt;
    e.angles = std::move(angles);
    e.cuts = std::move(*cuts);
    e.residual.resize(static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) e.residual(static_cast<Eigen::Index>(i)) = (e.values[i] - ref) / std::abs(ref);
    e.objective = e.residual.cwiseAbs().maxCoeff();
    e.norm2 = e.residual.squaredNorm();
    return e;
  }

  // Levenberg-Marquardt over the m - 1 cut angles.
  CutEval solve(CutEval cur, int& iterations) const {
    const std::size_t n = m_ - 1;
    const double h = f_.is_stateful() ? 1e-5 : 1e-6;
    double lambda = 1e-3;
    while (cur.objective > opts_.tol_f && iterations < opts_.max_iterations) {
      Eigen::MatrixXd j(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < n; ++k) {
        auto th = cur.angles;
        th[k] += h;
        const auto e = evaluate(std::move(th), cur.states);
        if (!e) return cur;
        j.col(static_cast<Eigen::Index>(k)) = (e->residual - cur.residual) / h;
      }
      const Eigen::MatrixXd a = j.transpose() * j;
      const double diag = std::max(a.trace() / static_cast<double>(n), 1e-300);
      bool accepted = false;
      while (!accepted && lambda < 1e10) {
        Eigen::MatrixXd damped = a;
        damped.diagonal().array() += lambda * diag;
        Eigen::VectorXd dx = -damped.ldlt().solve(j.transpose() * cur.residual);
        if (!dx.allFinite()) {
          lambda *= 4.0;
          continue;
        }
        if (dx.cwiseAbs().maxCoeff() > 0.5) dx *= 0.5 / dx.cwiseAbs().maxCoeff();
        auto th = cur.angles;
        for (std::size_t k = 0; k < n; ++k) th[k] += dx(static_cast<Eigen::Index>(k));
        auto trial = evaluate(std::move(th), cur.states);
        if (trial && trial->norm2 < cur.norm2) {
          cur = std::move(*trial);
          lambda = std::max(lambda / 3.0, 1e-12);
          accepted = true;
        } else {
          lambda *= 4.0;
        }
      }
      if (!accepted) break;
      ++iterations;
    }
    return cur;
  }

  // Cut partitions whose last angle is a root of the difference of the last
  // two residuals, the other angles fixed at `head`. Swapping the last two
  // cells turns the last angle by pi, so each half turn holds a sign change.
  std::vector<CutEval> roots(const std::vector<double>& head, int samples) const {
    std::vector<CutEval> out;
    const auto last = static_cast<Eigen::Index>(head.size());
    auto d = [&](double t) -> std::optional<double> {
      auto th = head;
      th.push_back(t);
      const auto e = evaluate(std::move(th), {});
      if (!e) return std::nullopt;
      return e->residual(last) - e->residual(last + 1);
    };
    std::vector<std::pair<double, double>> grid;
    for (int k = 0; k <= samples; ++k) {
      const double t = std::numbers::pi * k / samples;
      if (const auto v = d(t)) grid.emplace_back(t, *v);
    }
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const auto [ta, da] = grid[k];
      const auto [tb, db] = grid[k + 1];
      if (da == 0.0 || (da < 0.0) == (db < 0.0)) continue;
      try {
        std::uintmax_t iters = 60;
        const auto r = boost::math::tools::toms748_solve(
            [&](double t) {
              const auto v = d(t);
              if (!v) throw DegenerateCell("cut partition not evaluable");
              return *v;
            },
            ta, tb, da, db, boost::math::tools::eps_tolerance<double>(40), iters);
        auto th = head;
        th.push_back(0.5 * (r.first + r.second));
        if (auto e = evaluate(std::move(th), {})) out.push_back(std::move(*e));
      } catch (const DegenerateCell&) {
      }
    }
    return out;
  }

  // Screened starting angles, best first. For m = 2 these are the roots
  // themselves; for m = 3 and a plain functional they lie on the curve
  // where the last two cells agree.
  std::vector<CutEval> starts(Rng& rng) const {
    std::vector<CutEval> pool;
    const std::size_t n = m_ - 1;
    if (n == 1) {
      // f(L) - f(M) changes sign between th and th + pi.
      for (auto& e : roots({}, 24)) pool.push_back(std::move(e));
    } else if (n == 2 && !f_.is_stateful()) {
      constexpr int outer = 96;
      for (int i = 0; i < outer; ++i)
        for (auto& e : roots({2.0 * std::numbers::pi * i / outer}, 24)) pool.push_back(std::move(e));
    } else {
      const int samples = (f_.is_stateful() ? 8 : 64) * static_cast<int>(n);
      for (int k = 0; k < samples; ++k) {
        std::vector<double> th(n);
        for (double& t : th) t = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        if (auto e = evaluate(std::move(th), {})) pool.push_back(std::move(*e));
      }
    }
    std::stable_sort(pool.begin(), pool.end(),
                     [](const CutEval& a, const CutEval& b) { return a.objective < b.objective; });
    if (pool.size() > 8) pool.resize(8);
    return pool;
  }

 private:
  const ConvexPolygon& body_;
  std::size_t m_;
  const Functional& f_;
  const Density& rho_;
  const PartitionOptions& opts_;
  double floor_;
};

bool is_power_of_two(std::size_t m) { return m > 0 && (m & (m - 1)) == 0; }

}  // namespace

PartitionResult solve_partition(const ConvexPolygon& body, std::size_t m, const Functional& f, const Density& rho,
                                const PartitionOptions& options) {
  if (m == 0) throw std::invalid_argument("solve_partition: m must be positive");
  const Problem prob(body, m, f, rho, options);
  Rng rng(options.seed);

  std::optional<Eval> best;
  int starts = 0;
  int total_iterations = 0;

  auto summarize = [&](PartitionResult& r, const CellSet& cells) {
    if (options.target) {
      r.common_value = *options.target;
    } else {
      for (double v : r.values) r.common_value += v;
      r.common_value /= static_cast<double>(m);
    }
    for (double v : r.values)
      r.max_deviation = std::max(r.max_deviation, std::abs(v - r.common_value) / std::abs(r.common_value));
    const double share = cells.total_mass() / static_cast<double>(m);
    for (double mass : cells.masses) r.mass_error = std::max(r.mass_error, std::abs(mass - share) / share);
    r.iterations = total_iterations;
    r.starts = starts;
  };
  auto finish = [&](Eval e) {
    PartitionResult r;
    r.values = e.values;
    r.states = e.states;
    summarize(r, e.cells);
    r.config = std::move(e.config);
    r.cells = std::move(e.cells);
    return r;
  };

  const CutProblem cut_problem(body, m, f, rho, options);
  double best_cut = std::numeric_limits<double>::infinity();
  auto finish_cuts = [&](CutEval e) {
    PartitionResult r;
    r.values = e.values;
    r.states = e.states;
    for (auto& cell : e.cuts.cells) {
      r.cells.masses.push_back(integrate(cell, rho, options.weights.quadrature_order));
      r.cells.cells.emplace_back(std::move(cell));
    }
    summarize(r, r.cells);
    r.cut_angles = std::move(e.angles);
    return r;
  };
  auto run_cuts = [&](CutEval start) -> std::optional<CutEval> {
    int iterations = 0;
    CutEval e = cut_problem.solve(std::move(start), iterations);
    total_iterations += iterations;
    best_cut = std::min(best_cut, e.objective);
    if (e.objective <= options.tol_f) return e;
    return std::nullopt;
  };
  auto best_objective = [&] { return std::min(best ? best->objective : best_cut, best_cut); };

  // Returns true when the run converged.
  auto run = [&](const std::vector<Point2>& sites, const std::vector<double>& w0,
                 const std::vector<Functional::State>& anchors) {
    ++starts;
    std::vector<Point2> projected;
    for (Point2 p : sites) projected.push_back(prob.project(p));
    auto start = prob.evaluate(projected, w0, anchors);
    if (!start) return false;
    auto outcome = levenberg_marquardt(prob, std::move(*start), options);
    total_iterations += outcome.iterations;
    if (!best || outcome.best->objective < best->objective) best = std::move(outcome.best);
    return outcome.converged;
  };

  if (m == 1) {
    auto e = prob.evaluate({centroid(body)}, {}, options.warm_states);
    if (!e) throw NonConvergence("solve_partition: functional not evaluable on the body", 0.0);
    ++starts;
    return finish(std::move(*e));
  }

  if (!options.warm_sites.empty()) {
    if (options.warm_sites.size() != m) throw std::invalid_argument("solve_partition: warm start size mismatch");
    if (run(options.warm_sites, options.warm_weights, options.warm_states)) return finish(std::move(*best));
    if (!options.cold_fallback) throw NonConvergence("solve_partition: warm start did not converge", best_objective());
  } else if (!options.warm_angles.empty()) {
    if (options.warm_angles.size() != m - 1) throw std::invalid_argument("solve_partition: warm start size mismatch");
    ++starts;
    if (auto start = cut_problem.evaluate(options.warm_angles, options.warm_states))
      if (auto sol = run_cuts(std::move(*start))) return finish_cuts(std::move(*sol));
    if (!options.cold_fallback) throw NonConvergence("solve_partition: warm start did not converge", best_objective());
  }

  std::vector<InitKind> inits = options.inits;
  if (inits.empty()) {
    inits = {InitKind::Orbit, InitKind::Lattice};
    if (is_power_of_two(m)) inits.push_back(InitKind::Epicycle);
    inits.push_back(InitKind::Strips);
  }
  for (InitKind kind : inits) {
    if (starts >= options.restart_budget) break;
    std::vector<Point2> sites;
    try {
      sites = initial_sites(body, rho, m, kind, rng);
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (run(sites, {}, {})) return finish(std::move(*best));
  }

  // Sequential cuts reach partitions with T-junctions, which are limits of
  // power diagrams with merging sites.
  if (options.inits.empty() && starts < options.restart_budget) {
    ++starts;
    for (auto& start : cut_problem.starts(rng)) {
      auto sol = run_cuts(std::move(start));
      if (!sol) continue;
      if (const auto sites = cut_sites(body, sol->cuts))
        if (run(*sites, {}, {})) return finish(std::move(*best));
      return finish_cuts(std::move(*sol));
    }
  }

  // Screened pool of chain and random starts, best first, alternating with
  // perturbations of the best iterate so far.
  std::vector<std::pair<double, std::vector<Point2>>> pool;
  const int remaining = options.restart_budget - starts;
  const int pool_size = (f.is_stateful() ? 2 : 4) * std::max(remaining, 0);
  for (int k = 0; k < pool_size; ++k) {
    auto sites = initial_sites(body, rho, m, k % 2 == 0 ? InitKind::Chain : InitKind::Random, rng);
    for (Point2& p : sites) p = prob.project(p);
    if (const auto e = prob.evaluate(sites, {}, {})) pool.emplace_back(e->objective, std::move(sites));
  }
  std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const double jitter = 0.05 * std::sqrt(area(body) / static_cast<double>(m));
  std::size_t next = 0;
  for (int k = 0; starts < options.restart_budget; ++k) {
    if ((k % 2 == 1 || next == pool.size()) && best) {
      std::vector<Point2> sites = best->config.sites();
      for (Point2& p : sites) p += Point2{uniform(rng, -jitter, jitter), uniform(rng, -jitter, jitter)};
      if (run(sites, best->config.weights(), best->states)) return finish(std::move(*best));
    } else if (next < pool.size()) {
      if (run(pool[next++].second, {}, {})) return finish(std::move(*best));
    } else {
      if (run(initial_sites(body, rho, m, InitKind::Random, rng), {}, {})) return finish(std::move(*best));
    }
  }
  throw NonConvergence("solve_partition: no start reached tol_f for m = " + std::to_string(m), best_objective());
}

}  // namespace equipart
