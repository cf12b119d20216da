// Acceptance run: one PASS/FAIL line per criterion, detail lines indented.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "corpus.hpp"
#include "equipart/cli.hpp"
#include "equipart/io.hpp"
#include "equipart/recursive.hpp"
#include "equipart/sweep.hpp"
#include "equipart/verify.hpp"

using namespace equipart;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTolArea = 1e-6;
constexpr double kTolF = 1e-5;
constexpr double kCaseSeconds = 120.0;

class Criterion {
 public:
  explicit Criterion(int id) : id_(id) {}
  void fail(const std::string& what) {
    ok_ = false;
    detail("FAIL " + what);
  }
  void check(bool cond, const std::string& what) {
    if (!cond) fail(what);
  }
  void detail(const std::string& line) const { std::cout << "    " << line << '\n' << std::flush; }
  bool report(const std::string& summary) const {
    std::cout << "criterion " << id_ << ": " << (ok_ ? "PASS" : "FAIL") << "  " << summary << '\n' << std::flush;
    return ok_;
  }

 private:
  int id_;
  bool ok_ = true;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Workdir {
  std::filesystem::path path;
  Workdir() {
    path = std::filesystem::temp_directory_path() / ("equipart_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
    for (const auto& b : corpus::all()) write_file(body_file(b.name), polygon_to_json(b.polygon).dump() + "\n");
  }
  ~Workdir() { std::filesystem::remove_all(path); }
  std::string body_file(const std::string& name) const { return (path / (name + ".json")).string(); }
};

struct Run {
  int code = 0;
  std::string out;
  std::string err;
  double seconds = 0.0;
};

Run cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"equipart"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.seconds = seconds_since(t0);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Solves through the CLI and re-verifies the document cells independently.
void solve_case(Criterion& c, const Workdir& wd, const corpus::Body& body, std::size_t m,
                const std::string& functional, const std::string& density) {
  const std::string label = body.name + " m=" + std::to_string(m) + " f=" + functional + " rho=" + density;
  const Run r = cli({"solve", "--input", wd.body_file(body.name), "--m", std::to_string(m), "--functional", functional,
                     "--density", density});
  if (r.code != 0) {
    c.fail(label + ": exit " + std::to_string(r.code) + " " + r.err);
    return;
  }
  const auto doc = nlohmann::json::parse(r.out);
  const auto cells = document_cells(doc);
  const Report rep = check_partition(body.polygon, cells, parse_density(density), functional_by_name(functional),
                                     kTolArea, kTolF);
  c.detail(label + ": mass dev " + fmt("%.2e", rep.max_mass_deviation) + ", f dev " +
           fmt("%.2e", rep.max_f_deviation) + ", " + fmt("%.1f s", r.seconds));
  c.check(cells.size() == m, label + ": wrong cell count");
  c.check(rep.pass, label + ": verify failed: " + rep.reason);
  c.check(rep.max_mass_deviation <= kTolArea, label + ": mass deviation");
  c.check(rep.max_f_deviation <= kTolF, label + ": functional deviation");
  c.check(r.seconds <= kCaseSeconds, label + ": over the time limit");
}

std::vector<Point2> random_sites(Rng& rng, const ConvexPolygon& body, std::size_t n) {
  const Box b = body.bounds();
  std::vector<Point2> s;
  while (s.size() < n) {
    const Point2 p{uniform(rng, b.lo.x, b.hi.x), uniform(rng, b.lo.y, b.hi.y)};
    if (contains(body, p)) s.push_back(p);
  }
  return s;
}

bool criterion1(const Workdir& wd) {
  Criterion c(1);
  for (const auto& body : corpus::all())
    for (std::size_t m : {2, 3, 4, 5, 6, 7, 8, 9, 12}) solve_case(c, wd, body, m, "perimeter", "uniform");
  return c.report("corpus x m in {2..9, 12}, uniform, perimeter");
}

bool criterion2() {
  Criterion c(2);
  const auto u = Density::uniform();
  const auto per = perimeter_functional();
  {
    PartitionOptions o;
    o.inits = {InitKind::Strips};
    const auto r = solve_partition(corpus::square(), 3, per, u, o);
    const double err = std::abs(r.common_value - 8.0 / 3.0);
    c.detail("square m=3 strips: " + fmt("%.12f", r.common_value) + ", error " + fmt("%.2e", err));
    c.check(err <= 1e-6, "square m=3");
  }
  const double radius = 0.5;
  for (std::size_t m = 2; m <= 8; ++m) {
    PartitionOptions o;
    o.inits = {InitKind::Orbit};
    const auto r = solve_partition(corpus::disk(), m, per, u, o);
    const double want = 2 * radius + 2 * kPi * radius / static_cast<double>(m);
    const double err = std::abs(r.common_value - want);
    c.detail("disk m=" + std::to_string(m) + ": " + fmt("%.8f", r.common_value) + ", error " + fmt("%.2e", err));
    c.check(err <= 1e-4, "disk m=" + std::to_string(m));
  }
  return c.report("square 8/3 and disk sector values");
}

bool criterion3() {
  Criterion c(3);
  const auto sq = corpus::square();
  const auto u = Density::uniform();
  const auto caps = equal_capacities(sq, u, 10);
  Rng rng(3);
  int worst_iter = 0;
  double worst_err = 0.0;
  for (int run = 0; run < 100; ++run) {
    const auto sites = random_sites(rng, sq, 10);
    const auto r = solve_weights(sq, sites, caps, u);
    worst_iter = std::max(worst_iter, r.iterations);
    worst_err = std::max(worst_err, r.max_error);
    const std::string label = "run " + std::to_string(run);
    c.check(r.converged && r.max_error <= 1e-9, label + ": mass error " + fmt("%.2e", r.max_error));
    c.check(r.iterations <= 200, label + ": iterations");
    for (std::size_t k = 1; k < r.dual_trace.size(); ++k)
      if (r.dual_trace[k] < r.dual_trace[k - 1]) {
        c.fail(label + ": dual decreased by " + fmt("%.2e", r.dual_trace[k - 1] - r.dual_trace[k]));
        break;
      }
  }
  c.detail("worst mass error " + fmt("%.2e", worst_err) + ", most iterations " + std::to_string(worst_iter));
  return c.report("100 random 10-site weight solves");
}

bool criterion4() {
  Criterion c(4);
  const auto bodies = corpus::all();
  const auto u = Density::uniform();
  Rng rng(4);
  double worst = 0.0;
  int mismatched = 0;
  for (int run = 0; run < 1000; ++run) {
    const auto& body = bodies[run % bodies.size()].polygon;
    const std::size_t n = 2 + run % 11;
    const auto sites = random_sites(rng, body, n);
    const double spread = 0.05 * area(body);
    std::vector<double> w(n);
    for (auto& x : w) x = uniform(rng, -spread, spread);
    const SiteConfig cfg(sites, w);
    const CellSet cs = cell_set(body, cfg, u);
    double sum = 0.0;
    for (const auto& cell : cs.cells)
      if (cell) sum += area(*cell);
    worst = std::max(worst, std::abs(sum - area(body)) / area(body));

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const CellSet ps = cell_set(body, cfg.permuted(perm), u);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = ps.cells[i];
      const auto& b = cs.cells[perm[i]];
      if (a.has_value() != b.has_value() || (a && a->vertices() != b->vertices())) {
        ++mismatched;
        break;
      }
    }
  }
  c.detail("worst relative tiling error " + fmt("%.2e", worst) + ", permutation mismatches " + std::to_string(mismatched));
  c.check(worst <= 1e-9, "tiling");
  c.check(mismatched == 0, "permutation equivariance");
  return c.report("1000 random configurations");
}

double value_at(const BranchCurve& curve, double t) {
  t = std::fmod(t, 2 * kPi);
  for (const auto& s : curve.samples)
    if (std::abs(s.t - t) < 1e-12) return s.y;
  return std::numeric_limits<double>::quiet_NaN();
}

bool criterion5() {
  Criterion c(5);
  const auto u = Density::uniform();
  const auto per = perimeter_functional();
  for (const auto& b : corpus::all()) {
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) worst = std::max(worst, interchange_check(b.polygon, 2 * kPi * k / 64, u));
    const double rel = worst / diameter(b.polygon);
    c.detail(b.name + ": interchange " + fmt("%.2e", rel) + " x diameter");
    c.check(rel <= 1e-9, b.name + ": interchange");
  }

  RecursiveOptions ro;
  for (const auto& b : corpus::all())
    for (std::vector<int> levels : {std::vector<int>{2}, std::vector<int>{3}}) {
      HalfSolver solver(b.polygon, u, branch_functional(levels, per, u, ro, 1));
      solver.adopt_reference(0.0);
      auto curve = [&](Side side) {
        try {
          return branch_curve(solver, side, ro.sweep);
        } catch (const BranchBroken& e) {
          return e.curve();
        }
      };
      BranchCurve gL = curve(Side::L);
      BranchCurve gM = curve(Side::M);
      align_curves(solver, gL, gM);
      double worst = 0.0;
      for (const auto& s : gM.samples) {
        double yl = value_at(gL, s.t + kPi);
        if (std::isnan(yl)) yl = solver.solve_side(s.t + kPi, Side::L).value;
        worst = std::max(worst, std::abs(s.y - yl) / std::abs(yl));
      }
      const std::string label = b.name + " m'=" + std::to_string(levels[0]);
      c.detail(label + ": max |G_M(t) - G_L(t+pi)| / y = " + fmt("%.2e", worst) + " over " +
               std::to_string(gM.samples.size()) + " samples");
      c.check(worst <= ro.partition.tol_f * 10, label + ": half-rotation relation");
    }

  const auto tri = corpus::triangle();
  try {
    const auto sw = sweep_partition(tri, u, branch_functional({3}, per, u, ro, 1), ro.sweep);
    std::vector<std::vector<Point2>> raw;
    for (const auto* leaf : sw.root.leaves()) raw.push_back(leaf->body.vertices());
    const Report rep = check_partition(tri, raw, u, per, kTolArea, kTolF);
    c.detail("triangle m'=3 crossing t* = " + fmt("%.6f", sw.crossing.t) + ", y* = " + fmt("%.8f", sw.crossing.y) +
             ", mass dev " + fmt("%.2e", rep.max_mass_deviation) + ", f dev " + fmt("%.2e", rep.max_f_deviation));
    c.check(raw.size() == 6, "triangle m'=3: cell count");
    c.check(rep.pass, "triangle m'=3: verify failed: " + rep.reason);
  } catch (const std::exception& e) {
    c.fail(std::string("triangle m'=3: ") + e.what());
  }
  return c.report("interchange, half rotation, triangle 6-partition crossing");
}

bool criterion6() {
  Criterion c(6);
  const auto u = Density::uniform();
  const auto per = perimeter_functional();
  for (const auto& b : corpus::all())
    for (std::size_t m : {2, 3, 5, 7}) {
      RecursiveOptions ro;
      ro.partition.seed = 6;
      const std::string label = b.name + " m=" + std::to_string(m);
      try {
        const auto tree = solve_general(b.polygon, m, per, u, ro);
        const auto direct = solve_partition(b.polygon, m, per, u, ro.partition);
        const double rel = std::abs(tree.root.y - direct.common_value) / std::abs(direct.common_value);
        c.detail(label + ": relative difference " + fmt("%.2e", rel));
        c.check(rel <= 1e-6, label);
      } catch (const std::exception& e) {
        c.fail(label + ": " + e.what());
      }
    }
  return c.report("solve_general = solve_partition for prime m");
}

bool criterion7(const Workdir& wd) {
  Criterion c(7);
  for (const auto& body : corpus::all())
    for (std::size_t m : {2, 3, 6}) {
      solve_case(c, wd, body, m, "perimeter", "linear:1,0,0.1");
      solve_case(c, wd, body, m, "diameter", "uniform");
    }
  return c.report("linear density and diameter at m in {2, 3, 6}");
}

bool criterion8(const Workdir& wd) {
  Criterion c(8);
  const std::string svg1 = (wd.path / "a.svg").string(), svg2 = (wd.path / "b.svg").string();
  const std::vector<std::vector<std::string>> runs{
      {"solve", "--input", wd.body_file("triangle"), "--m", "6", "--seed", "7"},
      {"solve", "--input", wd.body_file("nonagon"), "--m", "5", "--density", "linear:1,0,0.1", "--seed", "3"},
      {"solve", "--input", wd.body_file("square"), "--m", "12", "--functional", "diameter"},
      {"sweep", "--input", wd.body_file("triangle"), "--m", "2", "--grid", "32"},
  };
  for (const auto& args : runs) {
    std::string label;
    for (const auto& a : args) label += (a.find('/') == std::string::npos ? a : std::filesystem::path(a).stem().string()) + " ";
    const Run a = cli(args), b = cli(args);
    c.detail(label + ": exit " + std::to_string(a.code) + ", " + std::to_string(a.out.size()) + " bytes");
    c.check(a.code == b.code && a.out == b.out && a.err == b.err, label + ": outputs differ");
  }
  auto with_svg = [](std::vector<std::string> args, const std::string& svg) {
    args.insert(args.end(), {"--svg", svg});
    return args;
  };
  const std::vector<std::string> base{"solve", "--input", wd.body_file("disk"), "--m", "3"};
  cli(with_svg(base, svg1));
  cli(with_svg(base, svg2));
  c.check(read_file(svg1) == read_file(svg2), "svg outputs differ");
  return c.report("repeated CLI invocations are byte-identical");
}

}  // namespace

// With arguments, runs only the listed criteria.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  auto wanted = [&](int n) { return only.empty() || only.count(n) > 0; };
  const Workdir wd;
  int failed = 0;
  if (wanted(1)) failed += !criterion1(wd);
  if (wanted(2)) failed += !criterion2();
  if (wanted(3)) failed += !criterion3();
  if (wanted(4)) failed += !criterion4();
  if (wanted(5)) failed += !criterion5();
  if (wanted(6)) failed += !criterion6();
  if (wanted(7)) failed += !criterion7(wd);
  if (wanted(8)) failed += !criterion8(wd);
  std::cout << (failed == 0 ? "all criteria PASS" : std::to_string(failed) + " criteria FAIL") << '\n';
  return failed == 0 ? 0 : 1;
}
