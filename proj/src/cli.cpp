#include "equipart/cli.hpp"

#include <algorithm>
#include <ostream>

#include <CLI11.hpp>

#include "equipart/io.hpp"

namespace equipart {

namespace {

RecursiveOptions solver_options(const CliOptions& o) {
  RecursiveOptions r;
  r.partition.seed = o.seed;
  r.partition.tol_f = std::min(1e-8, 1e-3 * o.tol_f);
  r.sweep.grid = o.grid;
  return r;
}

void validate(const CliOptions& o, bool need_m) {
  if (o.input.empty()) throw InputError("--input is required");
  if (need_m && o.m < 1) throw InputError("--m must be at least 1");
  if (o.grid < 1) throw InputError("--grid must be at least 1");
  if (o.threads < 1) throw InputError("--threads must be at least 1");
  if (!(o.tol_area > 0.0) || !(o.tol_f > 0.0)) throw InputError("tolerances must be positive");
}

void emit(const CliOptions& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
  }
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return 1;
  } catch (const NonConvergence& e) {
    err << "no convergence: " << e.what() << " (best objective " << e.best_objective() << ")\n";
    return 2;
  } catch (const NoCrossingFound& e) {
    err << "no convergence: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    err << "solver failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int cmd_solve(const CliOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(o, true);
    const ConvexPolygon body = read_polygon(o.input);
    const Density rho = parse_density(o.density);
    const Functional f = functional_by_name(o.functional);
    const PartitionTree tree = solve_general(body, o.m, f, rho, solver_options(o));

    std::vector<std::vector<Point2>> raw;
    for (const auto& c : tree.cells()) raw.push_back(c.vertices());
    const Report report = check_partition(body, raw, rho, f, o.tol_area, o.tol_f);
    const auto doc = partition_document(body, tree, {o.functional, o.density, o.seed}, report);
    emit(o, doc.dump(1) + "\n", out);
    if (!o.svg.empty()) write_file(o.svg, partition_svg(body, tree.cells()));
    if (!report.pass) err << "verification failed: " << report.reason << '\n';
    return report.pass ? 0 : 2;
  });
}

int cmd_sweep(const CliOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(o, true);
    const ConvexPolygon body = read_polygon(o.input);
    const Density rho = parse_density(o.density);
    const Functional f = functional_by_name(o.functional);
    const RecursiveOptions ro = solver_options(o);
    const Functional sub = branch_functional(prime_levels(o.m), f, rho, ro, 1);
    const SweepResult sw = sweep_partition(body, rho, sub, ro.sweep);

    const PartitionTree tree{sw.root, 2 * o.m};
    std::vector<std::vector<Point2>> raw;
    for (const auto& c : tree.cells()) raw.push_back(c.vertices());
    const Report report = check_partition(body, raw, rho, f, o.tol_area, o.tol_f);

    emit(o, sweep_table(sw.gL, sw.gM), out);
    if (!o.svg.empty()) write_file(o.svg, curves_svg(sw.gL, sw.gM, sw.crossing));
    nlohmann::json summary;
    summary["t"] = sw.crossing.t;
    summary["y"] = sw.crossing.y;
    summary["d"] = sw.crossing.d;
    summary["rows"] = sw.gL.samples.size();
    summary["continuous"] = sw.gL.continuous && sw.gM.continuous;
    summary["report"] = to_json(report);
    (o.out.empty() ? err : out) << summary.dump() << '\n';
    return report.pass ? 0 : 2;
  });
}

int cmd_verify(const CliOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(o, false);
    if (o.partition.empty()) throw InputError("a partition document is required");
    const ConvexPolygon body = read_polygon(o.input);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(o.partition));
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(std::string("malformed partition document: ") + e.what());
    }
    const Density rho = parse_density(o.density);
    const Functional f = functional_by_name(o.functional);
    const Report report = check_partition(body, document_cells(doc), rho, f, o.tol_area, o.tol_f);
    emit(o, to_json(report).dump(1) + "\n", out);
    return report.pass ? 0 : 2;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equal-measure, equal-functional convex partitions"};
  app.require_subcommand(1);
  CliOptions o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "Polygon file (counterclockwise vertices)")->required();
    sub->add_option("--functional", o.functional, "perimeter, diameter or width");
    sub->add_option("--density", o.density, "uniform, linear:a,b,c or gauss:cx,cy,s");
    sub->add_option("--tol-area", o.tol_area, "Relative mass tolerance of the verification");
    sub->add_option("--tol-f", o.tol_f, "Relative functional tolerance of the verification");
    sub->add_option("--out", o.out, "Output file (default stdout)");
    sub->add_option("--threads", o.threads, "Worker threads");
  };
  auto* solve = app.add_subcommand("solve", "Partition a convex body into m parts");
  common(solve);
  solve->add_option("--m", o.m, "Number of parts")->required();
  solve->add_option("--seed", o.seed, "Random seed");
  solve->add_option("--grid", o.grid, "Sweep grid size");
  solve->add_option("--svg", o.svg, "SVG figure of the partition");
  auto* sweep = app.add_subcommand("sweep", "Trace the branch curves of a halving-line sweep");
  common(sweep);
  sweep->add_option("--m", o.m, "Parts per half")->required();
  sweep->add_option("--seed", o.seed, "Random seed");
  sweep->add_option("--grid", o.grid, "Number of angles over a full turn");
  sweep->add_option("--svg", o.svg, "SVG figure of both curves");
  auto* verify = app.add_subcommand("verify", "Check a partition document");
  common(verify);
  verify->add_option("partition", o.partition, "Partition document")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return 1;
  }
  if (solve->parsed()) return cmd_solve(o, out, err);
  if (sweep->parsed()) return cmd_sweep(o, out, err);
  return cmd_verify(o, out, err);
}

}  // namespace equipart
