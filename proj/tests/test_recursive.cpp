#include <doctest.h>

#include <cmath>
#include <numbers>

#include "corpus.hpp"
#include "equipart/recursive.hpp"
#include "equipart/verify.hpp"

using namespace equipart;

namespace {

Report verify_tree(const ConvexPolygon& body, const PartitionTree& tree, const Density& rho, const Functional& f) {
  std::vector<std::vector<Point2>> raw;
  for (const auto& c : tree.cells()) raw.push_back(c.vertices());
  return check_partition(body, raw, rho, f);
}

}  // namespace

TEST_CASE("prime_levels") {
  CHECK(prime_levels(12) == std::vector<int>{2, 2, 3});
  CHECK(prime_levels(7) == std::vector<int>{7});
  CHECK(prime_levels(8) == std::vector<int>{2, 2, 2});
  CHECK(prime_levels(45) == std::vector<int>{3, 3, 5});
  CHECK(prime_levels(1).empty());
  CHECK_THROWS_AS(prime_levels(0), std::invalid_argument);
}

TEST_CASE("branch values") {
  const auto u = Density::uniform();
  const auto per = perimeter_functional();
  SUBCASE("order one is the functional itself") {
    BranchValueFn g({}, per, u, {});
    const auto body = corpus::nonagon();
    CHECK(branch_value(g, body).value == doctest::Approx(perimeter(body)).epsilon(1e-14));
  }
  SUBCASE("square into two") {
    BranchValueFn g({2}, per, u, {});
    CHECK(branch_value(g, corpus::square()).value == doctest::Approx(3.0).epsilon(1e-8));
  }
  SUBCASE("disk into three sectors") {
    RecursiveOptions ro;
    ro.partition.inits = {InitKind::Orbit};
    BranchValueFn g({3}, per, u, ro);
    const double r = 0.5;
    CHECK(std::abs(branch_value(g, corpus::disk()).value - (2 * r + 2 * std::numbers::pi * r / 3)) <= 1e-4);
  }
}

TEST_CASE("solve_general with prime m is a single solve_partition") {
  const auto u = Density::uniform();
  const auto per = perimeter_functional();
  RecursiveOptions ro;
  ro.partition.seed = 5;
  const auto tree = solve_general(corpus::nonagon(), 3, per, u, ro);
  const auto direct = solve_partition(corpus::nonagon(), 3, per, u, ro.partition);
  CHECK(tree.root.children.size() == 3);
  CHECK(tree.root.y == doctest::Approx(direct.common_value).epsilon(1e-12));
}

TEST_CASE("solve_general on the square with m = 4") {
  const auto u = Density::uniform();
  const auto per = perimeter_functional();
  const auto tree = solve_general(corpus::square(), 4, per, u);
  REQUIRE(tree.cells().size() == 4);
  const auto rep = verify_tree(corpus::square(), tree, u, per);
  CHECK_MESSAGE(rep.pass, rep.reason);
}

TEST_CASE("solve_general on the triangle with m = 6") {
  const auto u = Density::uniform();
  const auto per = perimeter_functional();
  const auto tree = solve_general(corpus::triangle(), 6, per, u);
  REQUIRE(tree.cells().size() == 6);
  const auto rep = verify_tree(corpus::triangle(), tree, u, per);
  CHECK_MESSAGE(rep.pass, rep.reason);
  for (bool c : rep.convex) CHECK(c);
}

TEST_CASE("solve_general honours an explicit level order") {
  const auto u = Density::uniform();
  const auto per = perimeter_functional();
  RecursiveOptions ro;
  ro.levels = {3, 2};
  ro.reorder = false;
  const auto tree = solve_general(corpus::square(), 6, per, u, ro);
  CHECK(tree.root.prime == 3);
  CHECK(verify_tree(corpus::square(), tree, u, per).pass);
  ro.levels = {2, 2};
  CHECK_THROWS_AS(solve_general(corpus::square(), 6, per, u, ro), std::invalid_argument);
}

TEST_CASE("transport maps a tree between frames") {
  const auto u = Density::uniform();
  const auto tree = solve_general(corpus::square(), 2, perimeter_functional(), u);
  const Frame from = moment_frame(corpus::square());
  const auto moved_body = corpus::square().transformed({0, 0}, {3, 1}, 2.0, 0.0, 0.0, 0.5);
  const Frame to = moment_frame(moved_body);
  const PartitionNode moved = transport(tree.root, from, to);
  CHECK(hausdorff(moved.body, moved_body) < 1e-9);
  double total = 0.0;
  for (const auto* leaf : moved.leaves()) total += area(leaf->body);
  CHECK(total == doctest::Approx(area(moved_body)));
  const PartitionNode back = transport(moved, to, from);
  for (std::size_t k = 0; k < back.children.size(); ++k)
    CHECK(hausdorff(back.children[k].body, tree.root.children[k].body) < 1e-9);
}

TEST_CASE("partition tree serializes its split kinds") {
  const auto u = Density::uniform();
  const auto tree = solve_general(corpus::square(), 2, perimeter_functional(), u);
  const auto j = to_json(tree.root);
  REQUIRE(j.contains("split"));
  const std::string kind = j["split"]["kind"];
  CHECK((kind == "power" || kind == "line" || kind == "cuts"));

  const std::vector<double> angles{0.0, 1.5};
  const auto cuts = cut_partition(corpus::square(), u, angles);
  REQUIRE(cuts);
  PartitionNode node(corpus::square());
  node.prime = 3;
  node.split = CutSplit{angles};
  for (const auto& c : cuts->cells) node.children.emplace_back(c);
  CHECK(to_json(node)["split"]["kind"] == "cuts");
  CHECK(to_json(node)["split"]["angles"].size() == 2);
}
