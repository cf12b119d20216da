#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "corpus.hpp"
#include "equipart/cli.hpp"
#include "equipart/io.hpp"
#include "equipart/verify.hpp"

using namespace equipart;

namespace {

std::vector<std::vector<Point2>> quarters() {
  return {{{0, 0}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}},
          {{0.5, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}},
          {{0, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}},
          {{0.5, 0.5}, {1, 0.5}, {1, 1}, {0.5, 1}}};
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("equipart_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name, const std::string& text) const {
    const auto p = (path / name).string();
    write_file(p, text);
    return p;
  }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"equipart"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("check_partition accepts the four quarters") {
  const auto rep = check_partition(corpus::square(), quarters(), Density::uniform(), perimeter_functional());
  CHECK(rep.pass);
  CHECK(rep.coverage_gap <= 1e-12);
  CHECK(rep.max_overlap <= 1e-12);
  CHECK(rep.max_mass_deviation <= 1e-12);
  CHECK(rep.max_f_deviation <= 1e-12);
}

TEST_CASE("check_partition rejects a 90% cover") {
  const std::vector<std::vector<Point2>> cells{{{0, 0}, {0.3, 0}, {0.3, 1}, {0, 1}},
                                               {{0.3, 0}, {0.6, 0}, {0.6, 1}, {0.3, 1}},
                                               {{0.6, 0}, {0.9, 0}, {0.9, 1}, {0.6, 1}}};
  const auto rep = check_partition(corpus::square(), cells, Density::uniform(), perimeter_functional());
  CHECK_FALSE(rep.pass);
  CHECK(rep.coverage_gap == doctest::Approx(0.1));
  CHECK_FALSE(rep.reason.empty());
}

TEST_CASE("check_partition rejects overlaps and non-convex cells") {
  auto cells = quarters();
  cells[0] = {{0, 0}, {0.6, 0}, {0.6, 0.5}, {0, 0.5}};
  CHECK(check_partition(corpus::square(), cells, Density::uniform(), perimeter_functional()).max_overlap > 0.0);

  cells = quarters();
  cells[0] = {{0, 0}, {0.5, 0}, {0.2, 0.2}, {0.5, 0.5}, {0, 0.5}};
  const auto rep = check_partition(corpus::square(), cells, Density::uniform(), perimeter_functional());
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.convex[0]);
}

TEST_CASE("parse_polygon formats") {
  CHECK(area(parse_polygon("[[0,0],[1,0],[1,1],[0,1]]")) == doctest::Approx(1.0));
  CHECK(area(parse_polygon("{\"vertices\": [[0,0],[2,0],[0,1]]}")) == doctest::Approx(1.0));
  CHECK(area(parse_polygon("# square\n0 0\n1, 0\n\n1 1  # corner\n0 1\n")) == doctest::Approx(1.0));
}

TEST_CASE("parse errors name the line") {
  try {
    parse_polygon("0 0\n1 0\n1 x\n0 1\n");
    FAIL("expected an InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_polygon("0 0 1\n"), InputError);
  CHECK_THROWS_AS(parse_polygon("0 0\n0 1\n1 0\n"), InputError);
  CHECK_THROWS_AS(parse_polygon("[[0,0],[1,0]"), InputError);
  CHECK_THROWS_AS(parse_polygon(""), InputError);
}

TEST_CASE("parse_density") {
  CHECK(parse_density("uniform").is_uniform());
  const auto lin = parse_density("linear:1,0,0.1");
  CHECK(lin({0.5, 0.2}) == doctest::Approx(0.6));
  CHECK(lin({-1, 0}) == 0.0);
  CHECK(parse_density("gauss:0,0,1")({0, 0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse_density("linear:1,2"), InputError);
  CHECK_THROWS_AS(parse_density("gauss:0,0,-1"), InputError);
  CHECK_THROWS_AS(parse_density("cubic"), InputError);
}

TEST_CASE("cli solve and verify round trip") {
  TempDir tmp;
  const auto sq = tmp.file("square.txt", "0 0\n1 0\n1 1\n0 1\n");
  const auto doc_path = (tmp.path / "doc.json").string();
  const auto r = cli({"solve", "--input", sq, "--m", "3", "--out", doc_path});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(read_file(doc_path));
  CHECK(doc["cells"].size() == 3);
  CHECK(doc["report"]["pass"] == true);
  const auto v = cli({"verify", "--input", sq, doc_path});
  CHECK(v.code == 0);
  CHECK(nlohmann::json::parse(v.out)["pass"] == true);
}

TEST_CASE("cli verify fails on a bad document") {
  TempDir tmp;
  const auto sq = tmp.file("square.txt", "0 0\n1 0\n1 1\n0 1\n");
  nlohmann::json doc;
  doc["cells"] = {{{0, 0}, {0.9, 0}, {0.9, 1}, {0, 1}}};
  const auto d = tmp.file("doc.json", doc.dump());
  CHECK(cli({"verify", "--input", sq, d}).code == 2);
  CHECK(cli({"verify", "--input", sq, tmp.file("junk.json", "{")}).code == 1);
}

TEST_CASE("cli input errors exit with 1") {
  TempDir tmp;
  const auto bad = tmp.file("bad.txt", "0 0\n1 0\n1 one\n");
  const auto r = cli({"solve", "--input", bad, "--m", "2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 3") != std::string::npos);
  const auto sq = tmp.file("square.txt", "0 0\n1 0\n1 1\n0 1\n");
  CHECK(cli({"sweep", "--input", sq, "--m", "2", "--grid", "0"}).code == 1);
  CHECK(cli({"solve", "--input", sq, "--m", "0"}).code == 1);
  CHECK(cli({"solve", "--input", sq, "--m", "2", "--density", "cubic"}).code == 1);
  CHECK(cli({"solve", "--input", (tmp.path / "missing.txt").string(), "--m", "2"}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
}

TEST_CASE("cli sweep of the square gives coinciding curves") {
  TempDir tmp;
  const auto sq = tmp.file("square.txt", "0 0\n1 0\n1 1\n0 1\n");
  const auto r = cli({"sweep", "--input", sq, "--m", "1", "--grid", "16"});
  REQUIRE(r.code == 0);
  std::istringstream rows(r.out);
  std::string line;
  int n = 0;
  while (std::getline(rows, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    double t, yl, ym;
    std::istringstream(line) >> t >> yl >> ym;
    CHECK(std::abs(yl - ym) < 1e-9);
    ++n;
  }
  CHECK(n >= 16);
}

TEST_CASE("cli output is deterministic") {
  TempDir tmp;
  const auto tri = tmp.file("tri.txt", "0 0\n2 0\n0 1\n");
  const std::vector<std::string> args{"solve", "--input", tri, "--m", "6", "--seed", "7"};
  const auto a = cli(args);
  const auto b = cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.err == b.err);
}
