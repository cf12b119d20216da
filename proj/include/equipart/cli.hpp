#pragma once

/// @file cli.hpp
/// Command implementations behind the equipart executable.
/// Exit codes: 0 verified pass, 1 input error, 2 non-convergence or a
/// failing verification.

#include <cstdint>
#include <iosfwd>
#include <string>

namespace equipart {

struct CliOptions {
  std::string input;
  std::string partition;
  std::string functional = "perimeter";
  std::string density = "uniform";
  std::size_t m = 2;
  std::uint64_t seed = 0;
  /// Verification tolerances; the solver runs 1000x tighter in f.
  double tol_area = 1e-6;
  double tol_f = 1e-5;
  int grid = 64;
  std::string out;
  std::string svg;
  int threads = 1;
};

int cmd_solve(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CliOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv ("solve", "sweep" or "verify" plus flags) and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace equipart
