#pragma once

/// @file io.hpp
/// Text formats: polygon input, density specs, partition documents, SVG
/// figures and sweep tables.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "equipart/recursive.hpp"
#include "equipart/sweep.hpp"
#include "equipart/verify.hpp"

namespace equipart {

/// Malformed user input; the message names the offending line or field.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Counterclockwise vertex list, either as JSON ([[x, y], ...] or
/// {"vertices": [...]}) or as one "x y" / "x, y" pair per line with '#'
/// comments.
ConvexPolygon parse_polygon(const std::string& text);
ConvexPolygon read_polygon(const std::string& path);

/// "uniform", "linear:a,b,c" (max(0, a x + b y + c)) or "gauss:cx,cy,s".
Density parse_density(const std::string& spec);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

struct DocumentInfo {
  std::string functional;
  std::string density;
  std::uint64_t seed = 0;
};

nlohmann::json partition_document(const ConvexPolygon& body, const PartitionTree& tree, const DocumentInfo& info,
                                  const Report& report);
/// Leaf vertex lists of a partition document ("cells" field).
std::vector<std::vector<Point2>> document_cells(const nlohmann::json& doc);

/// One path per cell on a viewBox fitted to the body, fixed colour cycle.
std::string partition_svg(const ConvexPolygon& body, const std::vector<ConvexPolygon>& cells);
/// Both branch curves over t in [0, 2 pi) with the crossing marked.
std::string curves_svg(const BranchCurve& gL, const BranchCurve& gM, const Crossing& crossing);
/// Tab-separated rows "t y_L y_M" over the common grid.
std::string sweep_table(const BranchCurve& gL, const BranchCurve& gM);

}  // namespace equipart
