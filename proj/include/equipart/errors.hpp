#pragma once

#include <stdexcept>
#include <string>

namespace equipart {

/// Invalid or degenerate geometric input (non-convex vertex list, duplicate
/// vertices, zero area, ...).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A site configuration that is not a point of the configuration space
/// (coincident sites) or an epicycle configuration whose points collide.
class DegenerateConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A functional was about to be evaluated on an empty or below-floor cell.
class DegenerateCell : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver exhausted its budget. `best_objective` carries the
/// best residual norm seen (infinity when nothing was evaluable).
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double best_objective)
      : std::runtime_error(what), best_objective_(best_objective) {}
  double best_objective() const noexcept { return best_objective_; }

 private:
  double best_objective_;
};

}  // namespace equipart
