#pragma once

/// @file functional.hpp
/// Continuous real functions of a convex body.
///
/// A plain functional maps a polygon to a number. A stateful one also
/// returns the solver state that produced the number (the sub-partition of
/// a branch value) and accepts a state for a nearby body as an anchor, so
/// that repeated evaluations stay on one solution branch.

#include <functional>
#include <memory>
#include <string>

#include "equipart/geom2d.hpp"

namespace equipart {

struct PartitionNode;

class Functional {
 public:
  using State = std::shared_ptr<const PartitionNode>;

  struct Result {
    double value = 0.0;
    State state;
  };

  using Simple = std::function<double(const ConvexPolygon&)>;
  using Stateful = std::function<Result(const ConvexPolygon&, const State& anchor)>;

  Functional(std::string name, Simple f);
  static Functional stateful(std::string name, Stateful f);

  double operator()(const ConvexPolygon& p) const { return evaluate(p).value; }
  Result evaluate(const ConvexPolygon& p, const State& anchor = {}) const;

  bool is_stateful() const noexcept { return static_cast<bool>(stateful_); }
  const std::string& name() const noexcept { return name_; }

 private:
  Functional() = default;
  std::string name_;
  Simple simple_;
  Stateful stateful_;
};

Functional perimeter_functional();
Functional diameter_functional();
Functional width_functional();

/// "perimeter", "diameter" or "width"; throws std::invalid_argument otherwise.
Functional functional_by_name(const std::string& name);

}  // namespace equipart
