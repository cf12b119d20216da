#include "equipart/functional.hpp"

#include <stdexcept>

namespace equipart {

Functional::Functional(std::string name, Simple f) : name_(std::move(name)), simple_(std::move(f)) {}

Functional Functional::stateful(std::string name, Stateful f) {
  Functional out;
  out.name_ = std::move(name);
  out.stateful_ = std::move(f);
  return out;
}

Functional::Result Functional::evaluate(const ConvexPolygon& p, const State& anchor) const {
  if (stateful_) return stateful_(p, anchor);
  return {simple_(p), nullptr};
}

Functional perimeter_functional() {
  return Functional("perimeter", [](const ConvexPolygon& p) { return perimeter(p); });
}

Functional diameter_functional() {
  return Functional("diameter", [](const ConvexPolygon& p) { return diameter(p); });
}

Functional width_functional() {
  return Functional("width", [](const ConvexPolygon& p) { return width(p); });
}

Functional functional_by_name(const std::string& name) {
  if (name == "perimeter") return perimeter_functional();
  if (name == "diameter") return diameter_functional();
  if (name == "width") return width_functional();
  throw std::invalid_argument("unknown functional '" + name + "' (expected perimeter, diameter or width)");
}

}  // namespace equipart
