#include "span/train/pattern.hpp"

#include <stdexcept>

namespace span::train {

PatternSpec PatternSpec::densify(int threshold) {
  PatternSpec p;
  p.kind = Kind::Densify;
  p.threshold = threshold;
  return p;
}

PatternSpec PatternSpec::new_cross_type_edge() {
  PatternSpec p;
  p.kind = Kind::NewCrossTypeEdge;
  return p;
}

PatternSpec PatternSpec::from_predicate(std::string name, Predicate predicate) {
  if (!predicate) throw std::invalid_argument("custom pattern needs a predicate");
  PatternSpec p;
  p.kind = Kind::Custom;
  p.name = std::move(name);
  p.custom = std::move(predicate);
  return p;
}

PatternSpec PatternSpec::parse(const std::string& text) {
  if (text == "new-cross-type-edge") return new_cross_type_edge();
  if (text == "densify") return densify(0);
  const std::string prefix = "densify:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    int threshold = 0;
    try {
      threshold = std::stoi(text.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - prefix.size() || threshold < 0) {
      throw std::invalid_argument("bad densify threshold in pattern '" + text + "'");
    }
    return densify(threshold);
  }
  throw std::invalid_argument("unknown pattern '" + text + "' (expected densify[:N] or new-cross-type-edge)");
}

bool PatternSpec::holds(const graph::InducedSubgraph& now, const graph::InducedSubgraph& later,
                        std::span<const int> types) const {
  const std::size_t n = now.nodes.size();
  if (later.nodes != now.nodes) throw std::invalid_argument("pattern: subgraphs cover different node sets");
  switch (kind) {
    case Kind::Densify:
      return later.num_edges() > now.num_edges() + static_cast<std::size_t>(threshold);
    case Kind::NewCrossTypeEdge:
      if (types.size() != n) throw std::invalid_argument("new-cross-type-edge needs a type for every node");
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (types[i] != types[j] && later.edge(i, j) && !now.edge(i, j)) return true;
        }
      }
      return false;
    case Kind::Custom:
      return custom(now, later, types);
  }
  return false;
}

std::string PatternSpec::to_string() const {
  switch (kind) {
    case Kind::Densify:
      return threshold == 0 ? "densify" : "densify:" + std::to_string(threshold);
    case Kind::NewCrossTypeEdge:
      return "new-cross-type-edge";
    case Kind::Custom:
      return name;
  }
  return {};
}

}  // namespace span::train
