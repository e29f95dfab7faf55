#pragma once

#include <span>
#include <vector>

#include "rmatch/graph.hpp"

namespace rmatch {

struct MatchedPair {
  Vertex u = 0;
  Vertex v = 0;
  EdgeId edge = -1;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

/// Vertex-disjoint set of source-graph edges. For bipartite graphs pairs are
/// ordered by left vertex; for general graphs by smaller endpoint.
struct Matching {
  std::vector<MatchedPair> pairs;
  double cost = 0.0;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

/// Sum of member weights, accumulated in pair order.
double matching_weight(std::span<const WeightedEdge> edges, const Matching& m);

}  // namespace rmatch
