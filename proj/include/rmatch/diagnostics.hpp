#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rmatch/graph.hpp"
#include "rmatch/matching.hpp"
#include "rmatch/rng.hpp"

namespace rmatch {

struct DiagnosticsConfig {
  std::size_t k = 40;
  std::size_t k0 = 1;
  std::size_t pair_samples = 100;

  /// k = 40, k0 = ceil(3 log_4 n).
  static DiagnosticsConfig bipartite_defaults(std::size_t n);
  /// k = 20, k0 = ceil(3 log_3 n).
  static DiagnosticsConfig general_defaults(std::size_t n);
};

struct Arc {
  Vertex to = 0;
  double w = 0.0;
  bool matching = false;
};

/// Oriented alternating structure built from a matching.
///
/// Bipartite: vertices are A_{r+1} (ids 0..r) followed by B (ids r+1 ...).
/// Non-matching edges inside the k-cheapest relation are A -> B arcs with
/// their weight; matching edges are B -> A arcs with negated weight.
///
/// General: vertex ids are graph ids. Non-matching edges get a random
/// orientation and each vertex keeps its k cheapest out-arcs; every
/// matching edge is added in both directions with negated weight.
///
/// Walks must alternate non-matching and matching arcs, start and end with
/// a non-matching arc, so every a -> b path found has odd length.
class AlternatingDigraph {
 public:
  AlternatingDigraph(std::size_t num_vertices, std::vector<std::vector<Arc>> out,
                     std::vector<char> matched, bool bipartite, std::size_t num_left);

  std::size_t num_vertices() const { return out_.size(); }
  std::span<const Arc> out_arcs(Vertex x) const { return out_[x]; }
  std::size_t num_arcs() const;
  bool matched(Vertex x) const { return matched_[x] != 0; }
  bool bipartite() const { return bipartite_; }
  /// Bipartite only: |A_{r+1}|; right vertex v has id num_left() + v.
  std::size_t num_left() const { return num_left_; }
  Vertex left_id(Vertex u) const { return u; }
  Vertex right_id(Vertex v) const { return static_cast<Vertex>(num_left_) + v; }

 private:
  std::vector<std::vector<Arc>> out_;
  std::vector<char> matched_;
  bool bipartite_ = false;
  std::size_t num_left_ = 0;
};

/// m must be a matching of A_r (r = m.size()) into B in g.
AlternatingDigraph build_alternating_digraph(const BipartiteWeightedGraph& g,
                                             const Matching& m,
                                             const DiagnosticsConfig& cfg);

/// m must be a perfect matching of g; rng drives the edge orientation.
AlternatingDigraph build_alternating_digraph(const WeightedGraph& g, const Matching& m,
                                             const DiagnosticsConfig& cfg, RngStream& rng);

/// Bipartite: a uniform in A_{r+1}, b uniform in B. General: u != v uniform.
std::vector<std::pair<Vertex, Vertex>> sample_pairs(const AlternatingDigraph& d,
                                                    std::size_t count, RngStream& rng);

struct DiameterReport {
  /// Alternating hop count per sampled pair, -1 when unreachable.
  std::vector<int> hops;
  int max_hops = 0;  // over reachable pairs
  std::size_t unreachable = 0;
  /// Per distinct source: hops to the nearest unmatched target (the
  /// augmenting-path variant). Empty when every vertex is matched.
  int max_hops_to_free = 0;
  std::size_t unreachable_free = 0;
  std::size_t sources_probed = 0;
};

/// BFS over (vertex, next-arc-kind) states. pairs must be non-empty.
DiameterReport ab_diameter(const AlternatingDigraph& d,
                           std::span<const std::pair<Vertex, Vertex>> pairs);

/// Cheapest alternating a -> b walk, by label-correcting search that
/// tolerates negative arcs; +inf if b is unreachable. Throws
/// OptimalityViolation when a negative alternating cycle is reachable from a.
double min_alternating_cost(const AlternatingDigraph& d, Vertex a, Vertex b);

/// Largest member weight; throws InvalidArgument for an empty matching.
double max_matching_edge_cost(std::span<const WeightedEdge> edges, const Matching& m);

}  // namespace rmatch
