#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rmatch/rng.hpp"

namespace rmatch {

using Vertex = std::int32_t;
using EdgeId = std::int32_t;

struct WeightedEdge {
  Vertex u = 0;
  Vertex v = 0;
  double w = 0.0;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Bipartite graph with sides A = {0..n_left-1} and B = {0..n_right-1}.
/// An edge's u indexes A and its v indexes B. Immutable after construction.
class BipartiteWeightedGraph {
 public:
  BipartiteWeightedGraph() = default;
  /// Throws InvalidArgument on out-of-range indices, duplicate pairs, or
  /// negative / non-finite weights.
  BipartiteWeightedGraph(Vertex n_left, Vertex n_right,
                         std::vector<WeightedEdge> edges);

  Vertex n_left() const { return n_left_; }
  Vertex n_right() const { return n_right_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const WeightedEdge> edges() const { return edges_; }
  const WeightedEdge& edge(EdgeId e) const { return edges_[e]; }
  /// Incident edge ids of a_u, in increasing edge id order.
  std::span<const EdgeId> left_adjacency(Vertex u) const {
    return {left_adj_.data() + left_start_[u], left_adj_.data() + left_start_[u + 1]};
  }
  std::span<const EdgeId> right_adjacency(Vertex v) const {
    return {right_adj_.data() + right_start_[v], right_adj_.data() + right_start_[v + 1]};
  }

  /// Same vertex sets, edges sorted by (u, v).
  BipartiteWeightedGraph canonical() const;
  /// Copy with weights replaced by min(w, cap).
  BipartiteWeightedGraph truncated(double cap) const;
  /// Row-major n_left x n_right costs, +inf for missing pairs.
  /// Throws InvalidArgument when n_left * n_right > 10^6.
  std::vector<double> dense_costs() const;
  /// Cross-checks adjacency against the edge list.
  bool well_formed() const;

  friend bool operator==(const BipartiteWeightedGraph& a,
                         const BipartiteWeightedGraph& b) {
    return a.n_left_ == b.n_left_ && a.n_right_ == b.n_right_ && a.edges_ == b.edges_;
  }

 private:
  Vertex n_left_ = 0;
  Vertex n_right_ = 0;
  std::vector<WeightedEdge> edges_;
  std::vector<std::size_t> left_start_{0};
  std::vector<EdgeId> left_adj_;
  std::vector<std::size_t> right_start_{0};
  std::vector<EdgeId> right_adj_;
};

/// Simple undirected graph on {0..n-1}; edges are stored with u < v.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  /// Swaps endpoints into u < v. Throws InvalidArgument on loops,
  /// out-of-range indices, duplicates, or bad weights.
  WeightedGraph(Vertex n, std::vector<WeightedEdge> edges);

  Vertex n() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const WeightedEdge> edges() const { return edges_; }
  const WeightedEdge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const EdgeId> adjacency(Vertex v) const {
    return {adj_.data() + start_[v], adj_.data() + start_[v + 1]};
  }

  WeightedGraph canonical() const;
  WeightedGraph truncated(double cap) const;
  /// Edge (u, v) becomes (perm[u], perm[v]); perm must be a permutation.
  WeightedGraph relabeled(std::span<const Vertex> perm) const;
  bool well_formed() const;

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  Vertex n_ = 0;
  std::vector<WeightedEdge> edges_;
  std::vector<std::size_t> start_{0};
  std::vector<EdgeId> adj_;
};

using Graph = std::variant<BipartiteWeightedGraph, WeightedGraph>;

enum class Model { complete_bipartite, gnnp, complete, gnp };

std::string_view to_string(Model m);
/// Throws InvalidArgument for unknown names.
Model parse_model(std::string_view name);
inline bool is_bipartite(Model m) {
  return m == Model::complete_bipartite || m == Model::gnnp;
}
inline bool is_complete(Model m) {
  return m == Model::complete_bipartite || m == Model::complete;
}

struct ModelSpec {
  Model model = Model::complete_bipartite;
  Vertex n = 1;
  double p = 1.0;
  double rate = 1.0;

  /// Throws InvalidArgument when n < 1, p outside (0, 1], rate <= 0, or a
  /// complete model is given p != 1.
  void validate() const;
  /// Copy with p forced to 1 for complete models.
  ModelSpec normalized() const;
};

/// Draws the bipartite instance. Pairs (u, v) are visited in row-major order;
/// for gnnp each pair consumes one uniform for inclusion, then included
/// pairs consume one exponential weight draw.
BipartiteWeightedGraph generate_bipartite(const ModelSpec& spec, RngStream& rng);
/// Same for the general models, pairs u < v in lexicographic order.
WeightedGraph generate_general(const ModelSpec& spec, RngStream& rng);
Graph generate(const ModelSpec& spec, RngStream& rng);

struct SpecialVertexConfig {
  /// Rate of the exponential costs on edges at the added vertex. The
  /// normalized participation estimate built on it has O(lambda) relative
  /// bias.
  double lambda = 1e-2;
};

/// Copy of g with one extra right vertex b_n joined to every left vertex by
/// an exponential(lambda) edge. Requires n_left == n_right.
BipartiteWeightedGraph augment_special_vertex(const BipartiteWeightedGraph& g,
                                              const SpecialVertexConfig& cfg,
                                              RngStream& rng);

// Edge-list text format:
//   bipartite <n_left> <n_right>   |   general <n>
//   <u> <v> <w>                    (one per line)
// Lines starting with '#' and blank lines are ignored.
Graph parse_graph(std::istream& in);
Graph read_graph(const std::filesystem::path& path);
/// Canonical form: edges sorted by (u, v), weights with 17 significant digits.
void write_graph(const Graph& g, std::ostream& out);
void write_graph(const Graph& g, const std::filesystem::path& path);

}  // namespace rmatch
