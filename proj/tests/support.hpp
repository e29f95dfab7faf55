#pragma once

#include <vector>

#include "rmatch/graph.hpp"
#include "rmatch/rng.hpp"

namespace rmatch::testing {

inline RngStream stream(std::uint64_t seed, std::string_view purpose, std::uint64_t i = 0) {
  return derive_stream(seed, purpose, i);
}

// Dense 2x2 or larger bipartite instance from a row-major cost table.
inline BipartiteWeightedGraph bipartite_from_rows(const std::vector<std::vector<double>>& rows) {
  std::vector<WeightedEdge> edges;
  const auto nl = static_cast<Vertex>(rows.size());
  const auto nr = static_cast<Vertex>(rows.empty() ? 0 : rows[0].size());
  for (Vertex u = 0; u < nl; ++u) {
    for (Vertex v = 0; v < nr; ++v) edges.push_back({u, v, rows[u][v]});
  }
  return {nl, nr, std::move(edges)};
}

// A random permutation of 0..n-1 (Fisher-Yates).
inline std::vector<Vertex> random_permutation(Vertex n, RngStream& rng) {
  std::vector<Vertex> perm(n);
  for (Vertex i = 0; i < n; ++i) perm[i] = i;
  for (Vertex i = n - 1; i > 0; --i) {
    const auto j = static_cast<Vertex>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace rmatch::testing
