#include "rmatch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "rmatch/error.hpp"

namespace rmatch {
namespace {

std::size_t ceil_log_times3(std::size_t n, double base) {
  if (n <= 1) return 1;
  return static_cast<std::size_t>(
      std::ceil(3.0 * std::log(static_cast<double>(n)) / std::log(base) - 1e-12));
}

// Leading k entries of ids ordered by (weight, id).
template <class WeightOf>
void keep_cheapest(std::vector<EdgeId>& ids, std::size_t k, WeightOf weight) {
  auto less = [&](EdgeId a, EdgeId b) {
    const double wa = weight(a), wb = weight(b);
    return wa < wb || (wa == wb && a < b);
  };
  if (ids.size() > k) {
    std::nth_element(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), less);
    ids.resize(k);
  }
  std::sort(ids.begin(), ids.end(), less);
}

}  // namespace

DiagnosticsConfig DiagnosticsConfig::bipartite_defaults(std::size_t n) {
  return {40, ceil_log_times3(n, 4.0), 100};
}

DiagnosticsConfig DiagnosticsConfig::general_defaults(std::size_t n) {
  return {20, ceil_log_times3(n, 3.0), 100};
}

AlternatingDigraph::AlternatingDigraph(std::size_t num_vertices,
                                       std::vector<std::vector<Arc>> out,
                                       std::vector<char> matched, bool bipartite,
                                       std::size_t num_left)
    : out_(std::move(out)),
      matched_(std::move(matched)),
      bipartite_(bipartite),
      num_left_(num_left) {
  if (out_.size() != num_vertices || matched_.size() != num_vertices) {
    throw InvalidArgument("alternating digraph: inconsistent sizes");
  }
}

std::size_t AlternatingDigraph::num_arcs() const {
  std::size_t total = 0;
  for (const auto& arcs : out_) total += arcs.size();
  return total;
}

AlternatingDigraph build_alternating_digraph(const BipartiteWeightedGraph& g,
                                             const Matching& m,
                                             const DiagnosticsConfig& cfg) {
  if (cfg.k < 1) throw InvalidArgument("k must be at least 1");
  const std::size_t r = m.size();
  const std::size_t na = std::min<std::size_t>(r + 1, g.n_left());
  const std::size_t nb = g.n_right();
  const auto num = na + nb;

  std::vector<char> is_matching_edge(g.num_edges(), 0);
  std::vector<char> matched(num, 0);
  for (const auto& p : m.pairs) {
    if (static_cast<std::size_t>(p.u) >= na) {
      throw InvalidArgument("matching must cover a prefix A_r of the left side");
    }
    is_matching_edge[p.edge] = 1;
    matched[p.u] = 1;
    matched[na + p.v] = 1;
  }

  auto weight = [&](EdgeId id) { return g.edge(id).w; };
  std::vector<char> selected(g.num_edges(), 0);
  std::vector<EdgeId> ids;
  for (std::size_t a = 0; a < na; ++a) {
    const auto adj = g.left_adjacency(static_cast<Vertex>(a));
    ids.assign(adj.begin(), adj.end());
    keep_cheapest(ids, cfg.k, weight);
    for (EdgeId id : ids) selected[id] = 1;
  }
  for (std::size_t b = 0; b < nb; ++b) {
    ids.clear();
    for (EdgeId id : g.right_adjacency(static_cast<Vertex>(b))) {
      if (static_cast<std::size_t>(g.edge(id).u) < na) ids.push_back(id);
    }
    keep_cheapest(ids, cfg.k, weight);
    for (EdgeId id : ids) selected[id] = 1;
  }

  std::vector<std::vector<Arc>> out(num);
  for (std::size_t id = 0; id < g.num_edges(); ++id) {
    const auto& e = g.edge(static_cast<EdgeId>(id));
    if (static_cast<std::size_t>(e.u) >= na) continue;
    const auto b = static_cast<Vertex>(na + e.v);
    if (is_matching_edge[id]) {
      out[b].push_back({e.u, -e.w, true});
    } else if (selected[id]) {
      out[e.u].push_back({b, e.w, false});
    }
  }
  return {num, std::move(out), std::move(matched), true, na};
}

AlternatingDigraph build_alternating_digraph(const WeightedGraph& g, const Matching& m,
                                             const DiagnosticsConfig& cfg, RngStream& rng) {
  if (cfg.k < 1) throw InvalidArgument("k must be at least 1");
  const std::size_t n = g.n();
  std::vector<char> is_matching_edge(g.num_edges(), 0);
  std::vector<char> matched(n, 0);
  for (const auto& p : m.pairs) {
    is_matching_edge[p.edge] = 1;
    matched[p.u] = matched[p.v] = 1;
  }

  std::vector<std::vector<EdgeId>> out_edges(n);
  std::vector<char> forward(g.num_edges(), 0);
  for (std::size_t id = 0; id < g.num_edges(); ++id) {
    if (is_matching_edge[id]) continue;
    const auto& e = g.edge(static_cast<EdgeId>(id));
    forward[id] = static_cast<char>(rng.next_u64() & 1);
    out_edges[forward[id] ? e.u : e.v].push_back(static_cast<EdgeId>(id));
  }

  auto weight = [&](EdgeId id) { return g.edge(id).w; };
  std::vector<std::vector<Arc>> out(n);
  for (std::size_t x = 0; x < n; ++x) {
    keep_cheapest(out_edges[x], cfg.k, weight);
    for (EdgeId id : out_edges[x]) {
      const auto& e = g.edge(id);
      out[x].push_back({forward[id] ? e.v : e.u, e.w, false});
    }
  }
  for (const auto& p : m.pairs) {
    const double w = g.edge(p.edge).w;
    out[p.u].push_back({p.v, -w, true});
    out[p.v].push_back({p.u, -w, true});
  }
  return {n, std::move(out), std::move(matched), false, 0};
}

std::vector<std::pair<Vertex, Vertex>> sample_pairs(const AlternatingDigraph& d,
                                                    std::size_t count, RngStream& rng) {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  pairs.reserve(count);
  if (d.bipartite()) {
    const std::size_t na = d.num_left();
    const std::size_t nb = d.num_vertices() - na;
    if (na == 0 || nb == 0) throw InvalidArgument("digraph has an empty side");
    for (std::size_t i = 0; i < count; ++i) {
      const auto a = static_cast<Vertex>(rng.next_below(na));
      const auto b = static_cast<Vertex>(na + rng.next_below(nb));
      pairs.emplace_back(a, b);
    }
  } else {
    const std::size_t n = d.num_vertices();
    if (n < 2) throw InvalidArgument("digraph needs two vertices");
    for (std::size_t i = 0; i < count; ++i) {
      const auto a = static_cast<Vertex>(rng.next_below(n));
      auto b = static_cast<Vertex>(rng.next_below(n - 1));
      if (b >= a) ++b;
      pairs.emplace_back(a, b);
    }
  }
  return pairs;
}

namespace {

// State 2x: at x, next arc must be non-matching. State 2x+1: next arc must
// be a matching arc. Targets are reached in odd states.
std::vector<int> alternating_bfs(const AlternatingDigraph& d, Vertex source) {
  const std::size_t states = 2 * d.num_vertices();
  std::vector<int> dist(states, -1);
  std::deque<std::size_t> queue;
  dist[2 * static_cast<std::size_t>(source)] = 0;
  queue.push_back(2 * static_cast<std::size_t>(source));
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    const auto x = static_cast<Vertex>(s / 2);
    const bool want_matching = s % 2 == 1;
    for (const auto& arc : d.out_arcs(x)) {
      if (arc.matching != want_matching) continue;
      const std::size_t t = 2 * static_cast<std::size_t>(arc.to) + (want_matching ? 0 : 1);
      if (dist[t] < 0) {
        dist[t] = dist[s] + 1;
        queue.push_back(t);
      }
    }
  }
  return dist;
}

}  // namespace

DiameterReport ab_diameter(const AlternatingDigraph& d,
                           std::span<const std::pair<Vertex, Vertex>> pairs) {
  if (pairs.empty()) throw InvalidArgument("ab_diameter needs at least one pair");
  DiameterReport report;
  report.hops.reserve(pairs.size());

  bool any_free = false;
  for (std::size_t x = 0; x < d.num_vertices(); ++x) {
    const bool target_side = !d.bipartite() || x >= d.num_left();
    if (target_side && !d.matched(static_cast<Vertex>(x))) any_free = true;
  }

  std::map<Vertex, std::vector<int>> cache;
  for (const auto& [a, b] : pairs) {
    auto it = cache.find(a);
    if (it == cache.end()) {
      it = cache.emplace(a, alternating_bfs(d, a)).first;
      ++report.sources_probed;
      if (any_free) {
        int best = -1;
        for (std::size_t x = 0; x < d.num_vertices(); ++x) {
          const bool target_side = !d.bipartite() || x >= d.num_left();
          if (!target_side || d.matched(static_cast<Vertex>(x)) ||
              static_cast<Vertex>(x) == a) {
            continue;
          }
          const int h = it->second[2 * x + 1];
          if (h >= 0 && (best < 0 || h < best)) best = h;
        }
        if (best < 0) {
          ++report.unreachable_free;
        } else {
          report.max_hops_to_free = std::max(report.max_hops_to_free, best);
        }
      }
    }
    const int h = it->second[2 * static_cast<std::size_t>(b) + 1];
    report.hops.push_back(h);
    if (h < 0) {
      ++report.unreachable;
    } else {
      report.max_hops = std::max(report.max_hops, h);
    }
  }
  return report;
}

double min_alternating_cost(const AlternatingDigraph& d, Vertex a, Vertex b) {
  const std::size_t states = 2 * d.num_vertices();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(states, kInf);
  std::vector<std::size_t> pops(states, 0);
  std::vector<char> queued(states, 0);
  std::deque<std::size_t> queue;
  const std::size_t start = 2 * static_cast<std::size_t>(a);
  dist[start] = 0.0;
  queue.push_back(start);
  queued[start] = 1;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    queued[s] = 0;
    // A state settled more often than there are states lies on a
    // negative cycle.
    if (++pops[s] > states) {
      throw OptimalityViolation("negative alternating cycle reachable from vertex " +
                                std::to_string(a));
    }
    const auto x = static_cast<Vertex>(s / 2);
    const bool want_matching = s % 2 == 1;
    for (const auto& arc : d.out_arcs(x)) {
      if (arc.matching != want_matching) continue;
      const std::size_t t = 2 * static_cast<std::size_t>(arc.to) + (want_matching ? 0 : 1);
      const double nd = dist[s] + arc.w;
      if (nd < dist[t] - 1e-12) {
        dist[t] = nd;
        if (!queued[t]) {
          queued[t] = 1;
          queue.push_back(t);
        }
      }
    }
  }
  return dist[2 * static_cast<std::size_t>(b) + 1];
}

double max_matching_edge_cost(std::span<const WeightedEdge> edges, const Matching& m) {
  if (m.empty()) throw InvalidArgument("max_matching_edge_cost of an empty matching");
  double best = 0.0;
  for (const auto& p : m.pairs) best = std::max(best, edges[p.edge].w);
  return best;
}

}  // namespace rmatch
