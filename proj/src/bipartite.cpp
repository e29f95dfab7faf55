#include "rmatch/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

#include "rmatch/error.hpp"

namespace rmatch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double matching_weight(std::span<const WeightedEdge> edges, const Matching& m) {
  double total = 0.0;
  for (const auto& p : m.pairs) total += edges[p.edge].w;
  return total;
}

IncrementalAssignment::IncrementalAssignment(const BipartiteWeightedGraph& g)
    : g_(&g),
      mate_left_(g.n_left(), -1),
      mate_edge_(g.n_left(), -1),
      mate_right_(g.n_right(), -1),
      pot_left_(g.n_left(), 0.0),
      pot_right_(g.n_right(), 0.0),
      dist_left_(g.n_left(), kInf),
      dist_right_(g.n_right(), kInf),
      pred_right_(g.n_right(), -1),
      done_right_(g.n_right(), 0) {}

double IncrementalAssignment::step() {
  const auto& g = *g_;
  if (r_ >= static_cast<std::size_t>(g.n_left())) {
    throw InvalidArgument("all left vertices are already matched");
  }
  const auto root = static_cast<Vertex>(r_);
  const auto edges = g.edges();

  using Item = std::pair<double, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;

  auto relax_from = [&](Vertex u) {
    const double du = dist_left_[u];
    const double pu = pot_left_[u];
    for (EdgeId id : g.left_adjacency(u)) {
      const auto& e = edges[id];
      const Vertex v = e.v;
      if (done_right_[v]) continue;
      const double reduced = std::max(0.0, e.w - pu - pot_right_[v]);
      const double nd = du + reduced;
      if (nd < dist_right_[v]) {
        if (dist_right_[v] == kInf) touched_right_.push_back(v);
        dist_right_[v] = nd;
        pred_right_[v] = id;
        heap.emplace(nd, v);
      }
    }
  };

  dist_left_[root] = 0.0;
  settled_left_.push_back(root);
  relax_from(root);

  Vertex target = -1;
  double reach = kInf;
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (done_right_[v] || d > dist_right_[v]) continue;
    done_right_[v] = 1;
    if (mate_right_[v] < 0) {
      target = v;
      reach = d;
      break;
    }
    const Vertex u = mate_right_[v];
    dist_left_[u] = d;
    settled_left_.push_back(u);
    relax_from(u);
  }

  if (target < 0) {
    for (Vertex v : touched_right_) {
      dist_right_[v] = kInf;
      done_right_[v] = 0;
      pred_right_[v] = -1;
    }
    for (Vertex u : settled_left_) dist_left_[u] = kInf;
    touched_right_.clear();
    settled_left_.clear();
    throw NoMatching(r_ + 1);
  }

  // Keep reduced costs nonnegative and make the shortest-path tree up to
  // the target tight.
  for (Vertex u : settled_left_) {
    if (dist_left_[u] < reach) pot_left_[u] += reach - dist_left_[u];
  }
  for (Vertex v : touched_right_) {
    if (done_right_[v] && dist_right_[v] < reach) pot_right_[v] -= reach - dist_right_[v];
  }

  Vertex v = target;
  while (true) {
    const EdgeId id = pred_right_[v];
    const Vertex u = edges[id].u;
    const Vertex previous = mate_left_[u];
    mate_left_[u] = v;
    mate_edge_[u] = id;
    mate_right_[v] = u;
    if (u == root) break;
    v = previous;
  }

  for (Vertex x : touched_right_) {
    dist_right_[x] = kInf;
    done_right_[x] = 0;
    pred_right_[x] = -1;
  }
  for (Vertex u : settled_left_) dist_left_[u] = kInf;
  touched_right_.clear();
  settled_left_.clear();

  ++r_;
  const double previous_cost = cost_;
  cost_ = 0.0;
  for (std::size_t u = 0; u < r_; ++u) cost_ += edges[mate_edge_[u]].w;
  return cost_ - previous_cost;
}

Matching IncrementalAssignment::matching() const {
  Matching m;
  m.pairs.reserve(r_);
  for (std::size_t u = 0; u < r_; ++u) {
    m.pairs.push_back({static_cast<Vertex>(u), mate_left_[u], mate_edge_[u]});
  }
  m.cost = cost_;
  return m;
}

DualCertificate IncrementalAssignment::certificate() const {
  return {std::vector<double>(pot_left_.begin(), pot_left_.begin() + r_), pot_right_};
}

std::vector<Vertex> IncrementalAssignment::matched_right() const {
  std::vector<Vertex> b(mate_left_.begin(), mate_left_.begin() + r_);
  std::sort(b.begin(), b.end());
  return b;
}

MatchingSequence solve_sequence(const BipartiteWeightedGraph& g, std::size_t r_max,
                                bool keep_matchings) {
  if (r_max > static_cast<std::size_t>(g.n_left())) {
    throw InvalidArgument("r_max exceeds the left side size");
  }
  MatchingSequence seq;
  seq.r_max = r_max;
  seq.costs.reserve(r_max);
  seq.increments.reserve(r_max);
  IncrementalAssignment solver(g);
  for (std::size_t r = 1; r <= r_max; ++r) {
    const double inc = solver.step();
    seq.costs.push_back(solver.cost());
    seq.increments.push_back(inc);
    if (keep_matchings) {
      seq.matchings.push_back(solver.matching());
      seq.certificates.push_back(solver.certificate());
      seq.matched_right_sets.push_back(solver.matched_right());
    }
  }
  seq.final_matching = solver.matching();
  seq.final_certificate = solver.certificate();
  return seq;
}

Matching solve_assignment(const BipartiteWeightedGraph& g) {
  if (g.n_left() != g.n_right()) {
    throw InvalidArgument("assignment needs n_left == n_right");
  }
  try {
    return solve_sequence(g, g.n_left()).final_matching;
  } catch (const NoMatching&) {
    throw NoPerfectMatching();
  }
}

Matching brute_force_bipartite(const BipartiteWeightedGraph& g, std::size_t r) {
  if (g.n_left() > 9 || g.n_right() > 12) {
    throw InvalidArgument("brute force limited to n_left <= 9, n_right <= 12");
  }
  if (r > static_cast<std::size_t>(g.n_left())) throw InvalidArgument("r exceeds n_left");
  const auto costs = g.dense_costs();
  const Vertex nr = g.n_right();

  std::vector<Vertex> current(r, -1), best;
  std::vector<char> used(nr, 0);
  double best_cost = kInf;

  // Depth-first over a_0..a_{r-1}, right vertices in increasing order; only
  // strictly cheaper completions replace the incumbent.
  auto recurse = [&](auto&& self, std::size_t i, double partial) -> void {
    if (i == r) {
      if (partial < best_cost) {
        best_cost = partial;
        best = current;
      }
      return;
    }
    for (Vertex v = 0; v < nr; ++v) {
      const double c = costs[i * nr + v];
      if (used[v] || c == kInf) continue;
      used[v] = 1;
      current[i] = v;
      self(self, i + 1, partial + c);
      used[v] = 0;
    }
  };
  recurse(recurse, 0, 0.0);
  if (best_cost == kInf) throw NoMatching(r);

  Matching m;
  for (std::size_t u = 0; u < r; ++u) {
    EdgeId id = -1;
    for (EdgeId e : g.left_adjacency(static_cast<Vertex>(u))) {
      if (g.edge(e).v == best[u]) id = e;
    }
    m.pairs.push_back({static_cast<Vertex>(u), best[u], id});
  }
  m.cost = matching_weight(g.edges(), m);
  return m;
}

bool check_certificate(const BipartiteWeightedGraph& g, std::size_t r, const Matching& m,
                       const DualCertificate& cert, double tol, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (cert.left.size() != r || cert.right.size() != static_cast<std::size_t>(g.n_right())) {
    return fail("certificate has the wrong shape");
  }
  if (m.size() != r) return fail("matching does not have r pairs");
  std::vector<char> covered_left(r, 0), covered_right(g.n_right(), 0);
  for (const auto& p : m.pairs) {
    if (p.edge < 0 || static_cast<std::size_t>(p.edge) >= g.num_edges()) {
      return fail("matched pair is not an edge");
    }
    const auto& e = g.edge(p.edge);
    if (e.u != p.u || e.v != p.v) return fail("matched pair does not match its edge");
    if (static_cast<std::size_t>(p.u) >= r) return fail("matched vertex outside A_r");
    if (covered_left[p.u] || covered_right[p.v]) return fail("matching is not disjoint");
    covered_left[p.u] = covered_right[p.v] = 1;
    const double slack = e.w - cert.left[p.u] - cert.right[p.v];
    if (std::abs(slack) > tol) {
      return fail("matched edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                  ") not tight");
    }
  }
  for (std::size_t u = 0; u < r; ++u) {
    for (EdgeId id : g.left_adjacency(static_cast<Vertex>(u))) {
      const auto& e = g.edge(id);
      if (cert.left[u] + cert.right[e.v] > e.w + tol) {
        return fail("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                    ") violates dual feasibility");
      }
    }
  }
  for (Vertex v = 0; v < g.n_right(); ++v) {
    if (cert.right[v] > tol) return fail("positive right potential");
    if (!covered_right[v] && std::abs(cert.right[v]) > tol) {
      return fail("unmatched right vertex with nonzero potential");
    }
  }
  return true;
}

}  // namespace rmatch
