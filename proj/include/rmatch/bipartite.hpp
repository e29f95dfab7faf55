#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rmatch/graph.hpp"
#include "rmatch/matching.hpp"

namespace rmatch {

/// Potentials for the r-matching LP of A_r into B:
///   left[u] + right[v] <= w(u, v) for every edge with u < r,
///   right[v] <= 0, with right[v] == 0 when v is unmatched.
struct DualCertificate {
  std::vector<double> left;   // size r
  std::vector<double> right;  // size n_right
};

/// Minimum-cost matchings M_1, ..., M_rmax of A_r = {a_0..a_{r-1}} into B.
struct MatchingSequence {
  std::size_t r_max = 0;
  /// costs[i] = C(n, i + 1).
  std::vector<double> costs;
  /// increments[i] = C(n, i + 1) - C(n, i), with C(n, 0) = 0.
  std::vector<double> increments;
  /// Snapshots after each step; filled only when keep_matchings is set.
  std::vector<Matching> matchings;
  std::vector<DualCertificate> certificates;
  /// Sorted right endpoints B_r per step; filled with keep_matchings.
  std::vector<std::vector<Vertex>> matched_right_sets;
  /// Always filled: the matching and potentials after step r_max.
  Matching final_matching;
  DualCertificate final_certificate;

  /// C(n, r) for 0 <= r <= r_max.
  double cost(std::size_t r) const { return r == 0 ? 0.0 : costs[r - 1]; }
};

/// Successive shortest augmenting paths with vertex potentials.
///
/// Each step adds the next left vertex and runs a Dijkstra search over
/// reduced costs from it, alternating non-matching edges A -> B and matching
/// edges B -> A, until the nearest free right vertex is settled. Potentials
/// of settled vertices are then shifted so the new path is tight and every
/// edge keeps a nonnegative reduced cost. One call to step() costs
/// O(E log V) in the worst case and usually far less.
class IncrementalAssignment {
 public:
  explicit IncrementalAssignment(const BipartiteWeightedGraph& g);

  /// Extend M_r to M_{r+1} by matching a_r. Throws NoMatching(r + 1) if no
  /// augmenting path exists, and InvalidArgument when A is exhausted.
  /// Returns the cost increment.
  double step();

  std::size_t size() const { return r_; }
  double cost() const { return cost_; }
  /// Right partner of a_u, or -1.
  Vertex mate_of_left(Vertex u) const { return mate_left_[u]; }
  Vertex mate_of_right(Vertex v) const { return mate_right_[v]; }
  Matching matching() const;
  DualCertificate certificate() const;
  std::vector<Vertex> matched_right() const;

 private:
  const BipartiteWeightedGraph* g_;
  std::size_t r_ = 0;
  double cost_ = 0.0;
  std::vector<Vertex> mate_left_;
  std::vector<EdgeId> mate_edge_;
  std::vector<Vertex> mate_right_;
  std::vector<double> pot_left_;
  std::vector<double> pot_right_;
  // Scratch space reused across steps.
  std::vector<double> dist_left_;
  std::vector<double> dist_right_;
  std::vector<EdgeId> pred_right_;
  std::vector<char> done_right_;
  std::vector<Vertex> touched_right_;
  std::vector<Vertex> settled_left_;
};

/// Runs r_max steps. keep_matchings stores per-step snapshots, certificates
/// and B_r sets.
MatchingSequence solve_sequence(const BipartiteWeightedGraph& g, std::size_t r_max,
                                bool keep_matchings = false);

/// Minimum-cost perfect matching; needs n_left == n_right. Throws
/// NoPerfectMatching when none exists.
Matching solve_assignment(const BipartiteWeightedGraph& g);

/// Exhaustive search over injective maps A_r -> B. Needs n_left <= 9 and
/// n_right <= 12. Throws NoMatching(r) when no r-matching exists.
Matching brute_force_bipartite(const BipartiteWeightedGraph& g, std::size_t r);

/// Checks the r-matching optimality conditions for matching m of A_r:
/// feasibility on edges of A_r, tightness on matched edges, right
/// potentials nonpositive and zero on unmatched right vertices.
bool check_certificate(const BipartiteWeightedGraph& g, std::size_t r, const Matching& m,
                       const DualCertificate& cert, double tol = 1e-9,
                       std::string* why = nullptr);

}  // namespace rmatch
