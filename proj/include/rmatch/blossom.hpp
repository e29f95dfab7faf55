#pragma once

#include <string>
#include <vector>

#include "rmatch/graph.hpp"
#include "rmatch/matching.hpp"

namespace rmatch {

/// An odd vertex set with its dual value. In the minimization convention
/// used here the dual is <= 0.
struct Blossom {
  std::vector<Vertex> members;  // sorted
  double dual = 0.0;
};

/// Dual solution of the perfect matching LP
///   min w.x  s.t.  x(delta(v)) = 1,  x(E(B)) <= (|B| - 1) / 2,  x >= 0.
/// Feasibility: y_u + y_v + sum_{B containing u, v} z_B <= w(u, v), z_B <= 0.
struct BlossomState {
  std::vector<double> vertex_duals;
  std::vector<Blossom> blossoms;
};

struct PerfectMatchingResult {
  Matching matching;
  BlossomState certificate;
};

/// Exact minimum-cost perfect matching by Edmonds' blossom algorithm with
/// explicit dual updates (O(n^3) with per-stage best-edge bookkeeping).
/// Throws OddVertexCount for odd n and NoPerfectMatching when none exists.
PerfectMatchingResult solve_perfect_matching(const WeightedGraph& g);

/// Enumerates all perfect matchings, always pairing the lowest free vertex
/// next and trying its edges in edge-id order. n <= 12.
Matching brute_force_general(const WeightedGraph& g);

struct CertificateReport {
  bool ok = true;
  std::vector<std::string> violations;

  explicit operator bool() const { return ok; }
};

/// Checks that m is a perfect matching of g and that state proves it
/// optimal: dual feasibility, nonpositive blossom duals, laminar odd
/// blossoms, tight matched edges, and full blossoms wherever z_B != 0.
/// Independent of the solver; only uses g, m and state.
CertificateReport verify_certificate(const WeightedGraph& g, const Matching& m,
                                     const BlossomState& state, double tol = 1e-9);

}  // namespace rmatch
