#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rmatch/bipartite.hpp"
#include "rmatch/blossom.hpp"
#include "rmatch/diagnostics.hpp"
#include "rmatch/error.hpp"
#include "support.hpp"

namespace rmatch {
namespace {

using testing::bipartite_from_rows;
using testing::stream;

// Hand-built digraph: vertices 0..n-1, arcs (from, to, w, matching).
AlternatingDigraph manual(std::size_t n, std::size_t num_left,
                          const std::vector<std::tuple<Vertex, Vertex, double, bool>>& arcs) {
  std::vector<std::vector<Arc>> out(n);
  std::vector<char> matched(n, 0);
  for (const auto& [from, to, w, m] : arcs) {
    out[from].push_back({to, w, m});
    if (m) matched[from] = matched[to] = 1;
  }
  return {n, std::move(out), std::move(matched), true, num_left};
}

TEST(Config, Defaults) {
  const auto b = DiagnosticsConfig::bipartite_defaults(300);
  EXPECT_EQ(b.k, 40u);
  EXPECT_EQ(b.k0, 13u);
  const auto g = DiagnosticsConfig::general_defaults(300);
  EXPECT_EQ(g.k, 20u);
  EXPECT_EQ(g.k0, 16u);
  EXPECT_EQ(DiagnosticsConfig::bipartite_defaults(64).k0, 9u);
}

TEST(Build, EmptyMatchingOnlyForwardArcs) {
  const auto g = bipartite_from_rows({{3, 1, 2}, {1, 5, 4}, {2, 2, 0.5}});
  DiagnosticsConfig cfg;
  cfg.k = 1;
  const auto d = build_alternating_digraph(g, Matching{}, cfg);
  EXPECT_EQ(d.num_left(), 1u);
  EXPECT_EQ(d.num_vertices(), 4u);
  // A_1 = {a_0}: a_0 keeps its cheapest edge, and every b keeps its
  // cheapest neighbour inside A_1, which is a_0.
  EXPECT_EQ(d.num_arcs(), 3u);
  for (const auto& arc : d.out_arcs(0)) {
    EXPECT_FALSE(arc.matching);
    EXPECT_GE(arc.to, 1);
  }
  for (Vertex b = 1; b < 4; ++b) EXPECT_TRUE(d.out_arcs(b).empty());
}

TEST(Build, MatchedPairGivesNegatedBackwardArc) {
  const BipartiteWeightedGraph g(2, 2, {{0, 0, 0.8}, {1, 1, 0.3}, {1, 0, 0.6}});
  const auto seq = solve_sequence(g, 1);
  const auto d = build_alternating_digraph(g, seq.final_matching, DiagnosticsConfig{});
  const Vertex b0 = d.right_id(0);
  ASSERT_EQ(d.out_arcs(b0).size(), 1u);
  EXPECT_EQ(d.out_arcs(b0)[0].to, 0);
  EXPECT_DOUBLE_EQ(d.out_arcs(b0)[0].w, -0.8);
  EXPECT_TRUE(d.out_arcs(b0)[0].matching);
  EXPECT_TRUE(d.matched(0));
  EXPECT_TRUE(d.matched(b0));
  EXPECT_FALSE(d.matched(1));
}

TEST(Build, CompleteFiveByFiveKeepsEveryPair) {
  auto rng = stream(1, "k55");
  const auto g = generate_bipartite({Model::complete_bipartite, 5}, rng);
  const auto seq = solve_sequence(g, 4);
  const auto d = build_alternating_digraph(g, seq.final_matching, DiagnosticsConfig{});
  EXPECT_EQ(d.num_left(), 5u);
  EXPECT_EQ(d.num_arcs(), 25u);
  std::size_t forward = 0, backward = 0;
  for (Vertex x = 0; x < static_cast<Vertex>(d.num_vertices()); ++x) {
    for (const auto& arc : d.out_arcs(x)) {
      if (arc.matching) {
        ++backward;
        EXPECT_LT(arc.w, 0.0);
        EXPECT_GE(x, 5);
      } else {
        ++forward;
        EXPECT_GT(arc.w, 0.0);
        EXPECT_LT(x, 5);
      }
    }
  }
  EXPECT_EQ(forward, 21u);
  EXPECT_EQ(backward, 4u);
}

TEST(Build, ArcWeightsMatchGraph) {
  auto rng = stream(2, "weights");
  const auto g = generate_bipartite({Model::gnnp, 60, 0.3}, rng);
  const auto seq = solve_sequence(g, 50);
  DiagnosticsConfig cfg;
  cfg.k = 5;
  const auto d = build_alternating_digraph(g, seq.final_matching, cfg);
  const auto na = static_cast<Vertex>(d.num_left());
  for (Vertex x = 0; x < static_cast<Vertex>(d.num_vertices()); ++x) {
    std::size_t forward_out = 0;
    for (const auto& arc : d.out_arcs(x)) {
      const Vertex a = arc.matching ? arc.to : x;
      const Vertex b = (arc.matching ? x : arc.to) - na;
      double w = std::numeric_limits<double>::quiet_NaN();
      for (EdgeId e : g.left_adjacency(a)) {
        if (g.edge(e).v == b) w = g.edge(e).w;
      }
      EXPECT_DOUBLE_EQ(arc.w, arc.matching ? -w : w);
      if (!arc.matching) ++forward_out;
    }
    if (x >= na) {
      EXPECT_LE(d.out_arcs(x).size(), 1u);
    }
    // Own k choices plus choices made from the right side.
    if (x < na) {
      EXPECT_GE(forward_out + (d.matched(x) ? 1u : 0u), std::min<std::size_t>(5, g.left_adjacency(x).size()));
    }
  }
}

TEST(Diameter, SingleArc) {
  const auto d = manual(2, 1, {{0, 1, 0.3, false}});
  const std::vector<std::pair<Vertex, Vertex>> pairs{{0, 1}};
  const auto rep = ab_diameter(d, pairs);
  EXPECT_EQ(rep.max_hops, 1);
  EXPECT_EQ(rep.hops[0], 1);
  EXPECT_EQ(rep.unreachable, 0u);
  EXPECT_DOUBLE_EQ(min_alternating_cost(d, 0, 1), 0.3);
}

TEST(Diameter, LengthThreeAlternation) {
  // a0 -> b1 (0.5), b1 -> a1 matching (-0.2), a1 -> b2 (0.1). ids: a0=0, a1=1, b1=2, b2=3.
  const auto d = manual(4, 2, {{0, 2, 0.5, false}, {2, 1, -0.2, true}, {1, 3, 0.1, false}});
  const std::vector<std::pair<Vertex, Vertex>> pairs{{0, 3}, {0, 2}, {1, 2}};
  const auto rep = ab_diameter(d, pairs);
  EXPECT_EQ(rep.hops[0], 3);
  EXPECT_EQ(rep.hops[1], 1);
  EXPECT_EQ(rep.hops[2], -1);
  EXPECT_EQ(rep.max_hops, 3);
  EXPECT_EQ(rep.unreachable, 1u);
  EXPECT_NEAR(min_alternating_cost(d, 0, 3), 0.4, 1e-15);
  EXPECT_TRUE(std::isinf(min_alternating_cost(d, 1, 2)));
  // Nearest free target from a0 is b2 (b1 is matched).
  EXPECT_EQ(rep.max_hops_to_free, 3);
}

TEST(Diameter, EmptyPairsRejected) {
  const auto d = manual(2, 1, {{0, 1, 0.3, false}});
  EXPECT_THROW(ab_diameter(d, {}), InvalidArgument);
}

TEST(Diameter, HopsAreOddAndDeterministic) {
  auto rng = stream(3, "odd");
  const auto g = generate_bipartite({Model::gnnp, 120, 0.2}, rng);
  const auto seq = solve_sequence(g, 110);
  const auto d = build_alternating_digraph(g, seq.final_matching, DiagnosticsConfig::bipartite_defaults(120));
  auto p1 = stream(3, "pairs"), p2 = stream(3, "pairs");
  const auto pairs = sample_pairs(d, 100, p1);
  EXPECT_EQ(pairs, sample_pairs(d, 100, p2));
  const auto rep = ab_diameter(d, pairs);
  for (int h : rep.hops) {
    if (h >= 0) {
      EXPECT_EQ(h % 2, 1);
    }
  }
  const auto again = ab_diameter(d, pairs);
  EXPECT_EQ(rep.hops, again.hops);
  EXPECT_EQ(rep.max_hops_to_free, again.max_hops_to_free);
}

TEST(NegativeCycle, SuboptimalMatchingDetected) {
  const auto g = bipartite_from_rows({{1, 2, 9}, {3, 1, 9}, {9, 9, 9}});
  Matching bad;
  bad.pairs = {{0, 1, 1}, {1, 0, 3}};  // edge ids row-major: (0,1)=1, (1,0)=3
  bad.cost = 5.0;
  const auto d = build_alternating_digraph(g, bad, DiagnosticsConfig{});
  EXPECT_THROW(min_alternating_cost(d, 2, d.right_id(2)), OptimalityViolation);
  EXPECT_THROW(min_alternating_cost(d, 0, d.right_id(2)), OptimalityViolation);
}

TEST(NegativeCycle, AbsentForSolverOptimum) {
  for (int i = 0; i < 30; ++i) {
    auto rng = stream(4, "noneg", i);
    const auto g = generate_bipartite({Model::complete_bipartite, 12}, rng);
    const auto seq = solve_sequence(g, 8);
    const auto d = build_alternating_digraph(g, seq.final_matching, DiagnosticsConfig{});
    for (Vertex a = 0; a < 9; ++a) {
      for (Vertex b = 0; b < 12; ++b) {
        EXPECT_NO_THROW(min_alternating_cost(d, a, d.right_id(b)));
      }
    }
  }
}

TEST(NegativeCycle, GeneralSuboptimalDetected) {
  // 4-cycle 0-1-2-3-0 with cheap 0-1, 2-3; the matching {0-3, 1-2} is worse.
  const WeightedGraph g(4, {{0, 1, 1}, {1, 2, 5}, {2, 3, 1}, {0, 3, 5}});
  Matching bad;
  bad.pairs = {{0, 3, 3}, {1, 2, 1}};
  bad.cost = 10;
  DiagnosticsConfig cfg;
  cfg.k = 20;
  bool fired = false;
  for (int s = 0; s < 16 && !fired; ++s) {
    auto orient = stream(5, "orient", s);
    const auto d = build_alternating_digraph(g, bad, cfg, orient);
    for (Vertex a = 0; a < 4 && !fired; ++a) {
      for (Vertex b = 0; b < 4; ++b) {
        try {
          min_alternating_cost(d, a, b);
        } catch (const OptimalityViolation&) {
          fired = true;
        }
      }
    }
  }
  EXPECT_TRUE(fired);
}

TEST(AugmentingCost, MatchesSolverIncrement) {
  for (int i = 0; i < 30; ++i) {
    auto rng = stream(6, "augment", i);
    const auto g = generate_bipartite({Model::gnnp, 30, 0.5}, rng);
    MatchingSequence seq;
    try {
      seq = solve_sequence(g, 21);
    } catch (const NoMatching&) {
      continue;
    }
    const auto prev = solve_sequence(g, 20);
    const double inc = seq.cost(21) - prev.cost(20);
    DiagnosticsConfig full;
    full.k = 1000;
    DiagnosticsConfig truncated;
    truncated.k = 3;
    const auto d_full = build_alternating_digraph(g, prev.final_matching, full);
    const auto d_trunc = build_alternating_digraph(g, prev.final_matching, truncated);
    double best_full = std::numeric_limits<double>::infinity();
    double best_trunc = best_full;
    for (Vertex b = 0; b < 30; ++b) {
      if (d_full.matched(d_full.right_id(b))) continue;
      best_full = std::min(best_full, min_alternating_cost(d_full, 20, d_full.right_id(b)));
      best_trunc = std::min(best_trunc, min_alternating_cost(d_trunc, 20, d_trunc.right_id(b)));
    }
    EXPECT_NEAR(best_full, inc, 1e-9);
    EXPECT_GE(best_trunc, inc - 1e-9);
  }
}

TEST(General, DigraphStructure) {
  auto rng = stream(7, "general");
  const auto g = generate_general({Model::gnp, 60, 0.5}, rng);
  const auto res = solve_perfect_matching(g);
  auto orient = stream(7, "orient");
  const auto cfg = DiagnosticsConfig::general_defaults(60);
  const auto d = build_alternating_digraph(g, res.matching, cfg, orient);
  EXPECT_FALSE(d.bipartite());
  std::size_t matching_arcs = 0;
  for (Vertex x = 0; x < 60; ++x) {
    std::size_t forward = 0;
    for (const auto& arc : d.out_arcs(x)) {
      if (arc.matching) {
        ++matching_arcs;
        EXPECT_LT(arc.w, 0.0);
      } else {
        ++forward;
      }
    }
    EXPECT_LE(forward, cfg.k);
  }
  EXPECT_EQ(matching_arcs, 60u);
  auto probe = stream(7, "pairs");
  const auto pairs = sample_pairs(d, 100, probe);
  for (const auto& [a, b] : pairs) EXPECT_NE(a, b);
  const auto rep = ab_diameter(d, pairs);
  for (int h : rep.hops) {
    if (h >= 0) {
      EXPECT_EQ(h % 2, 1);
    }
  }
  for (const auto& [a, b] : pairs) EXPECT_NO_THROW(min_alternating_cost(d, a, b));
}

TEST(MaxEdge, Examples) {
  const std::vector<WeightedEdge> one{{0, 0, 0.7}};
  Matching m;
  m.pairs = {{0, 0, 0}};
  EXPECT_DOUBLE_EQ(max_matching_edge_cost(one, m), 0.7);
  const std::vector<WeightedEdge> three{{0, 0, 0.1}, {1, 1, 0.9}, {2, 2, 0.4}};
  m.pairs = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
  EXPECT_DOUBLE_EQ(max_matching_edge_cost(three, m), 0.9);
  EXPECT_THROW(max_matching_edge_cost(three, Matching{}), InvalidArgument);
}

}  // namespace
}  // namespace rmatch
