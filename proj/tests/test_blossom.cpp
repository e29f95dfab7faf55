#include <gtest/gtest.h>

#include <cmath>

#include "rmatch/blossom.hpp"
#include "rmatch/error.hpp"
#include "support.hpp"

namespace rmatch {
namespace {

using testing::stream;

TEST(Blossom, SingleEdge) {
  const WeightedGraph g(2, {{0, 1, 0.4}});
  const auto res = solve_perfect_matching(g);
  EXPECT_DOUBLE_EQ(res.matching.cost, 0.4);
  EXPECT_TRUE(verify_certificate(g, res.matching, res.certificate));
}

TEST(Blossom, TrianglePlusPendant) {
  const WeightedGraph g(4, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {2, 3, 5}});
  const auto res = solve_perfect_matching(g);
  EXPECT_DOUBLE_EQ(res.matching.cost, 6.0);
  ASSERT_EQ(res.matching.size(), 2u);
  EXPECT_EQ(res.matching.pairs[0].u, 0);
  EXPECT_EQ(res.matching.pairs[0].v, 1);
  EXPECT_EQ(res.matching.pairs[1].u, 2);
  EXPECT_EQ(res.matching.pairs[1].v, 3);
  EXPECT_TRUE(verify_certificate(g, res.matching, res.certificate));
}

TEST(Blossom, ErrorCases) {
  EXPECT_THROW(solve_perfect_matching(WeightedGraph(3, {{0, 1, 1.0}})), OddVertexCount);
  const WeightedGraph star(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
  EXPECT_THROW(solve_perfect_matching(star), NoPerfectMatching);
  EXPECT_THROW(brute_force_general(star), NoPerfectMatching);
  EXPECT_THROW(brute_force_general(WeightedGraph(14, {})), InvalidArgument);
  EXPECT_THROW(brute_force_general(WeightedGraph(3, {})), OddVertexCount);
  EXPECT_TRUE(solve_perfect_matching(WeightedGraph(0, {})).matching.empty());
}

TEST(BruteForceGeneral, Examples) {
  EXPECT_DOUBLE_EQ(brute_force_general(WeightedGraph(2, {{0, 1, 0.3}})).cost, 0.3);
  const WeightedGraph k4(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {1, 2, 1}, {1, 3, 1}, {2, 3, 1}});
  const auto m = brute_force_general(k4);
  EXPECT_DOUBLE_EQ(m.cost, 2.0);
  // Lowest free vertex first, its edges in id order, strict improvement only.
  EXPECT_EQ(m.pairs[0].edge, 0);
  EXPECT_EQ(m.pairs[1].edge, 5);
  const WeightedGraph path(4, {{0, 1, 1}, {1, 2, 10}, {2, 3, 1}});
  const auto mp = brute_force_general(path);
  EXPECT_DOUBLE_EQ(mp.cost, 2.0);
  EXPECT_EQ(mp.pairs[0].v, 1);
  EXPECT_EQ(mp.pairs[1].u, 2);
}

TEST(Blossom, OracleEquivalenceFiveHundredInstances) {
  const Vertex sizes[] = {4, 6, 8, 10};
  const double probs[] = {0.5, 0.9};
  int infeasible = 0;
  for (int i = 0; i < 500; ++i) {
    auto rng = stream(1, "blossom-oracle", i);
    const Vertex n = sizes[i % 4];
    const double p = probs[(i / 4) % 2];
    const auto g = generate_general({Model::gnp, n, p}, rng);
    SCOPED_TRACE("instance " + std::to_string(i));
    Matching expected;
    bool oracle_ok = true;
    try {
      expected = brute_force_general(g);
    } catch (const NoPerfectMatching&) {
      oracle_ok = false;
    }
    if (!oracle_ok) {
      ++infeasible;
      EXPECT_THROW(solve_perfect_matching(g), NoPerfectMatching);
      continue;
    }
    const auto res = solve_perfect_matching(g);
    ASSERT_NEAR(res.matching.cost, expected.cost, 1e-9);
    const auto report = verify_certificate(g, res.matching, res.certificate);
    ASSERT_TRUE(report) << (report.violations.empty() ? "" : report.violations[0]);
  }
  EXPECT_GT(infeasible, 0);
}

TEST(Blossom, DenseSmallOracleWithIntegerTies) {
  // Small integer weights force ties and many blossoms.
  for (int i = 0; i < 300; ++i) {
    auto rng = stream(2, "ties", i);
    const auto n = static_cast<Vertex>(2 * (2 + rng.next_below(5)));
    std::vector<WeightedEdge> edges;
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) {
        if (rng.next_unit() < 0.7) edges.push_back({u, v, static_cast<double>(rng.next_below(4))});
      }
    }
    const WeightedGraph g(n, std::move(edges));
    double expected = 0.0;
    try {
      expected = brute_force_general(g).cost;
    } catch (const NoPerfectMatching&) {
      EXPECT_THROW(solve_perfect_matching(g), NoPerfectMatching);
      continue;
    }
    const auto res = solve_perfect_matching(g);
    ASSERT_NEAR(res.matching.cost, expected, 1e-9) << "instance " << i;
    ASSERT_TRUE(verify_certificate(g, res.matching, res.certificate)) << "instance " << i;
  }
}

TEST(Blossom, PermutationInvariance) {
  for (int i = 0; i < 50; ++i) {
    auto rng = stream(3, "perm", i);
    const auto g = generate_general({Model::gnp, 40, 0.3}, rng);
    const auto perm = testing::random_permutation(40, rng);
    const auto h = g.relabeled(perm);
    double a = 0.0, b = 0.0;
    try {
      a = solve_perfect_matching(g).matching.cost;
    } catch (const NoPerfectMatching&) {
      EXPECT_THROW(solve_perfect_matching(h), NoPerfectMatching);
      continue;
    }
    const auto res = solve_perfect_matching(h);
    b = res.matching.cost;
    EXPECT_NEAR(a, b, 1e-9);
    EXPECT_TRUE(verify_certificate(h, res.matching, res.certificate));
  }
}

TEST(Blossom, LargerInstancesCertify) {
  for (int i = 0; i < 5; ++i) {
    auto rng = stream(4, "large", i);
    const auto g = generate_general({Model::gnp, 200, 0.25}, rng);
    const auto res = solve_perfect_matching(g);
    EXPECT_EQ(res.matching.size(), 100u);
    const auto report = verify_certificate(g, res.matching, res.certificate);
    EXPECT_TRUE(report) << (report.violations.empty() ? "" : report.violations[0]);
    EXPECT_NEAR(res.matching.cost, matching_weight(g.edges(), res.matching), 1e-12 * res.matching.cost);
  }
}

TEST(Certificate, SwappedMatchingFails) {
  const WeightedGraph g(4, {{0, 1, 1}, {2, 3, 1}, {0, 2, 3}, {1, 3, 3}});
  const auto res = solve_perfect_matching(g);
  ASSERT_TRUE(verify_certificate(g, res.matching, res.certificate));
  Matching worse;
  worse.pairs = {{0, 2, 2}, {1, 3, 3}};
  worse.cost = 6.0;
  EXPECT_FALSE(verify_certificate(g, worse, res.certificate));
}

TEST(Certificate, PerturbedDualFails) {
  for (int i = 0; i < 20; ++i) {
    auto rng = stream(5, "dual", i);
    const auto g = generate_general({Model::complete, 12}, rng);
    const auto res = solve_perfect_matching(g);
    ASSERT_TRUE(verify_certificate(g, res.matching, res.certificate));
    auto state = res.certificate;
    state.vertex_duals[rng.next_below(12)] += 1.0;
    const auto report = verify_certificate(g, res.matching, state);
    EXPECT_FALSE(report);
    EXPECT_FALSE(report.violations.empty());
  }
}

TEST(Certificate, StructuralViolations) {
  const WeightedGraph g(4, {{0, 1, 1}, {2, 3, 1}, {0, 2, 3}, {1, 3, 3}});
  const auto res = solve_perfect_matching(g);
  auto state = res.certificate;
  state.blossoms.push_back({{0, 1}, -0.1});  // even set
  EXPECT_FALSE(verify_certificate(g, res.matching, state));
  state = res.certificate;
  state.blossoms.push_back({{0, 1, 2}, 0.5});  // positive dual
  EXPECT_FALSE(verify_certificate(g, res.matching, state));
  Matching partial;
  partial.pairs = {res.matching.pairs[0]};
  EXPECT_FALSE(verify_certificate(g, partial, res.certificate));
}

}  // namespace
}  // namespace rmatch
