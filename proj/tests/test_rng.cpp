#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rmatch/error.hpp"
#include "rmatch/rng.hpp"
#include "rmatch/stats.hpp"

namespace rmatch {
namespace {

// Reference draws from an independent reimplementation of the documented
// formula (64-bit modular arithmetic in Python).
TEST(Rng, MatchesReferenceSequence) {
  RngStream a(1, 2);
  EXPECT_EQ(a.next_u64(), 0x3044eb4a575b8f23ULL);
  EXPECT_EQ(a.next_u64(), 0x0a71686350e4f311ULL);
  EXPECT_EQ(a.next_u64(), 0xf0952a22032cd7e0ULL);
  EXPECT_EQ(a.next_u64(), 0x4fc57477d3d37cc8ULL);
  RngStream z(0, 0);
  EXPECT_EQ(z.next_u64(), 0xfd0c822e52afcb14ULL);
  EXPECT_EQ(z.next_u64(), 0x003dbc13fc8879f8ULL);
  EXPECT_EQ(z.position(), 2u);
}

TEST(Rng, StreamIdDerivationReference) {
  EXPECT_EQ(fnv1a64("graph"), 0x32ec982977fe5287ULL);
  EXPECT_EQ(derive_stream_id(1, "trial", 0), 13266645461622914657ULL);
}

TEST(Rng, IdenticalKeysGiveIdenticalStreams) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DistinctStreamsLookIndependent) {
  RngStream a(42, 7), b(42, 8);
  const int n = 200000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  int equal = 0;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t xa = a.next_u64(), xb = b.next_u64();
    equal += xa == xb;
    const double ua = static_cast<double>(xa >> 11) * 0x1.0p-53;
    const double ub = static_cast<double>(xb >> 11) * 0x1.0p-53;
    sa += ua;
    sb += ub;
    sab += ua * ub;
    saa += ua * ua;
    sbb += ub * ub;
  }
  EXPECT_EQ(equal, 0);
  const double ma = sa / n, mb = sb / n;
  const double corr = (sab / n - ma * mb) /
                      std::sqrt((saa / n - ma * ma) * (sbb / n - mb * mb));
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Rng, UnitOpenClosedNeverZero) {
  RngStream r(3, 3);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.next_unit_open_closed();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
}

TEST(Rng, NextBelowStaysInRange) {
  RngStream r(5, 1);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto x = r.next_below(7);
    ASSERT_LT(x, 7u);
    ++counts[x];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 4 * std::sqrt(10000 * 6.0 / 7.0));
}

TEST(Exponential, InverseCdfIdentities) {
  EXPECT_EQ(exponential_from_uniform(1.0, 1.0), 0.0);
  EXPECT_FALSE(std::signbit(exponential_from_uniform(1.0, 1.0)));
  EXPECT_NEAR(exponential_from_uniform(std::exp(-2.0), 2.0), 1.0, 1e-15);
}

TEST(Exponential, RejectsBadRates) {
  RngStream r(1, 1);
  EXPECT_THROW(sample_exponential(0.0, r), InvalidArgument);
  EXPECT_THROW(sample_exponential(-1.0, r), InvalidArgument);
  EXPECT_THROW(sample_exponential(std::nan(""), r), InvalidArgument);
  EXPECT_THROW(sample_exponential(INFINITY, r), InvalidArgument);
}

TEST(Exponential, SampleMeanNearOne) {
  RngStream r(11, 0);
  double total = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double x = sample_exponential(1.0, r);
    ASSERT_TRUE(std::isfinite(x));
    ASSERT_GE(x, 0.0);
    total += x;
  }
  EXPECT_NEAR(total / n, 1.0, 0.01);
}

TEST(Exponential, KolmogorovSmirnovAtRateTwo) {
  RngStream r(12, 0);
  std::vector<double> sample;
  for (int i = 0; i < 10000; ++i) sample.push_back(sample_exponential(2.0, r));
  EXPECT_LT(ks_statistic_exponential(sample, 2.0), ks_critical_value(sample.size(), 1e-3));
}

}  // namespace
}  // namespace rmatch
