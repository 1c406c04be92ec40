#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "disclab/discrepancy.hpp"
#include "disclab/h2_moments.hpp"
#include "oracles.hpp"

using namespace disclab;

TEST(DiscOf, SingleEdge) {
  const Hypergraph h{2, {{0, 1}}, ""};
  EXPECT_EQ(disc_of(h, Coloring{{1, 1}}).disc, 2);
  EXPECT_EQ(disc_of(h, Coloring{{1, -1}}).disc, 0);
}

TEST(DiscOf, NoEdges) {
  const auto r = disc_of(Hypergraph{3, {}, ""}, Coloring{{1, -1, 1}});
  EXPECT_EQ(r.disc, 0);
  EXPECT_FALSE(r.argmax_edge.has_value());
}

TEST(DiscOf, ArgmaxIsLowestIndexOnTies) {
  const Hypergraph h{3, {{0}, {0, 1}, {1, 2}, {0, 2}}, ""};
  const auto r = disc_of(h, Coloring{{1, 1, 1}});
  EXPECT_EQ(r.disc, 2);
  EXPECT_EQ(r.argmax_edge, std::optional<std::size_t>(1));
  EXPECT_EQ(r.per_edge, std::vector<int>({1, 2, 2, 2}));
}

TEST(DiscOf, RejectsWrongLength) {
  const Hypergraph h{2, {{0, 1}}, ""};
  EXPECT_THROW(disc_of(h, Coloring{{1}}), ParameterError);
  EXPECT_THROW(disc_of(h, Coloring{{1, 1, 1}}), ParameterError);
}

TEST(DiscOf, InvariantUnderGlobalSignFlip) {
  const auto h = generate_h2(20, 15, 0.4, RandomSource{3});
  Coloring chi;
  auto s = RandomSource{4}.stream(0);
  for (int v = 0; v < 20; ++v) chi.signs.push_back(s.coin() ? 1 : -1);
  EXPECT_EQ(disc_of(h, chi).disc, disc_of(h, chi.negated()).disc);
}

TEST(BruteForce, OddEdge) { EXPECT_EQ(brute_force_disc(Hypergraph{3, {{0, 1, 2}}, ""}).optimum, 1); }

TEST(BruteForce, Triangle) {
  const Hypergraph h{3, {{0, 1}, {1, 2}, {0, 2}}, ""};
  const auto r = brute_force_disc(h);
  EXPECT_EQ(r.optimum, 2);
  EXPECT_EQ(disc_of(h, r.witness).disc, 2);
}

TEST(BruteForce, NoEdges) { EXPECT_EQ(brute_force_disc(Hypergraph{5, {}, ""}).optimum, 0); }

TEST(BruteForce, MatchesExhaustiveOracle) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 3 + static_cast<int>(seed % 10);
    const auto h = generate_h2(n, 2 + static_cast<int>(seed % 7), 0.45, RandomSource{seed});
    const auto r = brute_force_disc(h);
    EXPECT_EQ(r.optimum, oracle::disc_exhaustive(h)) << "seed " << seed;
    EXPECT_EQ(disc_of(h, r.witness).disc, r.optimum);
    EXPECT_EQ(r.witness.signs[0], 1);
  }
}

TEST(BruteForce, WitnessIndependentOfThreadCount) {
  const auto h = generate_h1(20, 12, 3, RandomSource{17});
  const auto a = brute_force_disc(h, kDefaultBruteForceCap, 1);
  const auto b = brute_force_disc(h, kDefaultBruteForceCap, 8);
  EXPECT_EQ(a.optimum, b.optimum);
  EXPECT_EQ(a.witness, b.witness);
}

TEST(BruteForce, RefusesAboveCap) {
  EXPECT_THROW(brute_force_disc(Hypergraph{30, {}, ""}), RefusalError);
  EXPECT_THROW(brute_force_disc(Hypergraph{12, {}, ""}, 10), RefusalError);
}

TEST(BalancedSearch, Examples) {
  const auto yes = brute_force_balanced_disc(Hypergraph{2, {{0, 1}}, ""}, 0);
  ASSERT_TRUE(yes.found);
  EXPECT_EQ(disc_of(Hypergraph{2, {{0, 1}}, ""}, *yes.witness).disc, 0);
  EXPECT_FALSE(brute_force_balanced_disc(Hypergraph{2, {{0}}, ""}, 0).found);
  EXPECT_THROW(brute_force_balanced_disc(Hypergraph{3, {}, ""}, 0), ParameterError);
}

TEST(BalancedSearch, AgreesWithGoodColoringCount) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto h = generate_h2_even(8, 3 + static_cast<int>(seed % 4), RandomSource{seed});
    EXPECT_EQ(brute_force_balanced_disc(h, 0).found, count_good_balanced(h) > 0) << "seed " << seed;
  }
}

TEST(RandomBaseline, NoEdges) {
  const auto s = random_coloring_baseline(Hypergraph{4, {}, ""}, 9, RandomSource{1});
  EXPECT_EQ(s.min, 0);
  EXPECT_EQ(s.max, 0);
  EXPECT_EQ(s.median, 0.0);
}

TEST(RandomBaseline, SingleLargeEdgeMedian) {
  // |2 Bin(100, 1/2) - 100| has median 6 (exact CDF).
  Edge e;
  for (int v = 0; v < 100; ++v) e.push_back(v);
  const auto s = random_coloring_baseline(Hypergraph{100, {e}, ""}, 10000, RandomSource{2});
  EXPECT_GE(s.median, 5.0);
  EXPECT_LE(s.median, 9.0);
}

TEST(RandomBaseline, Reproducible) {
  const auto h = generate_h1(64, 64, 8, RandomSource{5});
  const auto a = random_coloring_baseline(h, 31, RandomSource{6});
  const auto b = random_coloring_baseline(h, 31, RandomSource{6});
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_THROW(random_coloring_baseline(h, 0, RandomSource{6}), ParameterError);
}

TEST(BeckFiala, MatchingHasDiscAtMostOne) {
  Hypergraph h{10, {}, ""};
  for (int v = 0; v < 10; ++v) h.edges.push_back({v});
  EXPECT_LE(disc_of(h, beck_fiala_color(h)).disc, 1);
}

TEST(BeckFiala, OutputIsPlusMinusOne) {
  const auto h = generate_h2(40, 30, 0.2, RandomSource{9});
  for (int s : beck_fiala_color(h).signs) EXPECT_TRUE(s == 1 || s == -1);
}

TEST(BeckFiala, SmallRegularInstancesAgainstOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto h = generate_h1(12, 12, 3, RandomSource{seed});
    const int d = disc_of(h, beck_fiala_color(h)).disc;
    EXPECT_LE(d, 5);
    EXPECT_GE(d, brute_force_disc(h).optimum);
  }
}

TEST(BeckFiala, RespectsDegreeBoundOnLargerInstances) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto h = generate_h1(120, 100, 6, RandomSource{seed});
    EXPECT_LE(disc_of(h, beck_fiala_color(h)).disc, 2 * 6 - 1);
    const auto g = generate_h2(80, 60, 0.1, RandomSource{seed});
    EXPECT_LE(disc_of(g, beck_fiala_color(g)).disc, 2 * g.max_degree() - 1);
  }
}
