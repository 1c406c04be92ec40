#include <cmath>

#include <gtest/gtest.h>

#include "disclab/discrepancy.hpp"
#include "disclab/h2_moments.hpp"
#include "oracles.hpp"

using namespace disclab;

namespace {

// Good balanced colorings per even row, by enumeration.
std::vector<int> good_counts(int n) {
  const auto balanced = oracle::balanced_masks(n);
  std::vector<int> out;
  for (auto row : oracle::even_rows(n)) {
    int c = 0;
    for (auto plus : balanced) c += oracle::good(row, plus);
    out.push_back(c);
  }
  return out;
}

Hypergraph from_mask(int n, std::uint32_t row) {
  Edge e;
  for (int v = 0; v < n; ++v)
    if (row >> v & 1u) e.push_back(v);
  return Hypergraph{n, {e}, ""};
}

}  // namespace

TEST(ProbGood, Examples) {
  EXPECT_EQ(prob_good(2), ExactRational(1));
  EXPECT_EQ(prob_good(4), ExactRational(3, 4));
  EXPECT_EQ(prob_good(8), ExactRational(70, 128));
  EXPECT_THROW(prob_good(7), ParameterError);
}

TEST(ProbGood, MatchesRowEnumeration) {
  for (int n : {4, 6, 8, 10, 12}) {
    const std::uint32_t plus = (1u << (n / 2)) - 1u;
    int good = 0;
    const auto rows = oracle::even_rows(n);
    for (auto r : rows) good += oracle::good(r, plus);
    EXPECT_EQ(prob_good(n), ExactRational(good, static_cast<long>(rows.size()))) << n;
  }
}

TEST(ProbBothGood, Examples) {
  EXPECT_EQ(prob_both_good(8, 0), prob_good(8));
  EXPECT_EQ(prob_both_good(8, 8), prob_good(8));
  EXPECT_EQ(prob_both_good(8, 4), ExactRational(36, 128));
  EXPECT_THROW(prob_both_good(8, 3), ParameterError);
  EXPECT_THROW(prob_both_good(8, 10), ParameterError);
}

TEST(ProbBothGood, MatchesRowEnumeration) {
  const int n = 10;
  const auto rows = oracle::even_rows(n);
  const std::uint32_t a = 0b0000011111;
  for (int j = 0; j <= n / 2; ++j) {
    // Swap j plus vertices with j minus vertices: distance 2j.
    const std::uint32_t b = (a & ~((1u << j) - 1u)) | (((1u << j) - 1u) << 5);
    ASSERT_EQ(std::popcount(a ^ b), 2 * j);
    int both = 0;
    for (auto r : rows) both += oracle::good(r, a) && oracle::good(r, b);
    EXPECT_EQ(prob_both_good(n, 2 * j), ExactRational(both, static_cast<long>(rows.size()))) << j;
  }
}

TEST(ProbBothGood, SymmetricInDistance) {
  for (int d = 0; d <= 20; d += 2) EXPECT_EQ(prob_both_good(20, d), prob_both_good(20, 20 - d));
}

TEST(ExpectedCount, Examples) {
  EXPECT_EQ(expected_count(8, 0), ExactRational(70));
  EXPECT_EQ(expected_count(8, 1), ExactRational(1225, 32));
  EXPECT_NEAR(to_double(expected_count(8, 2)), 20.935058593750, 1e-12);
}

TEST(ExpectedCount, MonteCarloAgreement) {
  constexpr int kTrials = 4000;
  double sum = 0.0, sq = 0.0;
  for (int s = 0; s < kTrials; ++s) {
    const double x = count_good_balanced(generate_h2_even(8, 2, RandomSource{static_cast<std::uint64_t>(s)})).convert_to<double>();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / kTrials, sd = std::sqrt((sq / kTrials - mean * mean) / kTrials);
  EXPECT_NEAR(mean, to_double(expected_count(8, 2)), 3 * sd);
}

TEST(SecondMoment, ZeroRowsIsConstant) {
  const auto r = second_moment(10, 0);
  EXPECT_EQ(r.e_x, ExactRational(252));
  EXPECT_EQ(r.e_x2, ExactRational(252 * 252));
  EXPECT_EQ(r.ratio, ExactRational(1));
}

TEST(SecondMoment, OneRowMatchesEnumeration) {
  for (int n : {4, 6, 8}) {
    const auto counts = good_counts(n);
    BigInt sum = 0, sq = 0;
    for (int c : counts) {
      sum += c;
      sq += c * c;
    }
    const auto r = second_moment(n, 1);
    EXPECT_EQ(r.e_x, ExactRational(sum, counts.size()));
    EXPECT_EQ(r.e_x2, ExactRational(sq, counts.size()));
  }
}

TEST(SecondMoment, CauchySchwarzAndFloatMirrors) {
  for (int n : {6, 12, 24, 40})
    for (int m : {1, 2, 5}) {
      const auto r = second_moment(n, m);
      EXPECT_GE(r.ratio, ExactRational(1));
      EXPECT_NEAR(r.ratio_float, to_double(r.e_x2) / (to_double(r.e_x) * to_double(r.e_x)), 1e-12);
      EXPECT_NEAR(r.e_x_float / to_double(r.e_x), 1.0, 1e-15);
    }
}

TEST(SecondMoment, PairCountsSumToSquare) {
  for (int n : {2, 10, 30}) {
    BigInt total = 0;
    for (int j = 0; j <= n / 2; ++j) total += pair_count(n, j);
    EXPECT_EQ(total, binomial(n, n / 2) * binomial(n, n / 2));
  }
}

TEST(SecondMoment, AsymptoticFormTracksExactValue) {
  const auto r = second_moment(400, 5);
  EXPECT_NEAR(r.e_x_asymptotic / r.e_x_float, 1.0, 0.01);
}

TEST(ToDouble, HandlesHugeAndTinyValues) {
  EXPECT_DOUBLE_EQ(to_double(ExactRational(1, 3)), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(to_double(ExactRational(-5, 2)), -2.5);
  const auto big = ExactRational(pow2(2000), pow2(1990) * 3);
  EXPECT_NEAR(to_double(big), 1024.0 / 3.0, 1e-12);
  EXPECT_EQ(to_double(ExactRational(0)), 0.0);
}

TEST(MDefault, Values) {
  EXPECT_EQ(m_default(64), 1);
  EXPECT_EQ(m_default(128), 3);
  EXPECT_EQ(m_default(256), 5);
  EXPECT_EQ(m_default(512), 10);
  EXPECT_EQ(m_default(4), 1);
}

TEST(CountGoodBalanced, Examples) {
  EXPECT_EQ(count_good_balanced(Hypergraph{4, {}, ""}), 6);
  // Splitting {0,1} forces {2,3} to split too: 2 x 2 choices.
  EXPECT_EQ(count_good_balanced(Hypergraph{4, {{0, 1}}, ""}), 4);
  EXPECT_THROW(count_good_balanced(Hypergraph{5, {}, ""}), ParameterError);
}

TEST(CountGoodBalanced, MatchesRowEnumeration) {
  const int n = 10;
  const auto rows = oracle::even_rows(n);
  const auto counts = good_counts(n);
  for (std::size_t i = 0; i < rows.size(); i += 7)
    EXPECT_EQ(count_good_balanced(from_mask(n, rows[i])), counts[i]);
}

TEST(CountGoodBalanced, PositiveIffBalancedZeroExists) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto h = generate_h2_even(10, 2 + static_cast<int>(seed % 5), RandomSource{seed});
    const auto c = count_good_balanced_with_witness(h);
    EXPECT_EQ(c.count > 0, brute_force_balanced_disc(h, 0).found);
    if (c.witness) {
      EXPECT_EQ(disc_of(h, *c.witness).disc, 0);
    }
  }
}

TEST(CountGoodBalanced, ThreadCountDoesNotMatter) {
  const auto h = generate_h2_even(16, 3, RandomSource{5});
  const auto a = count_good_balanced_with_witness(h, kDefaultBruteForceCap, 1);
  const auto b = count_good_balanced_with_witness(h, kDefaultBruteForceCap, 8);
  EXPECT_EQ(a.count, b.count);
  EXPECT_EQ(a.witness, b.witness);
}

TEST(H2Experiment, NoRowsAlwaysSucceeds) {
  EXPECT_DOUBLE_EQ(h2_experiment(10, 0, 5, RandomSource{1}).fraction, 1.0);
}

TEST(H2Experiment, SingleRowAlwaysSplits) {
  const auto r = h2_experiment(24, 1, 100, RandomSource{2});
  EXPECT_DOUBLE_EQ(r.fraction, 1.0);
}

TEST(H2Experiment, ResampleModeReportsDiscAtMostOne) {
  const auto r = h2_experiment(12, 2, 20, RandomSource{3}, H2Mode::kResample);
  for (const auto& t : r.trials) {
    if (t.x > 0) {
      EXPECT_TRUE(t.disc_ok);
    }
  }
}

TEST(H2Experiment, TrialSeedsAreStable) {
  const auto a = h2_experiment(10, 2, 6, RandomSource{9});
  const auto b = h2_experiment(10, 2, 6, RandomSource{9});
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    EXPECT_EQ(a.trials[i].seed, b.trials[i].seed);
    EXPECT_EQ(a.trials[i].x, b.trials[i].x);
  }
}

TEST(H2Experiment, RefusesLargeN) {
  EXPECT_THROW(h2_experiment(40, 1, 1, RandomSource{1}), RefusalError);
  EXPECT_THROW(h2_experiment(9, 1, 1, RandomSource{1}), ParameterError);
}
