#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "disclab/discrepancy.hpp"
#include "disclab/spectral.hpp"
#include "disclab/two_stage.hpp"

using namespace disclab;

namespace {

void check_trace(const Hypergraph& h, const TwoStageResult& res, const StageParams& raw) {
  const auto p = raw.resolved(h.n);
  const auto& tr = res.trace;
  ASSERT_EQ(res.coloring.size(), static_cast<std::size_t>(h.n));
  for (int s : res.coloring.signs) EXPECT_TRUE(s == 1 || s == -1);
  EXPECT_LE(tr.rounds.size(), static_cast<std::size_t>(p.round_cap));
  EXPECT_EQ(tr.report.disc, disc_of(h, res.coloring).disc);
  for (std::size_t r = 1; r < tr.rounds.size(); ++r) {
    EXPECT_LE(2 * tr.rounds[r].s_size, tr.rounds[r - 1].s_size);
    EXPECT_GE(tr.rounds[r].cumulative_bound, tr.rounds[r - 1].cumulative_bound);
    EXPECT_GE(tr.rounds[r].stage, tr.rounds[r - 1].stage);
  }
  for (std::size_t i = 0; i < h.edges.size(); ++i)
    EXPECT_LE(std::abs(edge_sum(h.edges[i], res.coloring)), tr.edge_bound[i] + 1e-9) << "edge " << i;
}

}  // namespace

TEST(Classify, EmptyIntersectionsAreSmall) {
  const Hypergraph h{4, {{0, 1}, {2, 3}}, ""};
  StageParams p;
  p.t = 1;
  const auto c = classify_edges(h, std::vector<char>(4, 0), 0.25, 1, p);
  EXPECT_EQ(c.small.size(), 2u);
  EXPECT_TRUE(c.large.empty());
}

TEST(Classify, BoundaryIsInclusive) {
  // alpha = 1/2, |e| = 4, |S cap e| = 2 = alpha |e| with zero slack.
  const Hypergraph h{4, {{0, 1, 2, 3}, {0, 1}}, ""};
  StageParams p;
  p.t = 1;
  p.c_norm = 0.0;
  const std::vector<char> in_s{1, 1, 0, 0};
  const auto c = classify_edges(h, in_s, 0.5, 1, p);
  EXPECT_EQ(c.small, std::vector<std::size_t>({0}));
  EXPECT_EQ(c.large, std::vector<std::size_t>({1}));
  // Stage 2 adds alpha t of slack: 2 <= 1 + 0.5 * 2.
  p.t = 2;
  EXPECT_EQ(classify_edges(h, in_s, 0.5, 2, p).large.size(), 0u);
  EXPECT_THROW(classify_edges(h, in_s, 0.5, 3, p), ParameterError);
}

TEST(Classify, FullSetOnRegularInstanceHasFewLargeEdges) {
  const auto h = generate_h1(4096, 4096, 64, RandomSource{1});
  StageParams p;
  p.t = 64;
  p.c_norm = restricted_norm(h, 64, 1e-6, 0, RandomSource{1}).c_norm;
  const auto c = classify_edges(h, std::vector<char>(4096, 1), 1.0, 1, p);
  EXPECT_LE(c.large.size(), 4096u / 4);
  std::vector<Vertex> half;
  for (int v = 0; v < 4096; v += 2) half.push_back(v);
  EXPECT_TRUE(pseudorandom_check(h, half, 2.0 * p.c_norm / (0.5 * std::sqrt(64.0)), p.c_norm * 8.0, 64).ok);
}

TEST(StageStep, AllLargeEdgesStayBalanced) {
  // c_norm = 0 and a subset that overloads both edges: each is large, c = 0.
  const int n = 64;
  const Hypergraph h{n, {{0, 1, 2, 3, 4, 5, 6, 7}, {8, 9, 10, 11}}, ""};
  StageParams p;
  p.t = 1;
  p.c_norm = 0.0;
  p = p.resolved(n);
  std::vector<Vertex> s(static_cast<std::size_t>(n));
  std::iota(s.begin(), s.end(), 0);
  // alpha = 1 makes nothing large, so use a subset of half the vertices.
  std::vector<Vertex> sub(s.begin(), s.begin() + 32);
  const std::vector<double> x(n, 0.0);
  const auto step = stage_step(h, sub, x, 1, p, RandomSource{3});
  EXPECT_EQ(step.n_large, 2u);
  EXPECT_FALSE(step.feasibility_adjusted);
  for (const auto& e : h.edges) {
    double sum = 0.0;
    for (Vertex v : e) sum += step.local.x[static_cast<std::size_t>(v)];
    EXPECT_LE(std::abs(sum), step.eps_num);
  }
}

TEST(StageStep, FullSetBoundAtAlphaOne) {
  const auto h = generate_h1(4096, 4096, 64, RandomSource{2});
  StageParams p;
  p.t = 64;
  p.c_norm = restricted_norm(h, 64, 1e-6, 0, RandomSource{2}).c_norm;
  p = p.resolved(h.n);
  std::vector<Vertex> all(4096);
  std::iota(all.begin(), all.end(), 0);
  const auto step = stage_step(h, all, std::vector<double>(4096, 0.0), 1, p, RandomSource{2});
  const double ln2a = std::log(2.0);
  EXPECT_GE(step.coeff_small, 10.0 * std::sqrt(ln2a) - 1e-12);
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    if (step.coeff[i] != step.coeff_small) continue;
    double sum = 0.0;
    for (Vertex v : h.edges[i]) sum += step.local.x[static_cast<std::size_t>(v)];
    const double k = static_cast<double>(h.edges[i].size());
    EXPECT_LE(std::abs(sum), step.coeff_small * std::sqrt(k) + step.eps_num);
    if (!step.feasibility_adjusted) {
      EXPECT_LE(std::abs(sum), 10.0 * std::sqrt(k * ln2a) + step.eps_num);
    }
  }
}

TEST(StageStep, InfeasibleCoefficientsAreRaised) {
  // Many small edges on few vertices: 10 sqrt(ln 2) is not enough.
  const auto h = generate_h1(32, 400, 40, RandomSource{4});
  StageParams p;
  p.t = 40;
  p.c_norm = 100.0;  // everything small
  p = p.resolved(h.n);
  std::vector<Vertex> all(32);
  std::iota(all.begin(), all.end(), 0);
  const auto step = stage_step(h, all, std::vector<double>(32, 0.0), 1, p, RandomSource{4});
  EXPECT_TRUE(step.feasibility_adjusted);
  ConstraintSet cs{32, h.edges, step.coeff};
  EXPECT_TRUE(check_feasible(cs));
}

TEST(RoundPartial, Examples) {
  EXPECT_EQ(round_partial(PartialVector{{0.9995, -0.9995}, {true, true}, 1e-3}), Coloring({{1, -1}}));
  EXPECT_EQ(round_partial(PartialVector{{0.0, 0.0, 0.0}, {false, false, false}, 1e-3}), Coloring({{1, 1, 1}}));
}

TEST(TwoStage, NoEdges) {
  StageParams p;
  p.t = 1;
  const auto res = color_two_stage(Hypergraph{10, {}, ""}, p, RandomSource{1});
  EXPECT_EQ(res.coloring.size(), 10u);
  EXPECT_EQ(res.trace.report.disc, 0);
}

TEST(TwoStage, SingletonEdges) {
  Hypergraph h{50, {}, ""};
  for (int v = 0; v < 50; ++v) h.edges.push_back({v});
  StageParams p;
  p.t = 1;
  const auto res = color_two_stage(h, p, RandomSource{2});
  EXPECT_LE(res.trace.report.disc, 1);
  check_trace(h, res, p);
}

TEST(TwoStage, TraceInvariantsOnMediumInstances) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto h = generate_h1(512, 512, 16, RandomSource{seed});
    StageParams p;
    p.t = 16;
    const auto res = color_two_stage(h, p, RandomSource{seed});
    check_trace(h, res, p);
    EXPECT_EQ(res.trace.leftover, 0u);
    EXPECT_LE(res.trace.report.disc, 2 * 16 - 3);
    const auto& first = res.trace.rounds.front();
    EXPECT_EQ(first.stage, 1);
    EXPECT_EQ(first.s_size, 512u);
  }
}

TEST(TwoStage, RoundingShiftIsAudited) {
  const auto h = generate_h1(256, 256, 8, RandomSource{6});
  StageParams p;
  p.t = 8;
  const auto res = color_two_stage(h, p, RandomSource{6});
  const auto rp = p.resolved(h.n);
  for (std::size_t i = 0; i < h.edges.size(); ++i)
    EXPECT_LE(res.trace.rounding_shift[i], static_cast<double>(h.edges[i].size()) * rp.delta + 1e-9);
}

TEST(TwoStage, Deterministic) {
  const auto h = generate_h1(300, 300, 10, RandomSource{7});
  StageParams p;
  p.t = 10;
  const auto a = color_two_stage(h, p, RandomSource{8});
  const auto b = color_two_stage(h, p, RandomSource{8});
  EXPECT_EQ(a.coloring, b.coloring);
  std::ostringstream sa, sb;
  a.trace.write_csv(sa);
  b.trace.write_csv(sb);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().substr(0, sa.str().find('\n')), "round,stage,S_size,alpha,n_large,max_round_disc,cumulative_bound");
}

TEST(TwoStage, RoundCapLeavesRoundedLeftovers) {
  const auto h = generate_h1(256, 256, 8, RandomSource{9});
  StageParams p;
  p.t = 8;
  p.round_cap = 1;
  const auto res = color_two_stage(h, p, RandomSource{9});
  EXPECT_EQ(res.trace.rounds.size(), 1u);
  EXPECT_GT(res.trace.leftover, 0u);
  check_trace(h, res, p);
}

TEST(StageParams, Validation) {
  StageParams p;
  p.t = 0;
  EXPECT_THROW(p.resolved(10), ParameterError);
  p.t = 4;
  p.delta = 1.5;
  EXPECT_THROW(p.resolved(10), ParameterError);
  p.delta = 0.0;
  const auto r = p.resolved(100);
  EXPECT_DOUBLE_EQ(r.delta, 0.01);
  EXPECT_DOUBLE_EQ(r.alpha_threshold, std::pow(4.0, -0.4));
}
