#pragma once

// Two-stage partial-coloring pipeline for (near-)regular hypergraphs.
//
// Each round takes the still-uncolored vertices S, classifies every edge as
// small or large by how much of it lies in S, and runs the partial-coloring
// walk on S with coefficient 0 on large edges (their sums do not move) and
// coeff_small_factor * sqrt(ln(2 / alpha)) on small ones. At least half of S
// freezes per round. Stage 1 runs while alpha = |S| / n >= t^-0.4; stage 2
// adds alpha * t of headroom to the small-edge threshold. Frozen vertices are
// finally rounded to their sign.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "disclab/discrepancy.hpp"
#include "disclab/error.hpp"
#include "disclab/hypergraph.hpp"
#include "disclab/partial_coloring.hpp"
#include "disclab/rng.hpp"
#include "disclab/spectral.hpp"

namespace disclab {

struct StageParams {
  int t = 1;
  /// sigma / sqrt(t); <= 0 means measure it with restricted_norm.
  double c_norm = 0.0;
  /// Stage switch; <= 0 means t^-0.4.
  double alpha_threshold = 0.0;
  double coeff_small_factor = 10.0;
  /// Freeze tolerance; <= 0 means 1/n.
  double delta = 0.0;
  /// <= 0 means ceil(4 log2 n).
  int round_cap = 0;
  WalkOptions walk;

  /// Fills in every defaulted field for a hypergraph on n vertices.
  StageParams resolved(int n) const {
    if (t < 1) throw ParameterError("StageParams: t must be >= 1");
    StageParams p = *this;
    if (p.alpha_threshold <= 0.0) p.alpha_threshold = std::pow(static_cast<double>(t), -0.4);
    if (p.delta <= 0.0) p.delta = 1.0 / std::max(n, 2);
    if (p.round_cap <= 0)
      p.round_cap = std::max(1, static_cast<int>(std::ceil(4.0 * std::log2(std::max(n, 2)))));
    if (!(p.alpha_threshold > 0.0 && p.alpha_threshold <= 1.0))
      throw ParameterError("StageParams: alpha_threshold must lie in (0, 1]");
    if (!(p.delta > 0.0 && p.delta < 1.0)) throw ParameterError("StageParams: delta must lie in (0, 1)");
    return p;
  }

  double coeff_small(double alpha) const {
    return coeff_small_factor * std::sqrt(std::log(2.0 / alpha));
  }
};

struct EdgeClasses {
  std::vector<std::size_t> small;
  std::vector<std::size_t> large;
};

/// Sizes |S cap e| for every edge; `in_s` is a membership mask over vertices.
inline std::vector<int> intersection_sizes(const Hypergraph& h, const std::vector<char>& in_s) {
  std::vector<int> out(h.edges.size(), 0);
  for (std::size_t i = 0; i < h.edges.size(); ++i)
    for (Vertex v : h.edges[i]) out[i] += in_s[static_cast<std::size_t>(v)];
  return out;
}

/// Small iff |S cap e| <= alpha |e| + 2 C sqrt(t)   (stage 1)
///       or |S cap e| <= alpha |e| + 2 C sqrt(t) + alpha t   (stage 2).
inline EdgeClasses classify_edges(const Hypergraph& h, const std::vector<char>& in_s,
                                  double alpha, int stage, const StageParams& params) {
  if (stage != 1 && stage != 2) throw ParameterError("classify_edges: stage must be 1 or 2");
  const auto hits = intersection_sizes(h, in_s);
  const double slack = 2.0 * params.c_norm * std::sqrt(static_cast<double>(params.t)) +
                       (stage == 2 ? alpha * params.t : 0.0);
  EdgeClasses out;
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    const double threshold = alpha * static_cast<double>(h.edges[i].size()) + slack;
    (hits[i] <= threshold ? out.small : out.large).push_back(i);
  }
  return out;
}

struct StageStep {
  PartialVector local;            // over S, in increasing vertex order
  std::vector<Vertex> vertices;   // local index -> vertex id
  std::vector<double> coeff;      // per edge, 0 for large
  std::size_t n_large = 0;
  double coeff_small = 0.0;
  bool feasibility_adjusted = false;
  int attempts = 0;
  double eps_num = 0.0;
};

/// One partial-coloring round on S. `x` is the current global fractional
/// coloring; the walk starts from its restriction to S.
inline StageStep stage_step(const Hypergraph& h, std::span<const Vertex> subset,
                            const std::vector<double>& x, int stage, const StageParams& params,
                            const RandomSource& rng) {
  if (subset.empty()) throw ParameterError("stage_step: S must be nonempty");
  std::vector<char> in_s(static_cast<std::size_t>(h.n), 0);
  std::vector<int> local(static_cast<std::size_t>(h.n), -1);
  StageStep out;
  for (Vertex v : subset) {
    in_s[static_cast<std::size_t>(v)] = 1;
  }
  for (Vertex v = 0; v < h.n; ++v)
    if (in_s[static_cast<std::size_t>(v)]) {
      local[static_cast<std::size_t>(v)] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(v);
    }
  const int s_size = static_cast<int>(out.vertices.size());
  const double alpha = static_cast<double>(s_size) / h.n;
  const auto classes = classify_edges(h, in_s, alpha, stage, params);

  ConstraintSet cs;
  cs.n = s_size;
  cs.sets.resize(h.edges.size());
  for (std::size_t i = 0; i < h.edges.size(); ++i)
    for (Vertex v : h.edges[i])
      if (in_s[static_cast<std::size_t>(v)]) cs.sets[i].push_back(local[static_cast<std::size_t>(v)]);

  std::size_t live_small = 0, live_large = 0;
  for (auto i : classes.small) live_small += !cs.sets[i].empty();
  for (auto i : classes.large) live_large += !cs.sets[i].empty();

  double c_small = params.coeff_small(alpha);
  double c_large = 0.0;
  const double budget = s_size / 16.0;
  const auto mass = [&] {
    return static_cast<double>(live_small) * std::exp(-c_small * c_small / 16.0) +
           static_cast<double>(live_large) * std::exp(-c_large * c_large / 16.0);
  };
  if (mass() > budget) {
    // Raise coefficients until the walk's feasibility condition holds.
    out.feasibility_adjusted = true;
    constexpr double kMargin = 1.0 + 1e-9;
    if (static_cast<double>(live_large) < budget) {
      c_small = std::max(c_small, 4.0 * std::sqrt(std::log(live_small / (budget - live_large))) * kMargin);
    } else {
      const double c = 4.0 * std::sqrt(std::log(16.0 * (live_small + live_large) / s_size)) * kMargin;
      c_small = std::max(c_small, c);
      c_large = c;
    }
  }
  out.coeff_small = c_small;
  out.n_large = classes.large.size();
  out.coeff.assign(h.edges.size(), c_small);
  for (auto i : classes.large) out.coeff[i] = c_large;
  cs.coeffs = out.coeff;

  std::vector<double> x0(static_cast<std::size_t>(s_size));
  for (int k = 0; k < s_size; ++k) x0[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(out.vertices[static_cast<std::size_t>(k)])];
  auto walk = lovett_meka(cs, x0, params.delta, rng, params.walk);
  out.local = std::move(walk.vector);
  out.attempts = walk.attempts;
  out.eps_num = walk.eps_num;
  return out;
}

/// chi_v = sign(x_v), with 0 mapped to +1.
inline Coloring round_partial(const PartialVector& pv) {
  Coloring chi;
  chi.signs.reserve(pv.x.size());
  for (double v : pv.x) chi.signs.push_back(v >= 0.0 ? 1 : -1);
  return chi;
}

struct RoundRecord {
  int round = 0;
  int stage = 1;
  std::size_t s_size = 0;
  double alpha = 1.0;
  std::size_t n_large = 0;
  double coeff_small = 0.0;
  bool feasibility_adjusted = false;
  int attempts = 0;
  double max_round_disc = 0.0;       // max_e |<x_new - x_old, 1_{S cap e}>|
  double max_small_size = 0.0;       // max |S cap e| over small edges
  double cumulative_bound = 0.0;     // max_e of the per-edge telescoped bound so far
};

struct ColoringTrace {
  std::vector<RoundRecord> rounds;
  double c_norm = 0.0;
  bool edge_size_warning = false;
  std::size_t leftover = 0;          // unfrozen vertices when the round cap hit
  std::vector<double> edge_bound;    // per edge: sum of round bounds + rounding allowance
  std::vector<double> rounding_shift;  // per edge: |chi(e) - <x, 1_e>|
  DiscReport report;

  void write_csv(std::ostream& os) const {
    os << "round,stage,S_size,alpha,n_large,max_round_disc,cumulative_bound\n";
    for (const auto& r : rounds)
      os << r.round << ',' << r.stage << ',' << r.s_size << ',' << r.alpha << ','
         << r.n_large << ',' << r.max_round_disc << ',' << r.cumulative_bound << '\n';
  }
};

struct TwoStageResult {
  Coloring coloring;
  ColoringTrace trace;
};

inline TwoStageResult color_two_stage(const Hypergraph& h, const StageParams& raw,
                                      const RandomSource& rng) {
  h.validate();
  const StageParams params = raw.resolved(h.n);
  const std::size_t n = static_cast<std::size_t>(h.n);
  const auto src = for_purpose(rng, StreamPurpose::kTwoStage);

  TwoStageResult out;
  auto& trace = out.trace;
  trace.edge_size_warning = !check_edge_sizes(h, params.t).ok;
  StageParams p = params;
  if (p.c_norm <= 0.0)
    p.c_norm = h.n >= 2 ? restricted_norm(h, p.t, 1e-6, 0, src.derive(0)).c_norm : 0.0;
  trace.c_norm = p.c_norm;

  std::vector<double> x(n, 0.0);
  std::vector<Vertex> s_set(n);
  for (std::size_t v = 0; v < n; ++v) s_set[v] = static_cast<Vertex>(v);
  trace.edge_bound.assign(h.edges.size(), 0.0);

  for (int r = 0; r < p.round_cap && !s_set.empty(); ++r) {
    RoundRecord rec;
    rec.round = r;
    rec.s_size = s_set.size();
    rec.alpha = static_cast<double>(s_set.size()) / h.n;
    rec.stage = rec.alpha >= p.alpha_threshold ? 1 : 2;

    const auto step = stage_step(h, s_set, x, rec.stage, p, src.derive(static_cast<std::uint64_t>(r) + 1));
    rec.n_large = step.n_large;
    rec.coeff_small = step.coeff_small;
    rec.feasibility_adjusted = step.feasibility_adjusted;
    rec.attempts = step.attempts;

    std::vector<double> change(n, 0.0);
    std::vector<char> in_s(n, 0);
    for (std::size_t k = 0; k < step.vertices.size(); ++k) {
      const auto v = static_cast<std::size_t>(step.vertices[k]);
      change[v] = step.local.x[k] - x[v];
      in_s[v] = 1;
      x[v] = step.local.x[k];
    }
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
      double moved = 0.0;
      int hit = 0;
      for (Vertex v : h.edges[i]) {
        moved += change[static_cast<std::size_t>(v)];
        hit += in_s[static_cast<std::size_t>(v)];
      }
      rec.max_round_disc = std::max(rec.max_round_disc, std::abs(moved));
      if (hit > 0) {
        trace.edge_bound[i] += step.coeff[i] * std::sqrt(static_cast<double>(hit)) + step.eps_num;
        if (step.coeff[i] == step.coeff_small)
          rec.max_small_size = std::max(rec.max_small_size, static_cast<double>(hit));
      }
    }
    rec.cumulative_bound = trace.edge_bound.empty()
                               ? 0.0
                               : *std::max_element(trace.edge_bound.begin(), trace.edge_bound.end());

    std::vector<Vertex> next;
    for (std::size_t k = 0; k < step.vertices.size(); ++k)
      if (!step.local.frozen[k]) next.push_back(step.vertices[k]);
    s_set = std::move(next);
    trace.rounds.push_back(rec);
  }
  trace.leftover = s_set.size();

  std::vector<char> unfrozen(n, 0);
  for (Vertex v : s_set) unfrozen[static_cast<std::size_t>(v)] = 1;
  PartialVector final_vec{x, std::vector<bool>(n, true), p.delta};
  for (Vertex v : s_set) final_vec.frozen[static_cast<std::size_t>(v)] = false;
  out.coloring = round_partial(final_vec);

  trace.rounding_shift.assign(h.edges.size(), 0.0);
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    double frac = 0.0;
    int loose = 0;
    for (Vertex v : h.edges[i]) {
      frac += x[static_cast<std::size_t>(v)];
      loose += unfrozen[static_cast<std::size_t>(v)];
    }
    trace.rounding_shift[i] = std::abs(edge_sum(h.edges[i], out.coloring) - frac);
    trace.edge_bound[i] += static_cast<double>(h.edges[i].size()) * p.delta + loose;
  }
  trace.report = disc_of(h, out.coloring);
  return out;
}

}  // namespace disclab
