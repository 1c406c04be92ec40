#pragma once

// Constructive partial coloring by a constrained Gaussian random walk.
//
// Given sets M_1..M_m over [0, n) with coefficients c_i satisfying
//   sum_i exp(-c_i^2 / 16) <= n / 16,
// the walk starts at x0 and moves in small Gaussian steps restricted to the
// subspace orthogonal to every frozen coordinate and every tight constraint.
// It stops once at least half of the initially free coordinates have reached
// magnitude 1 - delta, with |<x - x0, 1_{M_i}>| <= c_i sqrt|M_i| throughout.
//
// Steps are clipped so that no coordinate leaves [-1, 1] and no constraint
// leaves its band: a step that would cross a boundary is shortened to end on
// it. A coordinate that lands on +-1 freezes, a constraint that lands on its
// bound becomes tight. The walk is therefore never allowed to violate either
// postcondition, and the audit at the end only has to account for rounding.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "disclab/error.hpp"
#include "disclab/hypergraph.hpp"
#include "disclab/rng.hpp"

namespace disclab {

struct ConstraintSet {
  int n = 0;
  std::vector<std::vector<Vertex>> sets;
  std::vector<double> coeffs;

  std::size_t size() const { return sets.size(); }

  void validate() const {
    if (n < 0) throw ParameterError("ConstraintSet: n must be nonnegative");
    if (sets.size() != coeffs.size())
      throw ParameterError("ConstraintSet: one coefficient per set required");
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (!(coeffs[i] >= 0.0))
        throw ParameterError("ConstraintSet: coefficient " + std::to_string(i) + " is negative");
      for (Vertex v : sets[i])
        if (v < 0 || v >= n)
          throw ParameterError("ConstraintSet: set " + std::to_string(i) + " leaves [0, n)");
    }
  }

  /// sum_i exp(-c_i^2 / 16) over the nonempty sets.
  double feasibility_mass() const {
    double total = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (!sets[i].empty()) total += std::exp(-coeffs[i] * coeffs[i] / 16.0);
    return total;
  }
};

inline bool check_feasible(const ConstraintSet& cs) {
  return cs.feasibility_mass() <= static_cast<double>(cs.n) / 16.0;
}

struct PartialVector {
  std::vector<double> x;
  std::vector<bool> frozen;
  double delta = 1.0;

  std::size_t frozen_count() const {
    return static_cast<std::size_t>(std::count(frozen.begin(), frozen.end(), true));
  }
};

struct WalkOptions {
  int retries = 10;
  /// Numerator of the step-size formula; the step is
  /// gamma = step_scale / sqrt(8 ln(2 (n + m) T0)) with T0 = ceil(16 / (3 gamma^2)).
  double step_scale = 1.0;
  /// Absolute slack on inner products; <= 0 selects 1e-6 sqrt(n).
  double eps_num = 0.0;
  /// When set, one CSV row (step, frozen_count, max_constraint_slack) per step.
  std::ostream* trajectory = nullptr;
};

struct WalkResult {
  PartialVector vector;
  int attempts = 0;
  std::size_t steps = 0;
  double gamma = 0.0;
  double eps_num = 0.0;
};

class PartialColoringError : public ConvergenceError {
 public:
  PartialColoringError(const std::string& what, PartialVector best)
      : ConvergenceError(what), best_(std::move(best)) {}
  const PartialVector& best() const noexcept { return best_; }

 private:
  PartialVector best_;
};

inline double walk_eps_num(int n, const WalkOptions& opt = {}) {
  return opt.eps_num > 0.0 ? opt.eps_num : 1e-6 * std::sqrt(static_cast<double>(std::max(n, 1)));
}

/// Step size and per-attempt step budget for a walk of dimension n with m sets.
inline std::pair<double, std::size_t> walk_schedule(int n, std::size_t m, double step_scale) {
  const double nm = 2.0 * (static_cast<double>(n) + static_cast<double>(m));
  double gamma = step_scale / std::sqrt(8.0 * std::log(std::max(nm, 2.0)));
  for (int i = 0; i < 64; ++i) {
    const double t0 = std::ceil(16.0 / (3.0 * gamma * gamma));
    gamma = step_scale / std::sqrt(8.0 * std::log(nm * t0));
  }
  return {gamma, static_cast<std::size_t>(std::ceil(16.0 / (3.0 * gamma * gamma)))};
}

namespace detail {

/// Orthonormal basis of the tight constraint indicators restricted to the
/// free coordinates. Stored densely, zero on frozen coordinates.
class TightBasis {
 public:
  TightBasis(std::size_t n, const std::vector<bool>& frozen) : n_(n), frozen_(frozen) {}

  std::size_t size() const { return q_.size(); }

  void add(const std::vector<Vertex>& set) {
    members_.push_back(&set);
    append(set);
  }

  void project(std::vector<double>& g) const {
    for (const auto& q : q_) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n_; ++i) dot += q[i] * g[i];
      if (dot != 0.0)
        for (std::size_t i = 0; i < n_; ++i) g[i] -= dot * q[i];
    }
  }

  /// Coordinate j has just frozen: drop it from every basis vector and
  /// restore orthonormality with the rank-one correction
  /// Q' = Q~ (I - r r^T)^{-1/2}, r the old row j of Q.
  void freeze(std::size_t j) {
    std::vector<double> r(q_.size());
    double rr = 0.0;
    for (std::size_t l = 0; l < q_.size(); ++l) {
      r[l] = q_[l][j];
      rr += r[l] * r[l];
      q_[l][j] = 0.0;
    }
    if (rr == 0.0) return;
    if (1.0 - rr < 1e-10) {
      rebuild();
      return;
    }
    std::vector<double> u(n_, 0.0);
    for (std::size_t l = 0; l < q_.size(); ++l)
      if (r[l] != 0.0)
        for (std::size_t i = 0; i < n_; ++i) u[i] += r[l] * q_[l][i];
    const double beta = (1.0 / std::sqrt(1.0 - rr) - 1.0) / rr;
    for (std::size_t l = 0; l < q_.size(); ++l)
      if (r[l] != 0.0)
        for (std::size_t i = 0; i < n_; ++i) q_[l][i] += beta * r[l] * u[i];
  }

  /// Modified Gram-Schmidt from scratch over the current tight sets.
  void rebuild() {
    q_.clear();
    for (const auto* set : members_) append(*set);
  }

 private:
  void append(const std::vector<Vertex>& set) {
    std::vector<double> v(n_, 0.0);
    double orig = 0.0;
    for (Vertex u : set)
      if (!frozen_[static_cast<std::size_t>(u)]) {
        v[static_cast<std::size_t>(u)] = 1.0;
        orig += 1.0;
      }
    if (orig == 0.0) return;
    for (int pass = 0; pass < 2; ++pass) project(v);
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm <= 1e-9 * std::sqrt(orig)) return;  // already in the span
    for (double& x : v) x /= nrm;
    q_.push_back(std::move(v));
  }

  std::size_t n_;
  const std::vector<bool>& frozen_;
  std::vector<const std::vector<Vertex>*> members_;
  std::vector<std::vector<double>> q_;
};

}  // namespace detail

/// Runs the walk; see the file comment. x0 coordinates already at magnitude
/// >= 1 - delta count as frozen from the start. On failure the attempt is
/// repeated with a fresh derived stream, up to opt.retries attempts in total.
inline WalkResult lovett_meka(const ConstraintSet& cs, const std::vector<double>& x0,
                              double delta, const RandomSource& rng,
                              const WalkOptions& opt = {}) {
  cs.validate();
  if (!check_feasible(cs))
    throw ParameterError("lovett_meka: constraint set is infeasible (sum exp(-c^2/16) = " +
                         std::to_string(cs.feasibility_mass()) + " > n/16)");
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterError("lovett_meka: delta must lie in (0, 1]");
  if (x0.size() != static_cast<std::size_t>(cs.n))
    throw ParameterError("lovett_meka: x0 has the wrong length");
  for (double v : x0)
    if (!(v >= -1.0 && v <= 1.0)) throw ParameterError("lovett_meka: x0 must lie in [-1, 1]^n");
  if (opt.retries < 1) throw ParameterError("lovett_meka: retries must be >= 1");

  const std::size_t n = static_cast<std::size_t>(cs.n);
  std::vector<std::size_t> live;  // nonempty sets only
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (!cs.sets[i].empty()) live.push_back(i);
  const auto [gamma, budget] = walk_schedule(cs.n, live.size(), opt.step_scale);
  const double eps = walk_eps_num(cs.n, opt);

  std::vector<bool> frozen0(n);
  std::size_t free0 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    frozen0[i] = std::abs(x0[i]) >= 1.0 - delta;
    free0 += !frozen0[i];
  }
  const std::size_t target = (free0 + 1) / 2;

  WalkResult out;
  out.gamma = gamma;
  out.eps_num = eps;
  out.vector = PartialVector{x0, frozen0, delta};
  if (free0 == 0) return out;

  std::vector<double> bound(live.size()), band(live.size());
  for (std::size_t k = 0; k < live.size(); ++k) {
    const double root = std::sqrt(static_cast<double>(cs.sets[live[k]].size()));
    bound[k] = cs.coeffs[live[k]] * root;
    band[k] = bound[k] - gamma * root;
  }

  const auto src = for_purpose(rng, StreamPurpose::kPartialColoring);
  PartialVector best = out.vector;
  std::size_t best_frozen = 0;
  if (opt.trajectory) *opt.trajectory << "step,frozen_count,max_constraint_slack\n";

  for (int attempt = 0; attempt < opt.retries; ++attempt) {
    auto s = src.stream(static_cast<std::uint64_t>(attempt));
    std::vector<double> x = x0;
    std::vector<bool> frozen = frozen0;
    std::vector<double> shift(live.size(), 0.0);
    std::vector<bool> tight(live.size(), false);
    detail::TightBasis basis(n, frozen);
    for (std::size_t k = 0; k < live.size(); ++k)
      if (band[k] <= 0.0) {
        tight[k] = true;
        basis.add(cs.sets[live[k]]);
      }

    std::size_t newly_frozen = 0, full_steps = 0, steps = 0;
    std::vector<double> g(n), d(live.size());
    bool stuck = false, rebuilt = false;
    while (newly_frozen < target && full_steps < budget) {
      for (std::size_t i = 0; i < n; ++i) {
        const double z = s.normal();
        g[i] = frozen[i] ? 0.0 : gamma * z;
      }
      basis.project(g);
      for (std::size_t k = 0; k < live.size(); ++k) {
        double sum = 0.0;
        for (Vertex v : cs.sets[live[k]]) sum += g[static_cast<std::size_t>(v)];
        d[k] = sum;
      }
      // Tight directions must be invisible to the step; one rebuild absorbs
      // accumulated rounding before this is treated as a defect.
      double leak = 0.0;
      for (std::size_t k = 0; k < live.size(); ++k)
        if (tight[k]) leak = std::max(leak, std::abs(d[k]));
      if (leak > 1e-9) {
        if (rebuilt) throw std::logic_error("lovett_meka: step is not orthogonal to a tight constraint");
        basis.rebuild();
        rebuilt = true;
        continue;
      }
      rebuilt = false;
      double norm = 0.0;
      for (double v : g) norm += v * v;
      if (norm < 1e-24) {
        stuck = true;
        break;
      }

      double lambda = 1.0;
      long hit_coord = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (frozen[i] || g[i] == 0.0) continue;
        const double room = ((g[i] > 0.0 ? 1.0 : -1.0) - x[i]) / g[i];
        if (room < lambda) {
          lambda = room;
          hit_coord = static_cast<long>(i);
        }
      }
      long hit_set = -1;
      for (std::size_t k = 0; k < live.size(); ++k) {
        if (tight[k] || d[k] == 0.0) continue;
        const double room = ((d[k] > 0.0 ? bound[k] : -bound[k]) - shift[k]) / d[k];
        if (room < lambda) {
          lambda = room;
          hit_set = static_cast<long>(k);
          hit_coord = -1;
        }
      }
      lambda = std::max(lambda, 0.0);

      for (std::size_t i = 0; i < n; ++i) x[i] += lambda * g[i];
      for (std::size_t k = 0; k < live.size(); ++k) shift[k] += lambda * d[k];
      if (hit_coord >= 0) x[static_cast<std::size_t>(hit_coord)] = g[static_cast<std::size_t>(hit_coord)] > 0 ? 1.0 : -1.0;
      if (hit_set >= 0) {
        const auto k = static_cast<std::size_t>(hit_set);
        shift[k] = d[k] > 0 ? bound[k] : -bound[k];
      }
      ++steps;
      if (lambda >= 1.0) ++full_steps;

      for (std::size_t i = 0; i < n; ++i)
        if (!frozen[i] && std::abs(x[i]) >= 1.0 - delta) {
          frozen[i] = true;
          ++newly_frozen;
          basis.freeze(i);
        }
      for (std::size_t k = 0; k < live.size(); ++k)
        if (!tight[k] && std::abs(shift[k]) >= band[k]) {
          tight[k] = true;
          basis.add(cs.sets[live[k]]);
        }

      if (opt.trajectory) {
        double slack = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < live.size(); ++k)
          slack = std::max(slack, std::abs(shift[k]) - bound[k]);
        *opt.trajectory << steps << ',' << (newly_frozen + (n - free0)) << ','
                        << (live.empty() ? 0.0 : slack) << '\n';
      }
    }
    out.steps += steps;
    out.attempts = attempt + 1;

    for (auto& v : x) v = std::clamp(v, -1.0, 1.0);
    // Audit from scratch rather than trusting the running sums.
    bool within = true;
    for (std::size_t k = 0; k < live.size() && within; ++k) {
      double sum = 0.0;
      for (Vertex v : cs.sets[live[k]]) sum += x[static_cast<std::size_t>(v)] - x0[static_cast<std::size_t>(v)];
      within = std::abs(sum) <= bound[k] + eps;
    }
    PartialVector candidate{std::move(x), std::move(frozen), delta};
    if (within && newly_frozen >= target && !stuck) {
      out.vector = std::move(candidate);
      return out;
    }
    if (within && newly_frozen >= best_frozen) {
      best_frozen = newly_frozen;
      best = std::move(candidate);
    }
  }
  throw PartialColoringError("lovett_meka: fewer than half of the free coordinates froze after " +
                                 std::to_string(opt.retries) + " attempts",
                             std::move(best));
}

}  // namespace disclab
