#pragma once

// Restricted operator norm of the incidence matrix,
//   sigma = max { |Mv| : v orthogonal to the all-ones vector, |v| = 1 },
// and the pseudorandomness audit it feeds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "disclab/error.hpp"
#include "disclab/hypergraph.hpp"
#include "disclab/rng.hpp"

namespace disclab {

struct NormEstimate {
  double sigma = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |Bv - lambda v| for the final unit iterate
  double c_norm = 0.0;    // sigma / sqrt(t)
  bool converged = false;
};

namespace detail {

inline void project_out_ones(std::span<double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// out = M^T M v, edge by edge in index order.
inline void gram_apply(const Hypergraph& h, std::span<const double> v,
                       std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& e : h.edges) {
    double s = 0.0;
    for (Vertex u : e) s += v[static_cast<std::size_t>(u)];
    for (Vertex u : e) out[static_cast<std::size_t>(u)] += s;
  }
}

}  // namespace detail

/// Power iteration on P M^T M P, P the projector onto the complement of the
/// all-ones vector. Stops when successive Rayleigh quotients agree to `tol`
/// relatively; on hitting max_iters the best estimate is returned with
/// converged = false. max_iters <= 0 selects 10 n.
inline NormEstimate restricted_norm(const Hypergraph& h, int t, double tol,
                                    int max_iters, const RandomSource& rng) {
  if (h.n < 2) throw ParameterError("restricted_norm: need n >= 2");
  const std::size_t n = static_cast<std::size_t>(h.n);
  if (max_iters <= 0) max_iters = 10 * h.n;
  auto s = for_purpose(rng, StreamPurpose::kSpectral).stream(0);

  std::vector<double> v(n), w(n);
  for (auto& x : v) x = s.normal();
  detail::project_out_ones(v);
  double nv = detail::norm2(v);
  for (auto& x : v) x /= nv;

  NormEstimate est;
  double lambda = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    detail::gram_apply(h, v, w);
    detail::project_out_ones(w);
    double rq = 0.0;
    for (std::size_t i = 0; i < n; ++i) rq += v[i] * w[i];
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += (w[i] - rq * v[i]) * (w[i] - rq * v[i]);
    est.iterations = it;
    est.residual = std::sqrt(res);
    const double nw = detail::norm2(w);
    if (nw == 0.0) {  // M vanishes on the complement of the ones vector
      lambda = 0.0;
      est.converged = true;
      break;
    }
    const bool done = it > 1 && std::abs(rq - lambda) <= tol * std::abs(rq);
    lambda = std::max(lambda, rq);
    if (done) {
      est.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
  }
  est.sigma = std::sqrt(std::max(lambda, 0.0));
  est.c_norm = t > 0 ? est.sigma / std::sqrt(static_cast<double>(t)) : 0.0;
  return est;
}

/// Sum over edges of (|S cap e| - alpha |e|)^2 with alpha = |S| / n.
inline double sum_squared_deviation(const Hypergraph& h, std::span<const Vertex> subset) {
  if (h.n <= 0) throw ParameterError("sum_squared_deviation: need n >= 1");
  std::vector<char> in(static_cast<std::size_t>(h.n), 0);
  for (Vertex v : subset) in[static_cast<std::size_t>(v)] = 1;
  std::size_t size = 0;
  for (char c : in) size += static_cast<std::size_t>(c);
  const double alpha = static_cast<double>(size) / h.n;
  double total = 0.0;
  for (const auto& e : h.edges) {
    int hit = 0;
    for (Vertex v : e) hit += in[static_cast<std::size_t>(v)];
    const double d = hit - alpha * static_cast<double>(e.size());
    total += d * d;
  }
  return total;
}

struct PseudorandomCheck {
  int violations = 0;
  double bound = 0.0;
  bool ok = true;
};

/// Counts edges with |S cap e| > alpha |e| + K alpha t and compares against
/// the Markov bound sigma^2 alpha (1 - alpha) n / (K alpha t)^2.
inline PseudorandomCheck pseudorandom_check(const Hypergraph& h,
                                            std::span<const Vertex> subset, double K,
                                            double sigma, int t) {
  std::vector<char> in(static_cast<std::size_t>(h.n), 0);
  for (Vertex v : subset) in[static_cast<std::size_t>(v)] = 1;
  std::size_t size = 0;
  for (char c : in) size += static_cast<std::size_t>(c);
  if (size == 0 || size >= static_cast<std::size_t>(h.n))
    throw ParameterError("pseudorandom_check: need 0 < |S| < n");
  const double alpha = static_cast<double>(size) / h.n;
  PseudorandomCheck out;
  for (const auto& e : h.edges) {
    int hit = 0;
    for (Vertex v : e) hit += in[static_cast<std::size_t>(v)];
    if (hit > alpha * static_cast<double>(e.size()) + K * alpha * t) ++out.violations;
  }
  const double gap = K * alpha * t;
  out.bound = gap > 0.0 ? sigma * sigma * alpha * (1.0 - alpha) * h.n / (gap * gap)
                        : std::numeric_limits<double>::infinity();
  out.ok = out.violations <= out.bound;
  return out;
}

}  // namespace disclab
