#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "disclab/error.hpp"
#include "disclab/rng.hpp"

namespace disclab {

using Vertex = int;
using Edge = std::vector<Vertex>;

/// Purpose tags keep the streams of different operations apart even when the
/// caller reuses one master seed for everything.
enum class StreamPurpose : std::uint64_t {
  kH1 = 1,
  kH2 = 2,
  kH2Even = 3,
  kResample = 4,
  kRandomColoring = 5,
  kPartialColoring = 6,
  kSpectral = 7,
  kTwoStage = 8,
  kExperiment = 9,
};

inline RandomSource for_purpose(const RandomSource& rng, StreamPurpose p) {
  return rng.derive(static_cast<std::uint64_t>(p));
}

/// A hypergraph on vertices 0..n-1 with edges stored as strictly increasing
/// vertex-id lists. Empty edges are allowed.
struct Hypergraph {
  int n = 0;
  std::vector<Edge> edges;
  std::string model_tag;

  std::size_t num_edges() const { return edges.size(); }

  std::size_t incidences() const {
    std::size_t total = 0;
    for (const auto& e : edges) total += e.size();
    return total;
  }

  std::vector<int> degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(std::max(n, 0)), 0);
    for (const auto& e : edges)
      for (Vertex v : e) ++deg[static_cast<std::size_t>(v)];
    return deg;
  }

  int max_degree() const {
    const auto deg = degrees();
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
  }

  /// Throws ParameterError naming the first broken invariant.
  void validate() const {
    if (n < 0) throw ParameterError("vertex count must be nonnegative");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& e = edges[i];
      for (std::size_t k = 0; k < e.size(); ++k) {
        if (e[k] < 0 || e[k] >= n)
          throw ParameterError("edge " + std::to_string(i) + ": vertex id " +
                               std::to_string(e[k]) + " outside [0, " +
                               std::to_string(n) + ")");
        if (k > 0 && e[k] <= e[k - 1])
          throw ParameterError("edge " + std::to_string(i) +
                               ": vertex ids not strictly increasing");
      }
    }
  }

  friend bool operator==(const Hypergraph&, const Hypergraph&) = default;
};

/// Random t-regular model: every vertex joins t distinct edges chosen
/// uniformly, independently of the other vertices.
inline Hypergraph generate_h1(int n, int m, int t, const RandomSource& rng) {
  if (n <= 0 || m <= 0) throw ParameterError("generate_h1: n and m must be positive");
  if (t < 0 || t > m) throw ParameterError("generate_h1: t must lie in [0, m]");
  const auto src = for_purpose(rng, StreamPurpose::kH1);
  Hypergraph h{n, std::vector<Edge>(static_cast<std::size_t>(m)), "h1"};
  for (auto& e : h.edges) e.reserve(static_cast<std::size_t>(t) * n / m + 8);

  // Partial Fisher-Yates over edge ids; swaps are undone afterwards so the
  // pool is reset in O(t) per vertex.
  std::vector<int> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> swaps;
  swaps.reserve(static_cast<std::size_t>(t));
  for (Vertex v = 0; v < n; ++v) {
    auto s = src.stream(static_cast<std::uint64_t>(v));
    swaps.clear();
    for (std::size_t k = 0; k < static_cast<std::size_t>(t); ++k) {
      const std::size_t j = k + s.below(static_cast<std::uint64_t>(m) - k);
      std::swap(pool[k], pool[j]);
      swaps.emplace_back(k, j);
      h.edges[static_cast<std::size_t>(pool[k])].push_back(v);
    }
    for (auto it = swaps.rbegin(); it != swaps.rend(); ++it)
      std::swap(pool[it->first], pool[it->second]);
  }
  return h;
}

/// Bernoulli model: each of the n*m incidences is present with probability p.
inline Hypergraph generate_h2(int n, int m, double p, const RandomSource& rng) {
  if (n <= 0 || m <= 0) throw ParameterError("generate_h2: n and m must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("generate_h2: p must lie in [0, 1]");
  const auto src = for_purpose(rng, StreamPurpose::kH2);
  Hypergraph h{n, std::vector<Edge>(static_cast<std::size_t>(m)), "h2"};
  for (int i = 0; i < m; ++i) {
    auto s = src.stream(static_cast<std::uint64_t>(i));
    auto& e = h.edges[static_cast<std::size_t>(i)];
    for (Vertex v = 0; v < n; ++v)
      if (s.bernoulli(p)) e.push_back(v);
  }
  return h;
}

/// Bernoulli(1/2) model conditioned on every edge having even size. Each row
/// is redrawn until its weight is even.
inline Hypergraph generate_h2_even(int n, int m, const RandomSource& rng) {
  if (n <= 0 || m <= 0) throw ParameterError("generate_h2_even: n and m must be positive");
  if (n % 2 != 0) throw ParameterError("generate_h2_even: n must be even");
  const auto src = for_purpose(rng, StreamPurpose::kH2Even);
  Hypergraph h{n, std::vector<Edge>(static_cast<std::size_t>(m)), "h2-even"};
  for (int i = 0; i < m; ++i) {
    auto s = src.stream(static_cast<std::uint64_t>(i));
    auto& e = h.edges[static_cast<std::size_t>(i)];
    do {
      e.clear();
      for (Vertex v = 0; v < n; ++v)
        if (s.coin()) e.push_back(v);
    } while (e.size() % 2 != 0);
  }
  return h;
}

/// Redraws vertex 0's membership in every edge as a fair coin.
inline Hypergraph resample_first_column(Hypergraph h, const RandomSource& rng) {
  if (h.n < 1) throw ParameterError("resample_first_column: need n >= 1");
  const auto src = for_purpose(rng, StreamPurpose::kResample);
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    auto s = src.stream(i);
    auto& e = h.edges[i];
    const bool has0 = !e.empty() && e.front() == 0;
    const bool want0 = s.coin();
    if (has0 && !want0) e.erase(e.begin());
    if (!has0 && want0) e.insert(e.begin(), 0);
  }
  return h;
}

struct EdgeSizeCheck {
  bool ok = true;
  std::vector<std::size_t> violating;
};

/// Every edge size must lie in [t/2, 3t/2].
inline EdgeSizeCheck check_edge_sizes(const Hypergraph& h, int t) {
  if (t < 1) throw ParameterError("check_edge_sizes: t must be >= 1");
  EdgeSizeCheck out;
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    const double k = static_cast<double>(h.edges[i].size());
    if (k < 0.5 * t || k > 1.5 * t) out.violating.push_back(i);
  }
  out.ok = out.violating.empty();
  return out;
}

}  // namespace disclab
