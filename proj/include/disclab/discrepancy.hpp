#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "disclab/error.hpp"
#include "disclab/hypergraph.hpp"
#include "disclab/rng.hpp"

namespace disclab {

/// A full +-1 coloring of the vertices.
struct Coloring {
  std::vector<int> signs;

  std::size_t size() const { return signs.size(); }
  Coloring negated() const {
    Coloring c{signs};
    for (auto& s : c.signs) s = -s;
    return c;
  }
  friend bool operator==(const Coloring&, const Coloring&) = default;
};

struct DiscReport {
  int disc = 0;
  std::optional<std::size_t> argmax_edge;  // empty when there are no edges
  std::vector<int> per_edge;
};

inline int edge_sum(const Edge& e, const Coloring& chi) {
  int s = 0;
  for (Vertex v : e) s += chi.signs[static_cast<std::size_t>(v)];
  return s;
}

inline DiscReport disc_of(const Hypergraph& h, const Coloring& chi) {
  if (chi.size() != static_cast<std::size_t>(h.n))
    throw ParameterError("disc_of: coloring length " + std::to_string(chi.size()) +
                         " does not match n = " + std::to_string(h.n));
  DiscReport r;
  r.per_edge.reserve(h.edges.size());
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    const int d = std::abs(edge_sum(h.edges[i], chi));
    r.per_edge.push_back(d);
    if (!r.argmax_edge || d > r.disc) {
      r.disc = d;
      r.argmax_edge = i;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Exhaustive oracles over bitmask colorings (bit v set <=> chi(v) = +1).

inline constexpr int kDefaultBruteForceCap = 28;

namespace detail {

inline std::vector<std::uint32_t> edge_masks(const Hypergraph& h) {
  std::vector<std::uint32_t> masks;
  masks.reserve(h.edges.size());
  for (const auto& e : h.edges) {
    std::uint32_t m = 0;
    for (Vertex v : e) m |= std::uint32_t{1} << v;
    masks.push_back(m);
  }
  return masks;
}

/// max_e |chi(e)|, abandoning the scan once it reaches `stop_at`.
inline int masked_disc(const std::vector<std::uint32_t>& masks,
                       std::uint32_t plus, int stop_at) {
  int worst = 0;
  for (auto m : masks) {
    const int size = std::popcount(m);
    const int d = std::abs(2 * std::popcount(m & plus) - size);
    if (d > worst) {
      worst = d;
      if (worst >= stop_at) return worst;
    }
  }
  return worst;
}

inline Coloring coloring_from_mask(int n, std::uint32_t plus) {
  Coloring c;
  c.signs.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) c.signs[static_cast<std::size_t>(v)] = (plus >> v) & 1U ? 1 : -1;
  return c;
}

inline std::uint64_t binomial_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

/// The k-subset of {0..} with the given colex rank, as a bitmask. Colex order
/// coincides with increasing numeric value of the mask.
inline std::uint32_t unrank_colex(std::uint64_t rank, int k) {
  std::uint32_t mask = 0;
  for (int i = k; i >= 1; --i) {
    int c = i - 1;
    while (binomial_u64(c + 1, i) <= rank) ++c;
    rank -= binomial_u64(c, i);
    mask |= std::uint32_t{1} << c;
  }
  return mask;
}

/// Gosper's hack: next larger integer with the same popcount.
inline std::uint32_t next_same_popcount(std::uint32_t x) {
  const std::uint32_t c = x & (~x + 1U);
  const std::uint32_t r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

inline unsigned resolve_jobs(unsigned jobs) {
  if (jobs == 0) jobs = std::max(1U, std::thread::hardware_concurrency());
  return jobs;
}

/// Runs body(chunk_index) for chunks [0, chunks) on `jobs` threads.
template <class Body>
void parallel_chunks(std::size_t chunks, unsigned jobs, Body&& body) {
  jobs = static_cast<unsigned>(std::min<std::size_t>(resolve_jobs(jobs), chunks));
  if (jobs <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) body(c);
    });
  for (auto& th : pool) th.join();
}

inline void require_cap(const Hypergraph& h, int cap, const char* who) {
  if (cap > 31) cap = 31;
  if (h.n > cap)
    throw RefusalError(std::string(who) + ": n = " + std::to_string(h.n) +
                       " exceeds the enumeration cap " + std::to_string(cap));
}

}  // namespace detail

struct BruteForceResult {
  int optimum = 0;
  Coloring witness;
};

/// Exact discrepancy by enumeration. Vertex 0 is fixed to +1 (chi and -chi
/// have equal discrepancy), so 2^(n-1) colorings are scanned. Among optimal
/// colorings the one with the smallest mask is returned.
inline BruteForceResult brute_force_disc(const Hypergraph& h,
                                         int cap = kDefaultBruteForceCap,
                                         unsigned jobs = 1) {
  detail::require_cap(h, cap, "brute_force_disc");
  h.validate();
  if (h.n == 0) return {0, Coloring{}};
  const auto masks = detail::edge_masks(h);
  const std::uint64_t total = std::uint64_t{1} << (h.n - 1);
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(total, 256));
  const std::uint64_t per = (total + chunks - 1) / chunks;

  std::atomic<int> global_best{std::numeric_limits<int>::max() / 2};
  std::vector<std::pair<int, std::uint64_t>> best(chunks, {std::numeric_limits<int>::max(), 0});
  detail::parallel_chunks(chunks, jobs, [&](std::size_t c) {
    const std::uint64_t lo = c * per, hi = std::min(total, lo + per);
    auto& [val, rank] = best[c];
    for (std::uint64_t k = lo; k < hi; ++k) {
      // Strict pruning against the global best keeps ties, so the reduction
      // below still sees the lowest-ranked optimum.
      const int bound = std::min(val, global_best.load(std::memory_order_relaxed) + 1);
      const std::uint32_t plus = 1U | static_cast<std::uint32_t>(k << 1);
      const int d = detail::masked_disc(masks, plus, bound);
      if (d < val) {
        val = d;
        rank = k;
        int g = global_best.load();
        while (d < g && !global_best.compare_exchange_weak(g, d)) {
        }
        if (d == 0) break;
      }
    }
  });
  const auto win = *std::min_element(best.begin(), best.end());
  return {win.first, detail::coloring_from_mask(h.n, 1U | static_cast<std::uint32_t>(win.second << 1))};
}

struct BalancedSearchResult {
  bool found = false;
  std::optional<Coloring> witness;
};

/// Is there a balanced coloring (n/2 of each sign) with max_e |chi(e)| <= target?
inline BalancedSearchResult brute_force_balanced_disc(const Hypergraph& h, int target,
                                                      int cap = kDefaultBruteForceCap) {
  if (h.n % 2 != 0) throw ParameterError("brute_force_balanced_disc: n must be even");
  detail::require_cap(h, cap, "brute_force_balanced_disc");
  h.validate();
  const auto masks = detail::edge_masks(h);
  const int half = h.n / 2;
  const std::uint64_t total = detail::binomial_u64(h.n, half);
  std::uint32_t plus = half == 0 ? 0U : (std::uint32_t{1} << half) - 1U;
  for (std::uint64_t r = 0; r < total; ++r) {
    if (detail::masked_disc(masks, plus, target + 1) <= target)
      return {true, detail::coloring_from_mask(h.n, plus)};
    if (half > 0 && r + 1 < total) plus = detail::next_same_popcount(plus);
  }
  return {false, std::nullopt};
}

// ---------------------------------------------------------------------------

struct DiscSummary {
  int min = 0;
  double median = 0.0;
  int max = 0;
  std::vector<int> samples;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

/// Discrepancy statistics of uniformly random colorings; trial i draws from
/// its own stream.
inline DiscSummary random_coloring_baseline(const Hypergraph& h, int trials,
                                            const RandomSource& rng) {
  if (trials < 1) throw ParameterError("random_coloring_baseline: trials must be >= 1");
  const auto src = for_purpose(rng, StreamPurpose::kRandomColoring);
  DiscSummary out;
  Coloring chi;
  chi.signs.resize(static_cast<std::size_t>(h.n));
  for (int i = 0; i < trials; ++i) {
    auto s = src.stream(static_cast<std::uint64_t>(i));
    for (auto& x : chi.signs) x = s.coin() ? 1 : -1;
    out.samples.push_back(disc_of(h, chi).disc);
  }
  out.min = *std::min_element(out.samples.begin(), out.samples.end());
  out.max = *std::max_element(out.samples.begin(), out.samples.end());
  out.median = median_of(std::vector<double>(out.samples.begin(), out.samples.end()));
  return out;
}

// ---------------------------------------------------------------------------
// Beck-Fiala iterative rounding.

namespace detail {

/// A nonzero vector y with A y = 0, where A is rows x cols (row-major) and
/// rows < cols. Gaussian elimination with partial pivoting; the first
/// non-pivot column is set to 1.
inline std::vector<double> kernel_vector(std::vector<double> a, std::size_t rows,
                                         std::size_t cols, double tol = 1e-9) {
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t best = r;
    for (std::size_t i = r + 1; i < rows; ++i)
      if (std::abs(a[i * cols + c]) > std::abs(a[best * cols + c])) best = i;
    if (std::abs(a[best * cols + c]) <= tol) continue;
    if (best != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(a[r * cols + j], a[best * cols + j]);
    const double p = a[r * cols + c];
    for (std::size_t j = c; j < cols; ++j) a[r * cols + j] /= p;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      const double f = a[i * cols + c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < cols; ++j) a[i * cols + j] -= f * a[r * cols + j];
    }
    pivot_col.push_back(c);
    is_pivot[c] = true;
    ++r;
  }
  std::size_t free_col = 0;
  while (free_col < cols && is_pivot[free_col]) ++free_col;
  std::vector<double> y(cols, 0.0);
  if (free_col == cols) return y;
  y[free_col] = 1.0;
  for (std::size_t i = 0; i < pivot_col.size(); ++i) y[pivot_col[i]] = -a[i * cols + free_col];
  return y;
}

}  // namespace detail

/// Iterative rounding with the classical 2t-1 guarantee, t = max degree.
/// Deterministic: lowest indices win every tie.
inline Coloring beck_fiala_color(const Hypergraph& h) {
  h.validate();
  constexpr double kSnap = 1e-7;
  const std::size_t n = static_cast<std::size_t>(h.n);
  const int t = h.max_degree();
  std::vector<double> x(n, 0.0);
  std::vector<bool> floating(n, true);

  for (;;) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
      int count = 0;
      for (Vertex v : h.edges[i]) count += floating[static_cast<std::size_t>(v)];
      if (count > t) active.push_back(i);
    }
    if (active.empty()) break;

    std::vector<std::size_t> cols;
    std::vector<long> col_of(n, -1);
    for (std::size_t v = 0; v < n; ++v)
      if (floating[v]) {
        col_of[v] = static_cast<long>(cols.size());
        cols.push_back(v);
      }
    // Counting guarantees #active < #floating, so a kernel vector exists.
    std::vector<double> a(active.size() * cols.size(), 0.0);
    for (std::size_t r = 0; r < active.size(); ++r)
      for (Vertex v : h.edges[active[r]]) {
        const long c = col_of[static_cast<std::size_t>(v)];
        if (c >= 0) a[r * cols.size() + static_cast<std::size_t>(c)] = 1.0;
      }
    const auto y = detail::kernel_vector(std::move(a), active.size(), cols.size());

    double step = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (y[c] == 0.0) continue;
      const double xi = x[cols[c]];
      const double room = y[c] > 0 ? (1.0 - xi) / y[c] : (-1.0 - xi) / y[c];
      step = std::min(step, room);
    }
    if (!std::isfinite(step)) throw ConvergenceError("beck_fiala_color: zero kernel vector");
    for (std::size_t c = 0; c < cols.size(); ++c) {
      auto& xi = x[cols[c]];
      xi += step * y[c];
      if (xi >= 1.0 - kSnap) {
        xi = 1.0;
        floating[cols[c]] = false;
      } else if (xi <= -1.0 + kSnap) {
        xi = -1.0;
        floating[cols[c]] = false;
      }
    }
  }

  Coloring chi;
  chi.signs.resize(n);
  for (std::size_t v = 0; v < n; ++v) chi.signs[v] = x[v] >= 0.0 ? 1 : -1;
  return chi;
}

}  // namespace disclab
