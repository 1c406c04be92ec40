#pragma once

// Exact first and second moments of X, the number of balanced colorings that
// are good (chi(e) = 0) for every row of a random even-row 0/1 matrix, plus
// an enumeration oracle for X and the desk-scale experiment.
//
// For a balanced chi, a uniformly random even-weight row e has chi(e) = 0 iff
// e meets the +1 and -1 halves in equally many places, so
//   Pr(good) = sum_i C(n/2, i)^2 / 2^(n-1) = C(n, n/2) / 2^(n-1).
// Two balanced colorings at Hamming distance d agree on n - d places (half of
// them +1) and differ on d places (half of them +1 in chi_1), and a row is
// good for both iff it balances each part separately:
//   Pr(both good) = C(d, d/2) C(n - d, (n - d)/2) / 2^(n-1).
// Ordered pairs at distance d = 2j number C(n, n/2) C(n/2, j)^2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "disclab/discrepancy.hpp"
#include "disclab/error.hpp"
#include "disclab/hypergraph.hpp"
#include "disclab/rng.hpp"

namespace disclab {

using BigInt = boost::multiprecision::cpp_int;
using ExactRational = boost::multiprecision::cpp_rational;

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline BigInt pow2(unsigned e) { return BigInt(1) << e; }

inline ExactRational pow_rational(const ExactRational& base, int e) {
  return ExactRational(boost::multiprecision::pow(boost::multiprecision::numerator(base), static_cast<unsigned>(e)),
                       boost::multiprecision::pow(boost::multiprecision::denominator(base), static_cast<unsigned>(e)));
}

/// Floating mirror of an exact rational; handles operands far beyond double range.
inline double to_double(const ExactRational& q) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::msb;
  using boost::multiprecision::numerator;
  if (q == 0) return 0.0;
  BigInt num = numerator(q), den = denominator(q);
  const bool neg = num < 0;
  if (neg) num = -num;
  const long shift = static_cast<long>(msb(num)) - static_cast<long>(msb(den));
  // Scale to a 64-bit quotient, then restore the exponent.
  const long k = 62 - shift;
  BigInt scaled = k >= 0 ? BigInt((num << static_cast<unsigned>(k)) / den)
                          : BigInt(num / (den << static_cast<unsigned>(-k)));
  const double v = std::ldexp(scaled.convert_to<double>(), static_cast<int>(-k));
  return neg ? -v : v;
}

inline std::string to_string(const ExactRational& q) {
  return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

namespace detail {
inline void require_even(int n, const char* who) {
  if (n < 2 || n % 2 != 0) throw ParameterError(std::string(who) + ": n must be even and >= 2");
}
}  // namespace detail

inline ExactRational prob_good(int n) {
  detail::require_even(n, "prob_good");
  return ExactRational(binomial(n, n / 2), pow2(static_cast<unsigned>(n - 1)));
}

inline ExactRational prob_both_good(int n, int d) {
  detail::require_even(n, "prob_both_good");
  if (d < 0 || d > n || d % 2 != 0) throw ParameterError("prob_both_good: d must be even in [0, n]");
  return ExactRational(binomial(d, d / 2) * binomial(n - d, (n - d) / 2),
                       pow2(static_cast<unsigned>(n - 1)));
}

inline ExactRational expected_count(int n, int m) {
  detail::require_even(n, "expected_count");
  if (m < 0) throw ParameterError("expected_count: m must be >= 0");
  return ExactRational(binomial(n, n / 2)) * pow_rational(prob_good(n), m);
}

/// Number of ordered pairs of balanced colorings at Hamming distance 2j.
inline BigInt pair_count(int n, int j) {
  return binomial(n, n / 2) * binomial(n / 2, j) * binomial(n / 2, j);
}

struct MomentReport {
  int n = 0;
  int m = 0;
  ExactRational e_x;
  ExactRational e_x2;
  ExactRational ratio;
  double e_x_float = 0.0;
  double e_x2_float = 0.0;
  double ratio_float = 0.0;
  /// C(n, n/2) (2 sqrt(2 / (pi n)))^m, the large-n form of E[X].
  double e_x_asymptotic = 0.0;
};

inline MomentReport second_moment(int n, int m) {
  detail::require_even(n, "second_moment");
  if (m < 0) throw ParameterError("second_moment: m must be >= 0");
  const int half = n / 2;
  // E[X^2] = sum_j pairs(j) * (A_j / 2^(n-1))^m with A_j integral; keep the
  // sum integral and divide once.
  BigInt total = 0;
  for (int j = 0; j <= half; ++j) {
    const BigInt a = binomial(2 * j, j) * binomial(n - 2 * j, half - j);
    total += pair_count(n, j) * boost::multiprecision::pow(a, static_cast<unsigned>(m));
  }
  MomentReport r;
  r.n = n;
  r.m = m;
  r.e_x = expected_count(n, m);
  r.e_x2 = ExactRational(total, pow2(static_cast<unsigned>(m) * static_cast<unsigned>(n - 1)));
  r.ratio = r.e_x2 / (r.e_x * r.e_x);
  r.e_x_float = to_double(r.e_x);
  r.e_x2_float = to_double(r.e_x2);
  r.ratio_float = to_double(r.ratio);
  r.e_x_asymptotic = to_double(ExactRational(binomial(n, half))) *
                     std::pow(2.0 * std::sqrt(2.0 / (std::numbers::pi * n)), m);
  return r;
}

/// max(1, floor(n / (8 ln n))): the edge count used for sweeps when m is not given.
inline int m_default(int n) {
  return std::max(1, static_cast<int>(std::floor(n / (8.0 * std::log(static_cast<double>(n))))));
}

struct BalancedCount {
  BigInt count = 0;
  std::optional<Coloring> witness;  // the good balanced coloring with the smallest mask
};

/// Enumerates all C(n, n/2) balanced colorings in colex order, split into
/// ranked blocks that may run on separate threads.
inline BalancedCount count_good_balanced_with_witness(const Hypergraph& h,
                                                      int cap = kDefaultBruteForceCap,
                                                      unsigned jobs = 1) {
  if (h.n % 2 != 0) throw ParameterError("count_good_balanced: n must be even");
  detail::require_cap(h, cap, "count_good_balanced");
  h.validate();
  const auto masks = detail::edge_masks(h);
  const int half = h.n / 2;
  const std::uint64_t total = detail::binomial_u64(h.n, half);
  const std::size_t blocks = static_cast<std::size_t>(std::min<std::uint64_t>(total, 64));
  const std::uint64_t per = (total + blocks - 1) / blocks;

  struct Block {
    std::uint64_t count = 0;
    std::optional<std::uint32_t> first;
  };
  std::vector<Block> out(blocks);
  detail::parallel_chunks(blocks, jobs, [&](std::size_t b) {
    const std::uint64_t lo = b * per, hi = std::min(total, lo + per);
    if (lo >= hi) return;
    std::uint32_t plus = detail::unrank_colex(lo, half);
    for (std::uint64_t r = lo; r < hi; ++r) {
      bool good = true;
      for (auto m : masks)
        if (2 * std::popcount(m & plus) != std::popcount(m)) {
          good = false;
          break;
        }
      if (good) {
        ++out[b].count;
        if (!out[b].first) out[b].first = plus;
      }
      if (half > 0) plus = detail::next_same_popcount(plus);
    }
  });
  BalancedCount result;
  for (const auto& b : out) {
    result.count += b.count;
    if (!result.witness && b.first) result.witness = detail::coloring_from_mask(h.n, *b.first);
  }
  return result;
}

inline BigInt count_good_balanced(const Hypergraph& h, int cap = kDefaultBruteForceCap,
                                  unsigned jobs = 1) {
  return count_good_balanced_with_witness(h, cap, jobs).count;
}

enum class H2Mode { kExact, kResample };

struct H2Trial {
  int trial = 0;
  std::uint64_t seed = 0;
  BigInt x = 0;
  bool disc_ok = false;
};

struct H2ExperimentResult {
  std::vector<H2Trial> trials;
  double fraction = 0.0;
};

/// Per trial: draw an even-row instance and count good balanced colorings.
/// Exact mode reports X > 0 (discrepancy 0 on the conditioned instance).
/// Resample mode also redraws column 0 and reports disc <= 1 on the result.
inline H2ExperimentResult h2_experiment(int n, int m, int trials, const RandomSource& rng,
                                        H2Mode mode = H2Mode::kExact,
                                        int cap = kDefaultBruteForceCap, unsigned jobs = 1) {
  detail::require_even(n, "h2_experiment");
  if (m < 0 || trials < 1) throw ParameterError("h2_experiment: need m >= 0 and trials >= 1");
  if (n > std::min(cap, 31)) throw RefusalError("h2_experiment: n exceeds the enumeration cap");
  const auto src = for_purpose(rng, StreamPurpose::kExperiment);
  H2ExperimentResult out;
  out.trials.resize(static_cast<std::size_t>(trials));
  // Trials run one after another; each enumeration is parallel inside.
  int ok = 0;
  for (int i = 0; i < trials; ++i) {
    auto& rec = out.trials[static_cast<std::size_t>(i)];
    rec.trial = i;
    rec.seed = src.derive(static_cast<std::uint64_t>(i)).master_seed;
    const RandomSource trial_rng{rec.seed};
    const Hypergraph h = m == 0 ? Hypergraph{n, {}, "h2-even"} : generate_h2_even(n, m, trial_rng);
    const auto counted = count_good_balanced_with_witness(h, cap, jobs);
    rec.x = counted.count;
    rec.disc_ok = counted.count > 0;
    if (mode == H2Mode::kResample) {
      const Hypergraph full = resample_first_column(h, trial_rng);
      if (counted.witness)
        rec.disc_ok = disc_of(full, *counted.witness).disc <= 1;
      else
        rec.disc_ok = brute_force_disc(full, cap, jobs).optimum <= 1;
    }
    ok += rec.disc_ok;
  }
  out.fraction = static_cast<double>(ok) / trials;
  return out;
}

}  // namespace disclab
