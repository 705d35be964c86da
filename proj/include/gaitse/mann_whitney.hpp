#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "gaitse/error.hpp"

// Two-sided Mann-Whitney U (Wilcoxon rank-sum) test.
namespace gaitse::stats {

struct MannWhitneyResult {
  double u = 0.0;        ///< U statistic of the first sample
  double p_value = 1.0;  ///< two-sided
  bool exact = false;    ///< permutation distribution rather than normal approximation
};

/// Both samples at or above this size use the normal approximation.
inline constexpr std::size_t kNormalApproxMinSize = 8;

namespace detail {

struct PooledRanks {
  std::vector<std::int64_t> doubled_rank;  // 2 * midrank, so ties stay integral
  std::vector<bool> from_first;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
};

inline PooledRanks pooled_ranks(std::span<const double> a, std::span<const double> b) {
  std::vector<std::pair<double, bool>> pooled;
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.emplace_back(v, true);
  for (double v : b) pooled.emplace_back(v, false);
  std::sort(pooled.begin(), pooled.end(), [](const auto& l, const auto& r) { return l.first < r.first; });

  PooledRanks out;
  out.doubled_rank.resize(pooled.size());
  out.from_first.resize(pooled.size());
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    // ranks i+1 .. j share the midrank (i+1+j)/2
    const auto doubled = static_cast<std::int64_t>(i + 1 + j);
    const auto t = static_cast<double>(j - i);
    out.tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      out.doubled_rank[k] = doubled;
      out.from_first[k] = pooled[k].second;
    }
    i = j;
  }
  return out;
}

// Exact two-sided p from the permutation distribution of the doubled rank sum
// of a `k`-subset, counted by dynamic programming over the pooled ranks.
inline double exact_p(const std::vector<std::int64_t>& doubled_rank, std::size_t k, std::int64_t observed) {
  const std::size_t total_n = doubled_rank.size();
  std::int64_t max_sum = 0;
  {
    auto sorted = doubled_rank;
    std::sort(sorted.rbegin(), sorted.rend());
    for (std::size_t i = 0; i < k; ++i) max_sum += sorted[i];
  }
  // ways[c][s]: number of c-subsets of the ranks seen so far with doubled sum s
  std::vector<std::vector<long double>> ways(k + 1, std::vector<long double>(static_cast<std::size_t>(max_sum) + 1));
  ways[0][0] = 1.0L;
  for (std::size_t item = 0; item < total_n; ++item) {
    const auto r = static_cast<std::size_t>(doubled_rank[item]);
    for (std::size_t c = std::min(k, item + 1); c >= 1; --c)
      for (std::size_t s = static_cast<std::size_t>(max_sum); s >= r; --s) ways[c][s] += ways[c - 1][s - r];
  }
  // Expected doubled rank sum is k (N + 1).
  const auto expected = static_cast<std::int64_t>(k * (total_n + 1));
  const auto observed_dev = std::llabs(observed - expected);
  long double hit = 0.0L;
  long double all = 0.0L;
  for (std::size_t s = 0; s <= static_cast<std::size_t>(max_sum); ++s) {
    all += ways[k][s];
    if (std::llabs(static_cast<std::int64_t>(s) - expected) >= observed_dev) hit += ways[k][s];
  }
  return static_cast<double>(std::min(1.0L, hit / all));
}

}  // namespace detail

/// Normal approximation (with tie and continuity correction) once both samples
/// have at least kNormalApproxMinSize values; exact permutation distribution
/// otherwise.
inline MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(Errc::insufficient_length, "Mann-Whitney U needs two nonempty samples");
  const auto ranks = detail::pooled_ranks(a, b);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double total_n = n1 + n2;

  std::int64_t doubled_r1 = 0;
  for (std::size_t i = 0; i < ranks.doubled_rank.size(); ++i)
    if (ranks.from_first[i]) doubled_r1 += ranks.doubled_rank[i];

  MannWhitneyResult res;
  res.u = static_cast<double>(doubled_r1) / 2.0 - n1 * (n1 + 1.0) / 2.0;

  if (a.size() >= kNormalApproxMinSize && b.size() >= kNormalApproxMinSize) {
    const double mu = n1 * n2 / 2.0;
    const double var = n1 * n2 / 12.0 * ((total_n + 1.0) - ranks.tie_term / (total_n * (total_n - 1.0)));
    if (var <= 0.0) {
      res.p_value = 1.0;
      return res;
    }
    const double z = std::max(0.0, std::abs(res.u - mu) - 0.5) / std::sqrt(var);
    res.p_value = std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
    return res;
  }

  res.exact = true;
  // Enumerate subsets of the smaller sample's size; the two-sided p is the
  // same from either side.
  if (a.size() <= b.size()) {
    res.p_value = detail::exact_p(ranks.doubled_rank, a.size(), doubled_r1);
  } else {
    std::int64_t doubled_r2 = 0;
    for (std::size_t i = 0; i < ranks.doubled_rank.size(); ++i)
      if (!ranks.from_first[i]) doubled_r2 += ranks.doubled_rank[i];
    res.p_value = detail::exact_p(ranks.doubled_rank, b.size(), doubled_r2);
  }
  return res;
}

}  // namespace gaitse::stats
