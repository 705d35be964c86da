#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gaitse/error.hpp"

// Sample entropy (SampEn) of a scalar series: -ln(A/B), where B counts pairs of
// length-m templates within Chebyshev distance r and A does the same for
// length m+1. Self-matches are excluded and both template sets start at the
// same N-m positions, so A <= B and the value is never negative.
namespace gaitse {

/// Match radius: either a fixed value in series units or a multiple of the
/// series' population standard deviation.
class Tolerance {
 public:
  enum class Mode : std::uint8_t { absolute, relative_to_sd };

  static constexpr Tolerance absolute(double r) noexcept { return {Mode::absolute, r}; }
  static constexpr Tolerance relative_to_sd(double factor) noexcept { return {Mode::relative_to_sd, factor}; }

  constexpr Mode mode() const noexcept { return mode_; }
  constexpr double value() const noexcept { return value_; }

  friend constexpr bool operator==(const Tolerance&, const Tolerance&) = default;

 private:
  constexpr Tolerance(Mode m, double v) noexcept : mode_(m), value_(v) {}
  Mode mode_;
  double value_;
};

struct SampEnConfig {
  std::size_t embedding_dim = 2;
  Tolerance tolerance = Tolerance::relative_to_sd(0.2);

  void validate() const {
    if (embedding_dim < 1) throw Error(Errc::invalid_config, "embedding dimension must be >= 1");
    if (!(tolerance.value() > 0.0) || !std::isfinite(tolerance.value()))
      throw Error(Errc::invalid_config, "tolerance must be positive and finite");
  }
};

struct SampEnResult {
  double value = 0.0;
  std::uint64_t a_count = 0;
  std::uint64_t b_count = 0;
  std::size_t n = 0;
  double resolved_tolerance = 0.0;

  friend bool operator==(const SampEnResult&, const SampEnResult&) = default;
};

/// Population (divide-by-n) standard deviation.
inline double population_sd(std::span<const double> xs) noexcept {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

inline double resolve_tolerance(std::span<const double> series, const SampEnConfig& config) {
  config.validate();
  if (config.tolerance.mode() == Tolerance::Mode::absolute) return config.tolerance.value();
  if (series.size() < 2)
    throw Error(Errc::insufficient_length, "relative tolerance needs at least 2 samples");
  const double sd = population_sd(series);
  if (sd == 0.0) throw Error(Errc::zero_variance_tolerance, "zero variance tolerance: series is constant");
  return config.tolerance.value() * sd;
}

inline SampEnResult sample_entropy(std::span<const double> x, const SampEnConfig& config = {}) {
  config.validate();
  const std::size_t n = x.size();
  const std::size_t m = config.embedding_dim;
  if (n < m + 2)
    throw Error(Errc::insufficient_length, "insufficient length: N=" + std::to_string(n) + " requires N >= " +
                                               std::to_string(m + 2));
  const double r = resolve_tolerance(x, config);

  std::uint64_t a = 0;
  std::uint64_t b = 0;
  const std::size_t templates = n - m;
  for (std::size_t i = 0; i + 1 < templates; ++i) {
    for (std::size_t j = i + 1; j < templates; ++j) {
      std::size_t k = 0;
      while (k < m && std::abs(x[i + k] - x[j + k]) <= r) ++k;
      if (k < m) continue;
      ++b;
      if (std::abs(x[i + m] - x[j + m]) <= r) ++a;
    }
  }

  if (b == 0) throw Error(Errc::no_template_matches, "no template matches at tolerance " + std::to_string(r));
  if (a == 0) throw UndefinedEntropyError(a, b);
  const double value = a == b ? 0.0 : -std::log(static_cast<double>(a) / static_cast<double>(b));
  return {value, a, b, n, r};
}

/// Per-series outcome of a batch: either a result or the error that series
/// raised.
using SampEnOutcome = std::variant<SampEnResult, Error>;

inline std::vector<SampEnOutcome> batch_sample_entropy(const std::vector<std::vector<double>>& series_set,
                                                       const SampEnConfig& config = {}) {
  std::vector<SampEnOutcome> out;
  out.reserve(series_set.size());
  for (const auto& s : series_set) {
    try {
      out.emplace_back(sample_entropy(s, config));
    } catch (const Error& e) {
      out.emplace_back(e);
    }
  }
  return out;
}

}  // namespace gaitse
