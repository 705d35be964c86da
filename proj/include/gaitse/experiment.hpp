#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaitse/detail/text.hpp"
#include "gaitse/error.hpp"
#include "gaitse/mann_whitney.hpp"
#include "gaitse/skeleton.hpp"
#include "gaitse/tilt.hpp"

namespace gaitse {

// =============================================================================
// Replicate grid (subject x direction x parameter)
// =============================================================================

struct GridKey {
  std::string subject;
  Direction direction = Direction::forward;
  GaitParameter parameter = GaitParameter::V1;

  friend auto operator<=>(const GridKey&, const GridKey&) = default;
  friend bool operator==(const GridKey&, const GridKey&) = default;
};

/// "subject/direction/parameter"
inline std::string to_string(const GridKey& k) {
  return k.subject + "/" + std::string(to_string(k.direction)) + "/" + std::string(to_string(k.parameter));
}

/// Replicate SE values per cell, iterated in key order. Values keep their
/// insertion order within a cell.
class ExperimentGrid {
 public:
  using Cells = std::map<GridKey, std::vector<double>>;

  void add(const GridKey& key, double se_value) { cells_[key].push_back(se_value); }

  const Cells& cells() const noexcept { return cells_; }
  bool empty() const noexcept { return cells_.empty(); }
  std::size_t size() const noexcept { return cells_.size(); }

  const std::vector<double>* find(const GridKey& key) const {
    auto it = cells_.find(key);
    return it == cells_.end() ? nullptr : &it->second;
  }

  friend bool operator==(const ExperimentGrid&, const ExperimentGrid&) = default;

 private:
  Cells cells_;
};

inline ExperimentGrid build_grid(std::span<const std::pair<GridKey, double>> runs) {
  ExperimentGrid grid;
  for (const auto& [key, value] : runs) grid.add(key, value);
  return grid;
}

// =============================================================================
// Cell summaries
// =============================================================================

struct CellSummary {
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  double variance = 0.0;  ///< population
  std::size_t n = 0;

  friend bool operator==(const CellSummary&, const CellSummary&) = default;
};

/// Quantile of sorted data by linear interpolation between order statistics
/// (h = (n-1)p).
inline double sorted_quantile(std::span<const double> sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

inline CellSummary summarize_cell(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::empty_series, "cannot summarize an empty cell");
  // Everything is computed from the sorted copy so any input order gives a
  // bit-identical summary.
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  CellSummary s;
  s.n = v.size();
  s.min = v.front();
  s.max = v.back();
  s.median = sorted_quantile(v, 0.5);
  s.q1 = sorted_quantile(v, 0.25);
  s.q3 = sorted_quantile(v, 0.75);
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.variance = ss / static_cast<double>(s.n);
  return s;
}

// =============================================================================
// Condition comparison
// =============================================================================

struct ChangeThresholds {
  double alpha = 0.05;
  double min_variance_ratio = 2.0;
};

struct ConditionComparison {
  CellSummary baseline;
  CellSummary treatment;
  double variance_ratio = 1.0;  ///< treatment.variance / baseline.variance
  double rank_sum_p = 1.0;
  bool exact_p = false;
  bool changed = false;
  std::string rationale;
};

/// Flags a change when the treatment SE spread is at least
/// `min_variance_ratio` times the baseline's, or the rank-sum test rejects at
/// `alpha`.
inline ConditionComparison compare_conditions(std::span<const double> baseline, std::span<const double> treatment,
                                              const ChangeThresholds& thresholds = {}) {
  if (baseline.size() < 2 || treatment.size() < 2)
    throw Error(Errc::insufficient_length, "comparison needs at least 2 replicates per condition");
  ConditionComparison c;
  c.baseline = summarize_cell(baseline);
  c.treatment = summarize_cell(treatment);
  if (c.baseline.variance == 0.0)
    throw Error(Errc::degenerate_baseline,
                "degenerate baseline: all baseline SE values are identical; inspect the raw data");
  c.variance_ratio = c.treatment.variance / c.baseline.variance;
  const auto mw = stats::mann_whitney_u(baseline, treatment);
  c.rank_sum_p = mw.p_value;
  c.exact_p = mw.exact;

  const bool by_variance = c.variance_ratio >= thresholds.min_variance_ratio;
  const bool by_rank = c.rank_sum_p < thresholds.alpha;
  c.changed = by_variance || by_rank;

  const auto ratio_txt = "variance ratio " + detail::fixed(c.variance_ratio, 4);
  const auto p_txt = "rank-sum p " + detail::fixed(c.rank_sum_p, 4);
  const auto min_ratio = detail::fixed(thresholds.min_variance_ratio, 4);
  const auto alpha = detail::fixed(thresholds.alpha, 4);
  if (by_variance && by_rank)
    c.rationale = ratio_txt + " >= " + min_ratio + " and " + p_txt + " < " + alpha;
  else if (by_variance)
    c.rationale = ratio_txt + " >= " + min_ratio;
  else if (by_rank)
    c.rationale = p_txt + " < " + alpha;
  else
    c.rationale = "no change: " + ratio_txt + " < " + min_ratio + "; " + p_txt + " >= " + alpha;
  return c;
}

struct ChangeEntry {
  GridKey key;
  std::optional<ConditionComparison> comparison;
  std::string error;  ///< set when the cell could not be compared

  bool changed() const noexcept { return comparison && comparison->changed; }
};

struct ChangeReport {
  std::vector<ChangeEntry> entries;  ///< shared keys, key order
  std::vector<GridKey> uncomparable;  ///< keys present in only one grid
};

inline ChangeReport detect_change(const ExperimentGrid& baseline, const ExperimentGrid& treatment,
                                  const ChangeThresholds& thresholds = {}) {
  ChangeReport report;
  for (const auto& [key, values] : baseline.cells()) {
    const auto* other = treatment.find(key);
    if (!other) {
      report.uncomparable.push_back(key);
      continue;
    }
    ChangeEntry entry{key, std::nullopt, {}};
    try {
      entry.comparison = compare_conditions(values, *other, thresholds);
    } catch (const Error& e) {
      entry.error = e.what();
    }
    report.entries.push_back(std::move(entry));
  }
  for (const auto& [key, _] : treatment.cells())
    if (!baseline.find(key)) report.uncomparable.push_back(key);
  std::sort(report.uncomparable.begin(), report.uncomparable.end());
  if (report.entries.empty()) throw Error(Errc::no_shared_keys, "grids share no cells; nothing to compare");
  return report;
}

// =============================================================================
// Serialization
// =============================================================================

inline constexpr std::string_view kGridColumns = "subject,direction,parameter,replicate,se_value";

/// Replicates are numbered from 1; values use the shortest exact decimal form.
inline std::string emit_grid_csv(const ExperimentGrid& grid) {
  std::string out(kGridColumns);
  out += '\n';
  for (const auto& [key, values] : grid.cells()) {
    if (key.subject.find_first_of(",\r\n") != std::string::npos)
      throw Error(Errc::invalid_config, "subject label '" + key.subject + "' cannot contain commas or newlines");
    for (std::size_t r = 0; r < values.size(); ++r)
      out += key.subject + "," + std::string(to_string(key.direction)) + "," + std::string(to_string(key.parameter)) +
             "," + std::to_string(r + 1) + "," + detail::shortest(values[r]) + "\n";
  }
  return out;
}

inline ExperimentGrid parse_grid_csv(std::string_view doc) {
  struct Row {
    GridKey key;
    std::int64_t replicate;
    double value;
  };
  std::vector<Row> rows;
  bool have_header = false;
  const auto lines = detail::split_lines(doc);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const auto line = lines[i];
    if (detail::is_blank(line) || line.front() == '#') continue;
    const auto f = detail::split_fields(line);
    if (!have_header) {
      if (f.size() != 5 || f[0] != "subject" || f[1] != "direction" || f[2] != "parameter" || f[3] != "replicate" ||
          f[4] != "se_value")
        throw ParseError(lineno, "expected column header '" + std::string(kGridColumns) + "'");
      have_header = true;
      continue;
    }
    if (f.size() != 5) throw ParseError(lineno, "expected 5 columns, got " + std::to_string(f.size()));
    if (f[0].empty()) throw ParseError(lineno, "empty subject label");
    const auto dir = direction_from_string(f[1]);
    if (!dir) throw ParseError(lineno, "direction must be forward or back, got '" + std::string(f[1]) + "'");
    const auto param = parameter_from_string(f[2]);
    if (!param) throw ParseError(lineno, "unknown parameter '" + std::string(f[2]) + "'");
    const auto rep = detail::require_int(f[3], lineno, "replicate");
    if (rep < 1) throw ParseError(lineno, "replicate numbers start at 1");
    rows.push_back({GridKey{std::string(f[0]), *dir, *param}, rep, detail::require_double(f[4], lineno, "se_value")});
  }
  if (!have_header) throw ParseError(0, "empty document: missing grid header");

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.replicate < b.replicate;
  });
  ExperimentGrid grid;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].key == rows[i - 1].key && rows[i].replicate == rows[i - 1].replicate)
      throw ParseError(0, "duplicate replicate " + std::to_string(rows[i].replicate) + " for " +
                              to_string(rows[i].key));
    grid.add(rows[i].key, rows[i].value);
  }
  return grid;
}

inline constexpr std::string_view kReportColumns = "key,var_ratio,p_value,changed,rationale";

inline std::string emit_report_csv(const ChangeReport& report) {
  std::string out(kReportColumns);
  out += '\n';
  for (const auto& e : report.entries) {
    if (e.comparison) {
      const auto& c = *e.comparison;
      out += to_string(e.key) + "," + detail::shortest(c.variance_ratio) + "," + detail::shortest(c.rank_sum_p) + "," +
             (c.changed ? "true" : "false") + "," + c.rationale + "\n";
    } else {
      std::string why = e.error;
      std::replace(why.begin(), why.end(), ',', ';');
      out += to_string(e.key) + ",,,false,error: " + why + "\n";
    }
  }
  for (const auto& k : report.uncomparable) out += to_string(k) + ",,,false,uncomparable\n";
  return out;
}

/// Fixed-width table for terminals.
inline std::string format_report_table(const ChangeReport& report) {
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s + " ";
  };
  std::string out = pad("key", 22) + pad("n_base", 6) + pad("n_trt", 6) + pad("mean_base", 10) +
                    pad("mean_trt", 10) + pad("var_ratio", 10) + pad("p_value", 9) + "changed\n";
  for (const auto& e : report.entries) {
    out += pad(to_string(e.key), 22);
    if (!e.comparison) {
      out += "error: " + e.error + "\n";
      continue;
    }
    const auto& c = *e.comparison;
    out += pad(std::to_string(c.baseline.n), 6) + pad(std::to_string(c.treatment.n), 6) +
           pad(detail::fixed(c.baseline.mean, 4), 10) + pad(detail::fixed(c.treatment.mean, 4), 10) +
           pad(detail::fixed(c.variance_ratio, 3), 10) + pad(detail::fixed(c.rank_sum_p, 4), 9) +
           (c.changed ? "yes" : "no") + "\n";
  }
  for (const auto& k : report.uncomparable) out += pad(to_string(k), 22) + "uncomparable\n";
  return out;
}

}  // namespace gaitse
