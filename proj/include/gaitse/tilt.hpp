#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitse/detail/text.hpp"
#include "gaitse/error.hpp"
#include "gaitse/skeleton.hpp"

namespace gaitse {

// =============================================================================
// Gait parameters
// =============================================================================

/// V1 spine tilt, V2 hip tilt, V3 shoulder tilt.
enum class GaitParameter : std::uint8_t { V1, V2, V3 };

inline constexpr std::array<GaitParameter, 3> kGaitParameters = {GaitParameter::V1, GaitParameter::V2,
                                                                   GaitParameter::V3};

/// Joint pair behind a parameter. For V2/V3 `first` is the left joint and
/// `second` the right one; for V1 `first` is SpineBase and `second`
/// SpineShoulder, so every difference is taken as second - first.
struct JointPair {
  JointId first;
  JointId second;
};

constexpr JointPair joint_pair(GaitParameter p) noexcept {
  switch (p) {
    case GaitParameter::V1: return {joints::BS, joints::ShS};
    case GaitParameter::V2: return {joints::LH, joints::RH};
    case GaitParameter::V3: return {joints::LSh, joints::RSh};
  }
  return {joints::BS, joints::ShS};
}

constexpr std::string_view to_string(GaitParameter p) noexcept {
  return p == GaitParameter::V1 ? "V1" : p == GaitParameter::V2 ? "V2" : "V3";
}

constexpr std::string_view describe(GaitParameter p) noexcept {
  return p == GaitParameter::V1 ? "spine tilt" : p == GaitParameter::V2 ? "hip tilt" : "shoulder tilt";
}

inline std::optional<GaitParameter> parameter_from_string(std::string_view s) noexcept {
  for (auto p : kGaitParameters)
    if (to_string(p) == s) return p;
  return std::nullopt;
}

// =============================================================================
// Slope and angle
// =============================================================================

/// Slope of a joint-pair line, or the vertical marker when the two x
/// coordinates coincide exactly.
class Slope {
 public:
  static constexpr Slope vertical() noexcept { return Slope{}; }
  static constexpr Slope of(double m) noexcept { return Slope{m}; }

  constexpr bool is_vertical() const noexcept { return !value_.has_value(); }
  constexpr double value() const { return value_.value(); }

  friend constexpr bool operator==(const Slope&, const Slope&) = default;

 private:
  constexpr Slope() = default;
  constexpr explicit Slope(double m) : value_(m) {}
  std::optional<double> value_;
};

/// (right.y - left.y) / (right.x - left.x).
inline Slope pair_slope(const JointSample& left, const JointSample& right) noexcept {
  const double dx = right.x - left.x;
  if (dx == 0.0) return Slope::vertical();
  return Slope::of((right.y - left.y) / dx);
}

/// arctan(slope) in degrees; vertical maps to +90.
inline double slope_to_degrees(Slope s) noexcept {
  if (s.is_vertical()) return 90.0;
  return std::atan(s.value()) * (180.0 / std::numbers::pi);
}

/// How the spine vector (V1) is measured. The hip and shoulder pairs are always
/// measured from horizontal.
enum class SpineReference : std::uint8_t {
  vertical,    ///< arctan(dx/dy): an upright spine reads ~0 degrees
  horizontal,  ///< arctan(dy/dx), the pair formula taken literally: upright reads ~+/-90
};

struct TiltConfig {
  double max_dropout_fraction = 0.2;
  SpineReference spine = SpineReference::vertical;
};

struct TiltSample {
  std::int64_t frame_index = 0;
  std::int64_t timestamp_ms = 0;
  Slope slope = Slope::vertical();
  double angle_deg = 0.0;

  friend bool operator==(const TiltSample&, const TiltSample&) = default;
};

/// Slope of one parameter between two positioned joints, following the
/// parameter's angle convention.
inline Slope parameter_slope(GaitParameter p, const JointSample& first, const JointSample& second,
                             SpineReference spine = SpineReference::vertical) noexcept {
  if (p == GaitParameter::V1 && spine == SpineReference::vertical) {
    // Swap the axes so the "rise over run" is lateral offset over height.
    return pair_slope(JointSample{first.joint, first.y, first.x, first.z},
                      JointSample{second.joint, second.y, second.x, second.z});
  }
  return pair_slope(first, second);
}

/// Tilt of one frame, or nullopt if either joint of the pair is missing.
inline std::optional<TiltSample> frame_tilt(const Frame& f, GaitParameter p,
                                            SpineReference spine = SpineReference::vertical) {
  const auto pair = joint_pair(p);
  const auto& a = f.find(pair.first);
  const auto& b = f.find(pair.second);
  if (!a || !b) return std::nullopt;
  const auto slope = parameter_slope(p, *a, *b, spine);
  return TiltSample{f.index(), f.timestamp_ms(), slope, slope_to_degrees(slope)};
}

// =============================================================================
// Series
// =============================================================================

struct TiltSeries {
  GaitParameter parameter = GaitParameter::V1;
  std::vector<TiltSample> samples;
  std::size_t dropout_count = 0;
  RecordingMeta source_meta;
  double nominal_fps = 30.0;

  std::vector<double> angles() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.angle_deg);
    return out;
  }

  friend bool operator==(const TiltSeries&, const TiltSeries&) = default;
};

inline TiltSeries tilt_series(const Recording& rec, GaitParameter p, const TiltConfig& config = {}) {
  TiltSeries series;
  series.parameter = p;
  series.source_meta = rec.meta;
  series.nominal_fps = rec.nominal_fps;
  series.samples.reserve(rec.frames.size());
  for (const auto& f : rec.frames) {
    if (auto s = frame_tilt(f, p, config.spine))
      series.samples.push_back(*s);
    else
      ++series.dropout_count;
  }
  if (series.samples.size() < 2)
    throw Error(Errc::insufficient_frames, "insufficient frames: " + std::to_string(series.samples.size()) +
                                               " usable for " + std::string(to_string(p)));
  if (static_cast<double>(series.dropout_count) >
      config.max_dropout_fraction * static_cast<double>(rec.frames.size()))
    throw Error(Errc::excessive_dropout, "excessive dropout: " + std::to_string(series.dropout_count) + " of " +
                                             std::to_string(rec.frames.size()) + " frames lack " +
                                             std::string(to_string(p)) + " joints");
  return series;
}

struct Exceedance {
  double fraction_over = 0.0;
  double max_abs_deg = 0.0;
};

/// Share of samples whose magnitude exceeds the threshold (5 degrees is the
/// healthy-walking bound), plus the largest magnitude seen.
inline Exceedance exceedance(std::span<const double> angles_deg, double threshold_deg = 5.0) {
  if (angles_deg.empty()) throw Error(Errc::empty_series, "exceedance of an empty series");
  std::size_t over = 0;
  double max_abs = 0.0;
  for (double a : angles_deg) {
    over += std::abs(a) > threshold_deg;
    max_abs = std::max(max_abs, std::abs(a));
  }
  return {static_cast<double>(over) / static_cast<double>(angles_deg.size()), max_abs};
}

inline Exceedance exceedance(const TiltSeries& series, double threshold_deg = 5.0) {
  const auto a = series.angles();
  return exceedance(std::span<const double>(a), threshold_deg);
}

// =============================================================================
// Tilt CSV
// =============================================================================

inline constexpr std::string_view kTiltColumns = "frame,timestamp_ms,angle_deg";

inline std::string emit_tilt_csv(const TiltSeries& series) {
  std::string out;
  out += "# parameter=" + std::string(to_string(series.parameter)) + "\n";
  out += "# fps=" + detail::shortest(series.nominal_fps) + "\n";
  out += "# subject=" + series.source_meta.subject_label + "\n";
  out += "# direction=" + std::string(to_string(series.source_meta.direction)) + "\n";
  out += "# condition=" + series.source_meta.condition_label + "\n";
  out += "# path_length_m=" + detail::shortest(series.source_meta.path_length_m) + "\n";
  out += "# dropout_count=" + std::to_string(series.dropout_count) + "\n";
  out += kTiltColumns;
  out += '\n';
  for (const auto& s : series.samples)
    out += std::to_string(s.frame_index) + "," + std::to_string(s.timestamp_ms) + "," + detail::fixed(s.angle_deg) +
           "\n";
  return out;
}

/// Reads a tilt CSV. Slopes are reconstructed from the stored angles.
inline TiltSeries parse_tilt_csv(std::string_view doc) {
  TiltSeries series;
  bool have_parameter = false;
  bool have_header = false;
  const auto lines = detail::split_lines(doc);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const auto line = lines[i];
    if (detail::is_blank(line)) continue;
    if (line.front() == '#') {
      auto kv = detail::comment_key_value(line);
      if (!kv) continue;
      auto [key, value] = *kv;
      if (key == "parameter") {
        auto p = parameter_from_string(value);
        if (!p) throw ParseError(lineno, "unknown parameter '" + std::string(value) + "'");
        series.parameter = *p;
        have_parameter = true;
      } else if (key == "fps") {
        series.nominal_fps = detail::require_double(value, lineno, "fps");
      } else if (key == "subject") {
        series.source_meta.subject_label = std::string(value);
      } else if (key == "direction") {
        auto d = direction_from_string(value);
        if (!d) throw ParseError(lineno, "direction must be forward or back");
        series.source_meta.direction = *d;
      } else if (key == "condition") {
        series.source_meta.condition_label = std::string(value);
      } else if (key == "path_length_m") {
        series.source_meta.path_length_m = detail::require_double(value, lineno, "path_length_m");
      } else if (key == "dropout_count") {
        const auto n = detail::require_int(value, lineno, "dropout_count");
        if (n < 0) throw ParseError(lineno, "dropout_count must be nonnegative");
        series.dropout_count = static_cast<std::size_t>(n);
      }
      continue;
    }
    const auto fields = detail::split_fields(line);
    if (!have_header) {
      if (fields.size() != 3 || fields[0] != "frame" || fields[1] != "timestamp_ms" || fields[2] != "angle_deg")
        throw ParseError(lineno, "expected column header '" + std::string(kTiltColumns) + "'");
      have_header = true;
      continue;
    }
    if (fields.size() != 3) throw ParseError(lineno, "expected 3 columns, got " + std::to_string(fields.size()));
    TiltSample s;
    s.frame_index = detail::require_int(fields[0], lineno, "frame");
    s.timestamp_ms = detail::require_int(fields[1], lineno, "timestamp_ms");
    s.angle_deg = detail::require_double(fields[2], lineno, "angle_deg");
    if (s.angle_deg < -90.0 || s.angle_deg > 90.0) throw ParseError(lineno, "angle outside [-90, 90]");
    if (!series.samples.empty() && s.frame_index <= series.samples.back().frame_index)
      throw ParseError(lineno, "frame indices not strictly increasing");
    s.slope = std::abs(s.angle_deg) == 90.0 ? Slope::vertical()
                                            : Slope::of(std::tan(s.angle_deg * std::numbers::pi / 180.0));
    series.samples.push_back(s);
  }
  if (!have_parameter) throw ParseError(0, "missing '# parameter=' line");
  if (series.samples.empty()) throw ParseError(0, "empty document: no data rows");
  return series;
}

}  // namespace gaitse
