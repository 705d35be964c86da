#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaitse/detail/text.hpp"
#include "gaitse/error.hpp"
#include "gaitse/experiment.hpp"

// SVG 1.1 emitters: replicate box plots for a W_ijv grid and three-axis star
// glyphs of mean SE profiles.
namespace gaitse {

struct PlotStyle {
  int width_px = 800;
  int height_px = 480;
  int margin_px = 48;
  bool show_mean_marker = true;
  std::string font_family_name = "Helvetica";

  void validate() const {
    if (width_px < 100 || height_px < 100) throw Error(Errc::invalid_config, "plot width/height must be >= 100 px");
    if (margin_px < 0 || 2 * margin_px >= std::min(width_px, height_px))
      throw Error(Errc::invalid_config, "plot margin leaves no drawing area");
  }
};

struct GlyphProfile {
  std::string label;
  std::array<double, 3> axis_values{};  ///< V1, V2, V3
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string px(double v) { return fixed(v, 2); }

inline std::string svg_open(const PlotStyle& style) {
  const auto w = std::to_string(style.width_px);
  const auto h = std::to_string(style.height_px);
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + w + "\" height=\"" + h +
         "\" viewBox=\"0 0 " + w + " " + h + "\" font-family=\"" + xml_escape(style.font_family_name) +
         "\" font-size=\"11\">\n"
         "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + w + "\" height=\"" + h + "\" fill=\"white\"/>\n";
}

inline std::string line(const char* cls, double x1, double y1, double x2, double y2, const char* extra = "") {
  return std::string("<line class=\"") + cls + "\" x1=\"" + px(x1) + "\" y1=\"" + px(y1) + "\" x2=\"" + px(x2) +
         "\" y2=\"" + px(y2) + "\" stroke=\"black\"" + extra + "/>\n";
}

inline std::string text(double x, double y, std::string_view content, const char* anchor = "middle",
                         const char* cls = "label") {
  return std::string("<text class=\"") + cls + "\" x=\"" + px(x) + "\" y=\"" + px(y) + "\" text-anchor=\"" + anchor +
         "\">" + xml_escape(content) + "</text>\n";
}

}  // namespace detail

// =============================================================================
// Box plots
// =============================================================================

/// Vertical value axis shared by every box in a plot.
struct ValueScale {
  double lo = 0.0;
  double hi = 1.0;
  double top_px = 0.0;
  double bottom_px = 1.0;

  double y(double v) const { return bottom_px - (v - lo) / (hi - lo) * (bottom_px - top_px); }
};

inline constexpr double kBoxAxisGutterPx = 40.0;
inline constexpr double kBoxLabelBandPx = 36.0;

inline ValueScale boxplot_scale(const ExperimentGrid& grid, const PlotStyle& style) {
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (const auto& [_, values] : grid.cells())
    for (double v : values) {
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  const double pad = hi > lo ? 0.05 * (hi - lo) : 0.5;
  const double m = style.margin_px;
  return {lo - pad, hi + pad, m, style.height_px - m - kBoxLabelBandPx};
}

/// Subscript indices "ijv" for a key: subject rank (1-based over sorted
/// subjects), direction (forward 1, back 2), parameter number.
inline std::string grid_index_label(const ExperimentGrid& grid, const GridKey& key) {
  std::vector<std::string> subjects;
  for (const auto& [k, _] : grid.cells())
    if (subjects.empty() || subjects.back() != k.subject) subjects.push_back(k.subject);
  const auto i = std::find(subjects.begin(), subjects.end(), key.subject) - subjects.begin() + 1;
  const int j = key.direction == Direction::forward ? 1 : 2;
  const int v = static_cast<int>(key.parameter) + 1;
  return std::to_string(i) + std::to_string(j) + std::to_string(v);
}

inline std::string boxplot_svg(const ExperimentGrid& grid, const PlotStyle& style = {}) {
  style.validate();
  if (grid.empty()) throw Error(Errc::empty_series, "box plot of an empty grid");
  using detail::line;
  using detail::px;
  using detail::text;

  const auto scale = boxplot_scale(grid, style);
  const double left = style.margin_px + kBoxAxisGutterPx;
  const double right = style.width_px - style.margin_px;
  const double slot = (right - left) / static_cast<double>(grid.size());
  const double box_w = std::min(0.5 * slot, 40.0);

  std::string out = detail::svg_open(style);

  // Value axis with five ticks.
  out += "<g class=\"axis\">\n";
  out += line("axis-line", left, scale.top_px, left, scale.bottom_px);
  for (int t = 0; t <= 4; ++t) {
    const double v = scale.lo + (scale.hi - scale.lo) * t / 4.0;
    out += line("tick", left - 4.0, scale.y(v), left, scale.y(v));
    out += text(left - 6.0, scale.y(v) + 4.0, detail::fixed(v, 2), "end", "tick-label");
  }
  out += text(style.margin_px / 2.0, style.margin_px - 12.0, "SE", "start", "axis-title");
  out += "</g>\n";

  std::size_t index = 0;
  for (const auto& [key, values] : grid.cells()) {
    const auto s = summarize_cell(values);
    const double cx = left + slot * (static_cast<double>(index) + 0.5);
    const double x0 = cx - box_w / 2.0;
    const double x1 = cx + box_w / 2.0;
    out += "<g class=\"box\" data-key=\"" + detail::xml_escape(to_string(key)) + "\">\n";
    out += line("whisker", cx, scale.y(s.max), cx, scale.y(s.q3));
    out += line("whisker", cx, scale.y(s.q1), cx, scale.y(s.min));
    out += line("cap", cx - box_w / 4.0, scale.y(s.max), cx + box_w / 4.0, scale.y(s.max));
    out += line("cap", cx - box_w / 4.0, scale.y(s.min), cx + box_w / 4.0, scale.y(s.min));
    out += "<rect class=\"iqr\" x=\"" + px(x0) + "\" y=\"" + px(scale.y(s.q3)) + "\" width=\"" + px(box_w) +
           "\" height=\"" + px(scale.y(s.q1) - scale.y(s.q3)) + "\" fill=\"#d9e6f2\" stroke=\"black\"/>\n";
    out += line("median", x0, scale.y(s.median), x1, scale.y(s.median), " stroke-width=\"2\"");
    if (style.show_mean_marker) {
      // circled cross marking the mean
      const double my = scale.y(s.mean);
      const double r = 4.0;
      const double d = r / std::numbers::sqrt2;
      out += "<g class=\"mean\">\n<circle cx=\"" + px(cx) + "\" cy=\"" + px(my) + "\" r=\"" + px(r) +
             "\" fill=\"none\" stroke=\"black\"/>\n";
      out += line("mean-cross", cx - d, my - d, cx + d, my + d);
      out += line("mean-cross", cx - d, my + d, cx + d, my - d);
      out += "</g>\n";
    }
    const double label_y = scale.bottom_px + 16.0;
    out += "<text class=\"key\" x=\"" + px(cx) + "\" y=\"" + px(label_y) +
           "\" text-anchor=\"middle\">W<tspan dy=\"3\" font-size=\"8\">" + grid_index_label(grid, key) +
           "</tspan></text>\n";
    out += text(cx, label_y + 14.0,
                key.subject + " " + std::string(to_string(key.direction)).substr(0, 3) + " " +
                    std::string(to_string(key.parameter)),
                "middle", "key-detail");
    out += "</g>\n";
    ++index;
  }
  out += "</svg>\n";
  return out;
}

// =============================================================================
// Star glyphs
// =============================================================================

/// Axis directions in degrees counterclockwise from +x: V1 up, V2 lower left,
/// V3 lower right.
inline constexpr std::array<double, 3> kGlyphAxisDeg = {90.0, 210.0, 330.0};

/// Mean SE per parameter for every (subject, direction) in key order; a
/// parameter with no cell contributes 0.
inline std::vector<GlyphProfile> glyph_profiles(const ExperimentGrid& grid) {
  std::map<std::pair<std::string, Direction>, std::array<double, 3>> acc;
  for (const auto& [key, values] : grid.cells())
    acc[{key.subject, key.direction}][static_cast<std::size_t>(key.parameter)] = summarize_cell(values).mean;
  std::vector<GlyphProfile> out;
  for (const auto& [k, v] : acc) out.push_back({k.first + " " + std::string(to_string(k.second)), v});
  return out;
}

inline std::string panel_letter(std::size_t i) {
  std::string s;
  ++i;
  while (i > 0) {
    --i;
    s.insert(s.begin(), static_cast<char>('A' + i % 26));
    i /= 26;
  }
  return s;
}

inline std::string starglyph_svg(const std::vector<GlyphProfile>& profiles, const PlotStyle& style = {}) {
  style.validate();
  if (profiles.empty()) throw Error(Errc::empty_series, "star glyph plot needs at least one profile");
  double global_max = 0.0;
  for (const auto& p : profiles)
    for (double v : p.axis_values) {
      if (!std::isfinite(v) || v < 0.0)
        throw Error(Errc::invalid_config, "glyph axis values must be finite and >= 0 (" + p.label + ")");
      global_max = std::max(global_max, v);
    }
  if (global_max == 0.0) throw Error(Errc::nothing_to_scale, "nothing to scale: every glyph value is zero");

  using detail::line;
  using detail::px;
  using detail::text;
  const auto n = profiles.size();
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const auto rows = (n + cols - 1) / cols;
  const double m = style.margin_px;
  const double panel_w = (style.width_px - 2.0 * m) / static_cast<double>(cols);
  const double panel_h = (style.height_px - 2.0 * m) / static_cast<double>(rows);
  const double radius = 0.35 * std::min(panel_w, panel_h);

  std::string out = detail::svg_open(style);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = profiles[i];
    const double cx = m + panel_w * (static_cast<double>(i % cols) + 0.5);
    const double cy = m + panel_h * (static_cast<double>(i / cols) + 0.5) + 6.0;
    out += "<g class=\"glyph\" data-panel=\"" + panel_letter(i) + "\">\n";
    out += text(cx - panel_w / 2.0 + 8.0, cy - panel_h / 2.0 + 8.0, panel_letter(i), "start", "panel-letter");
    out += text(cx, cy + panel_h / 2.0 - 10.0, p.label, "middle", "panel-label");
    std::string points;
    for (std::size_t a = 0; a < 3; ++a) {
      const double ang = kGlyphAxisDeg[a] * std::numbers::pi / 180.0;
      const double ax = cx + radius * std::cos(ang);
      const double ay = cy - radius * std::sin(ang);
      out += line("glyph-axis", cx, cy, ax, ay, " stroke-dasharray=\"3,2\"");
      out += text(cx + (radius + 12.0) * std::cos(ang), cy - (radius + 12.0) * std::sin(ang) + 4.0,
                  to_string(kGaitParameters[a]), "middle", "axis-label");
      // Quantize the shared-max ratio so uniformly rescaled inputs give
      // identical geometry.
      const double ratio = std::round(p.axis_values[a] / global_max * 1e9) / 1e9;
      if (a) points += ' ';
      points += px(cx + ratio * radius * std::cos(ang)) + "," + px(cy - ratio * radius * std::sin(ang));
    }
    out += "<polygon class=\"profile\" points=\"" + points +
           "\" fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"#08519c\"/>\n";
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gaitse
