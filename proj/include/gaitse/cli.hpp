#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaitse/detail/text.hpp"
#include "gaitse/error.hpp"
#include "gaitse/experiment.hpp"
#include "gaitse/sample_entropy.hpp"
#include "gaitse/skeleton.hpp"
#include "gaitse/svg.hpp"
#include "gaitse/synthesis.hpp"
#include "gaitse/tilt.hpp"

// Command-line front end. Every stage reads and writes the library's file
// formats, so a pipeline is a sequence of invocations:
//
//   simulate -> extract -> entropy -> grid -> compare / plot
//
// Exit codes: 0 success, 1 usage error, 2 data or I/O error.
namespace gaitse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace detail {

/// Bad flag combination detected after CLI11 parsing succeeded.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
  out << content;
  if (!out.flush()) throw Error(Errc::io, "failed writing '" + path + "'");
}

/// Writes to `path`, or to `out` when the path is empty or "-".
inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-")
    out << content;
  else
    write_file(path, content);
}

// Parses a simulate config file of `key = value` lines. Keys are SimConfig
// field names; dashes and underscores are interchangeable.
inline void apply_sim_config_file(const std::string& path, SimConfig& cfg, bool& have_seed) {
  const auto doc = read_file(path);
  const auto lines = gaitse::detail::split_lines(doc);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = gaitse::detail::trim(lines[i]);
    if (line.empty() || line.front() == '#' || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(i + 1, "expected key=value in '" + path + "'");
    std::string key(gaitse::detail::trim(line.substr(0, eq)));
    std::replace(key.begin(), key.end(), '-', '_');
    auto value = gaitse::detail::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    auto num = [&](const char* what) { return gaitse::detail::require_double(value, i + 1, what); };
    if (key == "seed") {
      const auto s = gaitse::detail::require_int(value, i + 1, "seed");
      cfg.seed = static_cast<std::uint64_t>(s);
      have_seed = true;
    } else if (key == "path_length_m") {
      cfg.path_length_m = num("path_length_m");
    } else if (key == "fps") {
      cfg.fps = num("fps");
    } else if (key == "walk_speed_mps") {
      cfg.walk_speed_mps = num("walk_speed_mps");
    } else if (key == "stride_freq_hz") {
      cfg.stride_freq_hz = num("stride_freq_hz");
    } else if (key == "base_tilt_amp_deg") {
      cfg.base_tilt_amp_deg = num("base_tilt_amp_deg");
    } else if (key == "noise_sd_deg") {
      cfg.noise_sd_deg = num("noise_sd_deg");
    } else if (key == "asymmetry") {
      cfg.asymmetry = num("asymmetry");
    } else if (key == "subject") {
      cfg.subject_label = std::string(value);
    } else if (key == "direction") {
      auto d = direction_from_string(value);
      if (!d) throw ParseError(i + 1, "direction must be forward or back");
      cfg.direction = *d;
    } else if (key == "condition") {
      cfg.condition_label = std::string(value);
    } else {
      throw ParseError(i + 1, "unknown config key '" + key + "' in '" + path + "'");
    }
  }
}

// One `subject,direction,parameter,se_value` record.
inline std::pair<GridKey, double> parse_entry(std::string_view text, std::size_t lineno) {
  const auto f = gaitse::detail::split_fields(text);
  if (f.size() != 4) throw ParseError(lineno, "expected subject,direction,parameter,se_value");
  const auto dir = direction_from_string(f[1]);
  if (!dir) throw ParseError(lineno, "direction must be forward or back, got '" + std::string(f[1]) + "'");
  const auto param = parameter_from_string(f[2]);
  if (!param) throw ParseError(lineno, "unknown parameter '" + std::string(f[2]) + "'");
  if (f[0].empty()) throw ParseError(lineno, "empty subject label");
  return {GridKey{std::string(f[0]), *dir, *param}, gaitse::detail::require_double(f[3], lineno, "se_value")};
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Gait tilt parameters, sample entropy and change detection for skeleton recordings", "gaitse"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // simulate ------------------------------------------------------------------
  SimConfig sim;
  std::uint64_t seed = 0;
  std::string sim_out;
  std::string sim_out_unbraced;
  std::string sim_config_path;
  std::string sim_direction = "forward";
  double braced_asymmetry = 0.0;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic walking pass as a recording CSV");
  auto* seed_opt = simulate->add_option("--seed", seed, "Generator seed");
  simulate->add_option("--config", sim_config_path, "key=value file of SimConfig fields (flags override it)");
  auto* o_path = simulate->add_option("--path-length-m", sim.path_length_m, "Walking path length in meters");
  auto* o_fps = simulate->add_option("--fps", sim.fps, "Frames per second");
  auto* o_speed = simulate->add_option("--walk-speed-mps", sim.walk_speed_mps, "Walking speed, m/s");
  auto* o_stride = simulate->add_option("--stride-freq-hz", sim.stride_freq_hz, "Gait-cycle frequency, Hz");
  auto* o_amp = simulate->add_option("--base-tilt-amp-deg", sim.base_tilt_amp_deg, "Tilt oscillation amplitude");
  auto* o_noise = simulate->add_option("--noise-sd-deg", sim.noise_sd_deg, "Additive angle noise SD");
  auto* o_asym = simulate->add_option("--asymmetry", sim.asymmetry, "Brace-like asymmetry in [0, 1]");
  auto* o_subject = simulate->add_option("--subject", sim.subject_label, "Subject label");
  auto* o_dir = simulate->add_option("--direction", sim_direction, "forward or back")
                    ->check(CLI::IsMember({"forward", "back"}));
  auto* o_cond = simulate->add_option("--condition", sim.condition_label, "Condition label");
  simulate->add_option("--braced-asymmetry", braced_asymmetry,
                       "Write a braced (T1) / unbraced (T2) pair; --out receives T1");
  simulate->add_option("--out-unbraced", sim_out_unbraced, "T2 output path for --braced-asymmetry");
  simulate->add_option("--out", sim_out, "Output recording CSV")->required();

  // extract -------------------------------------------------------------------
  std::string ex_in;
  std::string ex_param;
  std::string ex_out;
  std::string ex_spine = "vertical";
  TiltConfig tilt_cfg;
  auto* extract = app.add_subcommand("extract", "Convert a recording CSV into a tilt-angle CSV");
  extract->add_option("recording", ex_in, "Recording CSV")->required();
  extract->add_option("--param", ex_param, "V1 (spine), V2 (hip) or V3 (shoulder)")
      ->required()
      ->check(CLI::IsMember({"V1", "V2", "V3"}));
  extract->add_option("--max-dropout", tilt_cfg.max_dropout_fraction, "Largest tolerated fraction of dropped frames")
      ->check(CLI::Range(0.0, 1.0));
  extract->add_option("--spine-reference", ex_spine, "Measure V1 from vertical or horizontal")
      ->check(CLI::IsMember({"vertical", "horizontal"}));
  extract->add_option("--out", ex_out, "Output tilt CSV (default stdout)");

  // entropy -------------------------------------------------------------------
  std::string en_in;
  std::size_t sampen_m = 2;
  double sampen_r = 0.2;
  std::string sampen_mode = "sd";
  bool en_details = false;
  auto* entropy = app.add_subcommand("entropy", "Print the sample entropy of a tilt CSV");
  entropy->add_option("tilt", en_in, "Tilt CSV")->required();
  entropy->add_option("--sampen-m", sampen_m, "Embedding dimension")->check(CLI::PositiveNumber);
  entropy->add_option("--sampen-r", sampen_r, "Tolerance (degrees, or factor of SD)")->check(CLI::PositiveNumber);
  entropy->add_option("--sampen-r-mode", sampen_mode, "abs or sd")->check(CLI::IsMember({"abs", "sd"}));
  entropy->add_flag("--details", en_details, "Also print A, B, N and the resolved tolerance");

  // grid ----------------------------------------------------------------------
  std::vector<std::string> grid_entries;
  std::vector<std::string> grid_files;
  std::string grid_out;
  auto* grid_cmd = app.add_subcommand("grid", "Collect labeled SE values into a grid CSV");
  grid_cmd->add_option("--entry", grid_entries, "subject,direction,parameter,se_value (repeatable)");
  grid_cmd->add_option("--entries", grid_files, "File of subject,direction,parameter,se_value lines");
  grid_cmd->add_option("--out", grid_out, "Output grid CSV (default stdout)");

  // compare -------------------------------------------------------------------
  std::string cmp_base;
  std::string cmp_treat;
  std::string cmp_csv;
  std::string cmp_out;
  ChangeThresholds thresholds;
  auto* compare = app.add_subcommand("compare", "Compare a baseline grid with a treatment grid");
  compare->add_option("baseline", cmp_base, "Baseline grid CSV")->required();
  compare->add_option("treatment", cmp_treat, "Treatment grid CSV")->required();
  compare->add_option("--alpha", thresholds.alpha, "Rank-sum significance level")->check(CLI::Range(0.0, 1.0));
  compare->add_option("--min-var-ratio", thresholds.min_variance_ratio, "Variance-ratio trigger")
      ->check(CLI::PositiveNumber);
  compare->add_option("--csv", cmp_csv, "Also write key,var_ratio,p_value,changed,rationale CSV");
  compare->add_option("--out", cmp_out, "Write the text table here instead of stdout");

  // plot ----------------------------------------------------------------------
  PlotStyle style;
  bool no_mean = false;
  std::vector<std::string> box_grids;
  std::vector<std::string> box_labels;
  std::string box_out;
  std::string star_grid;
  std::string star_out;
  auto* plot = app.add_subcommand("plot", "Render SVG figures from grid CSVs");
  plot->require_subcommand(1);
  auto add_style = [&](CLI::App* sub) {
    sub->add_option("--width", style.width_px, "Width in px")->check(CLI::Range(100, 20000));
    sub->add_option("--height", style.height_px, "Height in px")->check(CLI::Range(100, 20000));
    sub->add_option("--margin", style.margin_px, "Margin in px")->check(CLI::NonNegativeNumber);
    sub->add_option("--font", style.font_family_name, "Font family");
  };
  auto* box = plot->add_subcommand("box", "Box plots of every grid cell");
  box->add_option("grids", box_grids, "Grid CSVs")->required();
  box->add_option("--labels", box_labels, "Condition label per grid (prefixes subjects)")->delimiter(',');
  box->add_flag("--no-mean", no_mean, "Omit the mean marker");
  box->add_option("--out", box_out, "Output SVG (default stdout)");
  add_style(box);
  auto* star = plot->add_subcommand("star", "Star glyphs of mean SE per subject and direction");
  star->add_option("grid", star_grid, "Grid CSV")->required();
  star->add_option("--out", star_out, "Output SVG (default stdout)");
  add_style(star);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      bool have_seed = false;
      SimConfig cfg;
      if (!sim_config_path.empty()) detail::apply_sim_config_file(sim_config_path, cfg, have_seed);
      if (seed_opt->count() > 0) {
        cfg.seed = seed;
        have_seed = true;
      }
      if (!have_seed) throw detail::UsageError("simulate requires --seed (or seed= in --config)");
      if (o_path->count()) cfg.path_length_m = sim.path_length_m;
      if (o_fps->count()) cfg.fps = sim.fps;
      if (o_speed->count()) cfg.walk_speed_mps = sim.walk_speed_mps;
      if (o_stride->count()) cfg.stride_freq_hz = sim.stride_freq_hz;
      if (o_amp->count()) cfg.base_tilt_amp_deg = sim.base_tilt_amp_deg;
      if (o_noise->count()) cfg.noise_sd_deg = sim.noise_sd_deg;
      if (o_asym->count()) cfg.asymmetry = sim.asymmetry;
      if (o_subject->count()) cfg.subject_label = sim.subject_label;
      if (o_dir->count()) cfg.direction = *direction_from_string(sim_direction);
      if (o_cond->count()) cfg.condition_label = sim.condition_label;

      if (simulate->count("--braced-asymmetry")) {
        if (sim_out_unbraced.empty()) throw detail::UsageError("--braced-asymmetry needs --out-unbraced");
        auto [t1, t2] = healthy_and_braced_pair(cfg, braced_asymmetry);
        detail::write_file(sim_out, emit_recording(t1));
        detail::write_file(sim_out_unbraced, emit_recording(t2));
      } else {
        if (!sim_out_unbraced.empty()) throw detail::UsageError("--out-unbraced needs --braced-asymmetry");
        detail::write_file(sim_out, emit_recording(simulate_walk(cfg)));
      }
    } else if (extract->parsed()) {
      tilt_cfg.spine = ex_spine == "horizontal" ? SpineReference::horizontal : SpineReference::vertical;
      const auto rec = parse_recording(detail::read_file(ex_in));
      const auto series = tilt_series(rec, *parameter_from_string(ex_param), tilt_cfg);
      detail::emit(ex_out, emit_tilt_csv(series), out);
    } else if (entropy->parsed()) {
      SampEnConfig cfg;
      cfg.embedding_dim = sampen_m;
      cfg.tolerance = sampen_mode == "abs" ? Tolerance::absolute(sampen_r) : Tolerance::relative_to_sd(sampen_r);
      const auto series = parse_tilt_csv(detail::read_file(en_in));
      const auto angles = series.angles();
      const auto res = sample_entropy(angles, cfg);
      if (en_details)
        out << "value=" << gaitse::detail::shortest(res.value) << " a_count=" << res.a_count
            << " b_count=" << res.b_count << " n=" << res.n
            << " tolerance=" << gaitse::detail::shortest(res.resolved_tolerance) << "\n";
      else
        out << gaitse::detail::shortest(res.value) << "\n";
    } else if (grid_cmd->parsed()) {
      if (grid_entries.empty() && grid_files.empty()) throw detail::UsageError("grid needs --entry or --entries");
      std::vector<std::pair<GridKey, double>> runs;
      for (const auto& path : grid_files) {
        const auto doc = detail::read_file(path);
        const auto lines = gaitse::detail::split_lines(doc);
        for (std::size_t i = 0; i < lines.size(); ++i) {
          const auto line = gaitse::detail::trim(lines[i]);
          if (line.empty() || line.front() == '#' || line.rfind("subject,", 0) == 0) continue;
          try {
            runs.push_back(detail::parse_entry(line, i + 1));
          } catch (const ParseError& e) {
            throw ParseError(e.line(), std::string(e.what()) + " in '" + path + "'");
          }
        }
      }
      for (const auto& e : grid_entries) runs.push_back(detail::parse_entry(e, 0));
      detail::emit(grid_out, emit_grid_csv(build_grid(runs)), out);
    } else if (compare->parsed()) {
      const auto base = parse_grid_csv(detail::read_file(cmp_base));
      const auto treat = parse_grid_csv(detail::read_file(cmp_treat));
      const auto report = detect_change(base, treat, thresholds);
      if (!cmp_csv.empty()) detail::write_file(cmp_csv, emit_report_csv(report));
      detail::emit(cmp_out, format_report_table(report), out);
    } else if (box->parsed()) {
      if (!box_labels.empty() && box_labels.size() != box_grids.size())
        throw detail::UsageError("--labels needs one label per grid");
      style.show_mean_marker = !no_mean;
      ExperimentGrid merged;
      for (std::size_t g = 0; g < box_grids.size(); ++g) {
        const auto grid = parse_grid_csv(detail::read_file(box_grids[g]));
        for (const auto& [key, values] : grid.cells()) {
          GridKey k = key;
          if (!box_labels.empty()) k.subject = box_labels[g] + " " + k.subject;
          for (double v : values) merged.add(k, v);
        }
      }
      detail::emit(box_out, boxplot_svg(merged, style), out);
    } else if (star->parsed()) {
      const auto grid = parse_grid_csv(detail::read_file(star_grid));
      detail::emit(star_out, starglyph_svg(glyph_profiles(grid), style), out);
    }
  } catch (const detail::UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace gaitse::cli
