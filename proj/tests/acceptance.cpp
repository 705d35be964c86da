// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gaitse/cli.hpp"
#include "gaitse/gaitse.hpp"
#include "sampen_oracle.hpp"
#include "support.hpp"

using namespace gaitse;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, int precision = 3) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_class(const boost::property_tree::ptree& node, const std::string& tag, const std::string& cls) {
  std::size_t n = 0;
  for (const auto& [name, child] : node) {
    if (name == "<xmlattr>") continue;
    if (name == tag && child.get("<xmlattr>.class", "") == cls) ++n;
    n += count_class(child, tag, cls);
  }
  return n;
}

boost::property_tree::ptree parse_xml(const std::string& doc) {
  std::istringstream in(doc);
  boost::property_tree::ptree tree;
  boost::property_tree::read_xml(in, tree);
  return tree;
}

// -----------------------------------------------------------------------------

Outcome sampen_oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> len(50, 400);
  std::uniform_real_distribution<double> tol_abs(0.5, 2.0);
  std::size_t compared = 0, agreed_errors = 0, mismatches = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t m = 1 + static_cast<std::size_t>(trial % 3);
    const bool relative = (trial / 3) % 2 == 0;
    const auto x = fixtures::uniform_series(5000 + static_cast<std::uint64_t>(trial), len(rng), -5.0, 5.0);
    const double abs_r = tol_abs(rng);
    const double r = relative ? 0.2 * fixtures::oracle_population_sd(x) : abs_r;
    const SampEnConfig cfg{m, relative ? Tolerance::relative_to_sd(0.2) : Tolerance::absolute(abs_r)};
    const auto expected = fixtures::oracle_sampen(x, m, r);
    try {
      const auto got = sample_entropy(x, cfg);
      if (!expected) {
        ++mismatches;
        continue;
      }
      worst = std::max(worst, std::abs(got.value - *expected));
      if (std::abs(got.value - *expected) > 1e-9) ++mismatches;
      ++compared;
    } catch (const Error&) {
      ++(expected ? mismatches : agreed_errors);
    }
  }
  const double secs = seconds_since(t0);
  return {compared >= 100 && mismatches == 0 && secs < 10.0,
          std::to_string(compared) + " series compared, " + std::to_string(agreed_errors) +
              " agreed undefined, max |diff| " + num(worst) + ", " + num(secs) + " s"};
}

Outcome sampen_analytic_anchors() {
  std::vector<std::string> failures;
  for (std::size_t m = 1; m <= 3; ++m) {
    const std::vector<double> flat(60, -2.5);
    if (sample_entropy(flat, {m, Tolerance::absolute(0.1)}).value != 0.0)
      failures.push_back("constant m=" + std::to_string(m));
    std::vector<double> short_series(m + 1, 1.0);
    try {
      sample_entropy(short_series, {m, Tolerance::absolute(0.1)});
      failures.push_back("short m=" + std::to_string(m));
    } catch (const Error& e) {
      if (e.code() != Errc::insufficient_length) failures.push_back("short code m=" + std::to_string(m));
    }
  }
  double worst = 0.0;
  std::size_t shifted = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto x = fixtures::uniform_series(seed, 80 + seed % 200, -3.0, 3.0);
    const double c = std::ldexp(static_cast<double>(seed % 17) - 8.0, -2);  // exact shift
    auto y = x;
    for (auto& v : y) v += c;
    for (const auto& cfg :
         {SampEnConfig{2, Tolerance::relative_to_sd(0.2)}, SampEnConfig{2, Tolerance::absolute(0.4)}}) {
      try {
        const double a = sample_entropy(x, cfg).value;
        const double b = sample_entropy(y, cfg).value;
        worst = std::max(worst, std::abs(a - b));
        ++shifted;
      } catch (const Error&) {
      }
    }
  }
  if (worst >= 1e-12) failures.push_back("translation drift " + num(worst));
  std::string detail = "constant -> 0, N < m+2 rejected for m=1..3, " + std::to_string(shifted) +
                       " translated series max |diff| " + num(worst);
  for (const auto& f : failures) detail += "; failed: " + f;
  return {failures.empty(), detail};
}

Outcome sampen_nonnegativity() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> len(10, 300);
  std::uniform_int_distribution<int> levels(2, 12);
  std::uniform_int_distribution<std::size_t> dim(1, 3);
  std::normal_distribution<double> g;
  std::size_t defined = 0, undefined = 0, violations = 0, attempts = 0;
  while (defined < 1200 && attempts < 5000) {
    ++attempts;
    std::vector<double> x(len(rng));
    if (attempts % 2) {
      std::uniform_int_distribution<int> lv(0, levels(rng));
      for (auto& v : x) v = lv(rng);
    } else {
      double walk = 0.0;
      for (auto& v : x) v = walk += g(rng);
    }
    const SampEnConfig cfg{dim(rng), attempts % 3 ? Tolerance::relative_to_sd(0.25) : Tolerance::absolute(0.5)};
    try {
      const auto r = sample_entropy(x, cfg);
      ++defined;
      if (!(r.value >= 0.0) || r.a_count > r.b_count) ++violations;
    } catch (const Error&) {
      ++undefined;
    }
  }
  return {defined >= 1000 && violations == 0,
          std::to_string(defined) + " defined results, " + std::to_string(undefined) + " rejected inputs, " +
              std::to_string(violations) + " violations"};
}

Outcome tilt_geometry() {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  double worst_translate = 0.0, worst_scale = 0.0, worst_tan = 0.0;
  std::size_t swap_fail = 0, mirror_fail = 0, pairs = 0;
  for (; pairs < 2000; ++pairs) {
    const JointSample l{JointId::HipLeft, coord(rng), coord(rng), 2.0};
    const JointSample r{JointId::HipRight, coord(rng), coord(rng), 2.0};
    const double base = slope_to_degrees(pair_slope(l, r));
    const double dx = coord(rng), dy = coord(rng);
    const JointSample lt{l.joint, l.x + dx, l.y + dy, l.z};
    const JointSample rt{r.joint, r.x + dx, r.y + dy, r.z};
    worst_translate = std::max(worst_translate, std::abs(slope_to_degrees(pair_slope(lt, rt)) - base));
    const double k = scale(rng);
    const JointSample ls{l.joint, l.x * k, l.y * k, l.z};
    const JointSample rs{r.joint, r.x * k, r.y * k, r.z};
    worst_scale = std::max(worst_scale, std::abs(slope_to_degrees(pair_slope(ls, rs)) - base));
    if (!(pair_slope(l, r) == pair_slope(r, l))) ++swap_fail;
    for (auto p : {GaitParameter::V2, GaitParameter::V3}) {
      const JointSample lm{l.joint, -l.x, l.y, l.z};
      const JointSample rm{r.joint, -r.x, r.y, r.z};
      if (slope_to_degrees(parameter_slope(p, lm, rm)) != -slope_to_degrees(parameter_slope(p, l, r))) ++mirror_fail;
    }
  }
  std::uniform_real_distribution<double> theta(-89.0, 89.0);
  for (int i = 0; i < 20000; ++i) {
    const double t = i < 17801 ? -89.0 + 0.01 * (i + 1) : theta(rng);
    if (!(t > -89.0 && t < 89.0)) continue;
    const double back = slope_to_degrees(Slope::of(std::tan(t * std::numbers::pi / 180.0)));
    worst_tan = std::max(worst_tan, std::abs(back - t));
  }
  const bool pass = worst_translate < 1e-12 && worst_scale < 1e-9 && swap_fail == 0 && mirror_fail == 0 &&
                    worst_tan < 1e-9;
  return {pass, std::to_string(pairs) + " pairs: translate " + num(worst_translate) + ", scale " +
                    num(worst_scale) + ", swap failures " + std::to_string(swap_fail) + ", mirror failures " +
                    std::to_string(mirror_fail) + "; tan round trip max " + num(worst_tan)};
}

Outcome five_degree_rule() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimConfig cfg;
    cfg.seed = seed;
    const auto rec = simulate_walk(cfg);
    for (auto p : kGaitParameters) worst = std::max(worst, exceedance(tilt_series(rec, p)).fraction_over);
  }
  return {worst < 0.05, "max exceedance fraction over seeds 1-10 and V1-V3: " + num(worst)};
}

Outcome braced_variability(const fixtures::TempDir& dir) {
  const auto t0 = Clock::now();
  std::vector<std::string> t1_entries, t2_entries;
  for (int seed = 1; seed <= 10; ++seed) {
    const auto s = std::to_string(seed);
    const auto t1 = dir.file("t1_" + s + ".csv");
    const auto t2 = dir.file("t2_" + s + ".csv");
    auto r = cli_run({"simulate", "--seed", s, "--braced-asymmetry", "0.5", "--out", t1, "--out-unbraced", t2});
    if (r.code != 0) return {false, "simulate seed " + s + ": " + r.err};
    for (const char* p : {"V1", "V2", "V3"}) {
      for (const auto& [rec, sink] : {std::pair{t1, &t1_entries}, std::pair{t2, &t2_entries}}) {
        const auto tilt = rec + "." + p + ".tilt.csv";
        r = cli_run({"extract", rec, "--param", p, "--out", tilt});
        if (r.code != 0) return {false, "extract " + std::string(p) + " seed " + s + ": " + r.err};
        r = cli_run({"entropy", tilt});
        if (r.code != 0) return {false, "entropy " + std::string(p) + " seed " + s + ": " + r.err};
        sink->push_back("S1,forward," + std::string(p) + "," + std::string(detail::trim(r.out)));
      }
    }
  }
  auto make_grid = [&](const std::vector<std::string>& entries, const std::string& path) {
    std::vector<std::string> args = {"grid", "--out", path};
    for (const auto& e : entries) {
      args.push_back("--entry");
      args.push_back(e);
    }
    return cli_run(args);
  };
  const auto g1 = dir.file("grid_t1.csv");
  const auto g2 = dir.file("grid_t2.csv");
  if (make_grid(t1_entries, g1).code != 0 || make_grid(t2_entries, g2).code != 0) return {false, "grid failed"};
  const auto report_path = dir.file("report.csv");
  const auto cmp = cli_run({"compare", g2, g1, "--csv", report_path});
  if (cmp.code != 0) return {false, "compare: " + cmp.err};
  const double secs = seconds_since(t0);

  // Read the pipeline's own artifacts back.
  const auto t1_grid = parse_grid_csv(slurp(g1));
  const auto t2_grid = parse_grid_csv(slurp(g2));
  const auto report = detect_change(t2_grid, t1_grid);
  const auto report_csv = slurp(report_path);
  bool pass = secs < 30.0 && report_csv == emit_report_csv(report);
  std::string detail;
  for (const auto& e : report.entries) {
    const auto& c = *e.comparison;
    const bool wider = c.treatment.variance > c.baseline.variance;
    pass = pass && wider && c.changed;
    detail += std::string(to_string(e.key.parameter)) + ": var T1 " + num(c.treatment.variance) + " vs T2 " +
              num(c.baseline.variance) + " (ratio " + num(c.variance_ratio) + ", p " + num(c.rank_sum_p) + ", " +
              (c.changed ? "changed" : "unchanged") + "); ";
  }
  return {pass && report.entries.size() == 3, detail + num(secs) + " s"};
}

Outcome round_trips() {
  std::size_t rec_fail = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto rec = fixtures::random_recording(seed);
    const auto doc = emit_recording(rec);
    const auto back = parse_recording(doc);
    if (!fixtures::approx_equal(rec, back, 1e-6) || emit_recording(back) != doc) ++rec_fail;
  }
  std::size_t grid_fail = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ExperimentGrid grid;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> se(0.0, 3.0);
    for (const char* s : {"S1", "S2", "S10"})
      for (auto d : {Direction::forward, Direction::back})
        for (auto p : kGaitParameters)
          for (int r = 0; r < 10; ++r) grid.add({s, d, p}, se(rng));
    if (!(parse_grid_csv(emit_grid_csv(grid)) == grid)) ++grid_fail;
  }
  std::size_t tilt_fail = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    SimConfig cfg;
    cfg.seed = seed;
    const auto rec = simulate_walk(cfg);
    for (auto p : kGaitParameters) {
      const auto doc = emit_tilt_csv(tilt_series(rec, p));
      const auto once = parse_tilt_csv(doc);
      const auto twice = parse_tilt_csv(emit_tilt_csv(once));
      if (emit_tilt_csv(once) != doc || once.angles() != twice.angles()) ++tilt_fail;
    }
  }
  return {rec_fail == 0 && grid_fail == 0 && tilt_fail == 0,
          "recordings 150 (" + std::to_string(rec_fail) + " failed), grids 100 (" + std::to_string(grid_fail) +
              " failed), tilt series 90 (" + std::to_string(tilt_fail) + " failed)"};
}

Outcome svg_structure() {
  ExperimentGrid grid;
  std::size_t i = 0;
  for (const char* s : {"S1", "S2"})
    for (auto d : {Direction::forward, Direction::back})
      for (auto p : kGaitParameters)
        for (double v : fixtures::uniform_series(i++, 10, 0.3, 1.5)) grid.add({s, d, p}, v);
  try {
    const auto box = parse_xml(boxplot_svg(grid));
    const auto boxes = count_class(box, "g", "box");
    const auto medians = count_class(box, "line", "median");
    const bool view = !box.get<std::string>("svg.<xmlattr>.viewBox", "").empty();

    const auto profiles = glyph_profiles(grid);
    const auto star_doc = starglyph_svg(profiles);
    const auto star = parse_xml(star_doc);
    const auto panels = count_class(star, "g", "glyph");
    auto scaled = profiles;
    for (auto& p : scaled)
      for (auto& v : p.axis_values) v *= 10.0;
    const bool scale_free = starglyph_svg(scaled) == star_doc;
    return {boxes == 12 && medians == 12 && view && profiles.size() == 4 && panels == 4 && scale_free,
            std::to_string(boxes) + " boxes, " + std::to_string(medians) + " medians, " + std::to_string(panels) +
                " glyph panels, x10 scaling " + (scale_free ? "byte-identical" : "differs")};
  } catch (const std::exception& e) {
    return {false, std::string("malformed SVG: ") + e.what()};
  }
}

Outcome cli_determinism(const fixtures::TempDir& dir) {
  std::vector<std::string> differing;
  auto twice = [&](const std::string& name, const std::function<std::vector<std::string>(const std::string&)>& args) {
    const auto a = dir.file("det_a_" + name);
    const auto b = dir.file("det_b_" + name);
    const auto ra = cli_run(args(a));
    const auto rb = cli_run(args(b));
    if (ra.code != 0 || rb.code != 0 || ra.out != rb.out || slurp(a) != slurp(b)) differing.push_back(name);
    return a;
  };
  const auto rec = twice("rec.csv", [](const std::string& o) {
    return std::vector<std::string>{"simulate",    "--seed",      "11",   "--asymmetry", "0.3",
                                    "--direction", "back", "--out", o};
  });
  twice("pair.csv", [&](const std::string& o) {
    return std::vector<std::string>{"simulate", "--seed", "12", "--braced-asymmetry", "0.5", "--out", o,
                                    "--out-unbraced", o + ".t2"};
  });
  const auto tilt = twice("tilt.csv", [&](const std::string& o) {
    return std::vector<std::string>{"extract", rec, "--param", "V3", "--out", o};
  });
  twice("entropy.txt", [&](const std::string&) { return std::vector<std::string>{"entropy", tilt, "--details"}; });
  std::vector<std::string> entries;
  for (int k = 0; k < 6; ++k) entries.push_back("S" + std::to_string(k % 2 + 1) + ",forward,V" +
                                                std::to_string(k % 3 + 1) + "," + std::to_string(0.5 + 0.1 * k));
  auto grid_args = [&](const std::string& o) {
    std::vector<std::string> a = {"grid", "--out", o};
    for (const auto& e : entries) a.insert(a.end(), {"--entry", e, "--entry", e + "1"});
    return a;
  };
  const auto grid = twice("grid.csv", grid_args);
  twice("report.csv", [&](const std::string& o) {
    return std::vector<std::string>{"compare", grid, grid, "--csv", o};
  });
  twice("box.svg", [&](const std::string& o) { return std::vector<std::string>{"plot", "box", grid, "--out", o}; });
  twice("star.svg", [&](const std::string& o) { return std::vector<std::string>{"plot", "star", grid, "--out", o}; });
  std::string detail = "8 invocations run twice";
  for (const auto& d : differing) detail += "; differs: " + d;
  return {differing.empty(), detail};
}

}  // namespace

int main() {
  fixtures::TempDir dir("acceptance");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"sampen oracle equivalence", sampen_oracle_equivalence},
      {"sampen analytic anchors", sampen_analytic_anchors},
      {"sampen nonnegativity and a<=b", sampen_nonnegativity},
      {"tilt geometry invariants", tilt_geometry},
      {"five-degree rule on healthy gait", five_degree_rule},
      {"braced pass shows larger SE variability", [&] { return braced_variability(dir); }},
      {"round-trip I/O", round_trips},
      {"visualization structure", svg_structure},
      {"CLI determinism", [&] { return cli_determinism(dir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
