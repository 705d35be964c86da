#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "gaitse/error.hpp"
#include "gaitse/skeleton.hpp"

// Seeded synthetic walking passes. The generator places joints on a fixed body
// template and rotates the hip and shoulder segments (and leans the spine) so
// the derived V1/V2/V3 tilt series are noisy sinusoids at the stride
// frequency. A nonzero asymmetry emulates a braced right knee.
namespace gaitse {

/// std::mt19937_64 plus explicit uniform/normal transforms. The engine's output
/// sequence is fixed by the C++ standard; the std distributions are not, so
/// they are avoided.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal by Box-Muller; the second variate of each pair is kept
  /// for the next call.
  double gaussian() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(theta);
    return radius * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct SimConfig {
  double path_length_m = 3.0;
  double fps = 30.0;
  double walk_speed_mps = 1.2;
  double stride_freq_hz = 0.9;
  double base_tilt_amp_deg = 2.0;
  double noise_sd_deg = 0.5;
  double asymmetry = 0.0;
  std::uint64_t seed = 1;

  std::string subject_label = "S1";
  Direction direction = Direction::forward;
  std::string condition_label;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::invalid_config, std::string(name) + " must be > 0");
    };
    auto nonnegative = [](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::invalid_config, std::string(name) + " must be >= 0");
    };
    positive(path_length_m, "path_length_m");
    positive(fps, "fps");
    positive(walk_speed_mps, "walk_speed_mps");
    positive(stride_freq_hz, "stride_freq_hz");
    nonnegative(base_tilt_amp_deg, "base_tilt_amp_deg");
    nonnegative(noise_sd_deg, "noise_sd_deg");
    if (!(asymmetry >= 0.0 && asymmetry <= 1.0)) throw Error(Errc::invalid_config, "asymmetry must lie in [0, 1]");
    if (frame_count() < 1) throw Error(Errc::invalid_config, "configuration yields no frames");
  }

  long frame_count() const { return std::lround(path_length_m / walk_speed_mps * fps); }
};

// Body template, meters.
inline constexpr double kHipWidth = 0.35;
inline constexpr double kShoulderWidth = 0.40;
inline constexpr double kSpineLength = 0.55;

/// Constant tilt added to V2/V3 per unit of asymmetry, degrees.
inline constexpr double kAsymmetryBiasDeg = 4.0;

namespace detail {

inline double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Point `length/2` from `center` along the segment direction at `deg` above
// horizontal, toward +x (right) or -x (left).
inline JointSample segment_end(JointId id, const JointSample& center, double deg, double half, double sign) {
  const double a = to_rad(deg);
  return {id, center.x + sign * half * std::cos(a), center.y + sign * half * std::sin(a), center.z};
}

inline JointSample offset(JointId id, const JointSample& from, double dx, double dy, double dz) {
  return {id, from.x + dx, from.y + dy, from.z + dz};
}

}  // namespace detail

/// Generates one pass drawing from an existing stream (used to chain passes).
inline Recording simulate_walk(const SimConfig& config, SimRng& rng) {
  config.validate();
  using detail::offset;
  using detail::segment_end;

  Recording rec;
  rec.nominal_fps = config.fps;
  rec.meta = {config.subject_label, config.direction, config.condition_label, config.path_length_m};

  const double omega = 2.0 * std::numbers::pi * config.stride_freq_hz;
  const double phase = 2.0 * std::numbers::pi * rng.uniform();
  const double a = config.asymmetry;
  const double amp = config.base_tilt_amp_deg;
  const bool toward_camera = config.direction == Direction::forward;
  const double z_start = toward_camera ? 1.5 + config.path_length_m : 1.5;
  const double z_step = toward_camera ? -config.walk_speed_mps : config.walk_speed_mps;
  const double foot_dz = toward_camera ? -0.10 : 0.10;

  // Positive half-cycle raises the right side; the brace amplifies it.
  auto lateral_tilt = [&](double s) { return amp * s * (s > 0.0 ? 1.0 + a : 1.0) + a * kAsymmetryBiasDeg; };

  const long frames = config.frame_count();
  rec.frames.reserve(static_cast<std::size_t>(frames));
  for (long i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / config.fps;
    const double cycle = omega * t + phase;

    const double v1 = amp * std::sin(cycle + std::numbers::pi / 2.0) + config.noise_sd_deg * (1.0 + a) * rng.gaussian();
    const double v2 = lateral_tilt(std::sin(cycle)) + config.noise_sd_deg * rng.gaussian();
    const double v3 = lateral_tilt(std::sin(cycle + std::numbers::pi)) + config.noise_sd_deg * rng.gaussian();

    Frame f(i, std::llround(static_cast<double>(i) * 1000.0 / config.fps));
    const double z = z_start + z_step * t;
    const double sway = 0.02 * std::sin(cycle);
    const double bob = 0.02 * std::sin(2.0 * cycle);
    const double swing = 0.15 * std::sin(cycle);

    const JointSample base{JointId::SpineBase, sway, 0.95 + bob, z};
    const double lean = detail::to_rad(v1);
    const JointSample top{JointId::SpineShoulder, base.x + kSpineLength * std::sin(lean),
                          base.y + kSpineLength * std::cos(lean), z};
    const double ux = (top.x - base.x) / kSpineLength;
    const double uy = (top.y - base.y) / kSpineLength;
    f.add(base);
    f.add(top);
    f.add({JointId::SpineMid, base.x + 0.5 * (top.x - base.x), base.y + 0.5 * (top.y - base.y), z});
    f.add({JointId::Neck, top.x + 0.10 * ux, top.y + 0.10 * uy, z});
    f.add({JointId::Head, top.x + 0.25 * ux, top.y + 0.25 * uy, z});

    const JointSample hip_center = offset(JointId::SpineBase, base, 0.0, -0.05, 0.0);
    const auto hip_l = segment_end(JointId::HipLeft, hip_center, v2, kHipWidth / 2.0, -1.0);
    const auto hip_r = segment_end(JointId::HipRight, hip_center, v2, kHipWidth / 2.0, +1.0);
    const auto sh_l = segment_end(JointId::ShoulderLeft, top, v3, kShoulderWidth / 2.0, -1.0);
    const auto sh_r = segment_end(JointId::ShoulderRight, top, v3, kShoulderWidth / 2.0, +1.0);
    f.add(hip_l);
    f.add(hip_r);
    f.add(sh_l);
    f.add(sh_r);

    // Arms swing opposite to the legs on the same side.
    const auto elbow_l = offset(JointId::ElbowLeft, sh_l, -0.02, -0.28, swing * 0.5);
    const auto elbow_r = offset(JointId::ElbowRight, sh_r, 0.02, -0.28, -swing * 0.5);
    const auto wrist_l = offset(JointId::WristLeft, elbow_l, 0.0, -0.25, swing * 0.4);
    const auto wrist_r = offset(JointId::WristRight, elbow_r, 0.0, -0.25, -swing * 0.4);
    const auto hand_l = offset(JointId::HandLeft, wrist_l, 0.0, -0.08, 0.0);
    const auto hand_r = offset(JointId::HandRight, wrist_r, 0.0, -0.08, 0.0);
    f.add(elbow_l);
    f.add(elbow_r);
    f.add(wrist_l);
    f.add(wrist_r);
    f.add(hand_l);
    f.add(hand_r);
    f.add(offset(JointId::HandTipLeft, hand_l, 0.0, -0.07, 0.0));
    f.add(offset(JointId::HandTipRight, hand_r, 0.0, -0.07, 0.0));
    f.add(offset(JointId::ThumbLeft, hand_l, 0.03, -0.03, 0.0));
    f.add(offset(JointId::ThumbRight, hand_r, -0.03, -0.03, 0.0));

    const auto knee_l = offset(JointId::KneeLeft, hip_l, 0.0, -0.45, -swing);
    const auto knee_r = offset(JointId::KneeRight, hip_r, 0.0, -0.45, swing);
    const auto ankle_l = offset(JointId::AnkleLeft, knee_l, 0.0, -0.42, -swing * 0.5);
    const auto ankle_r = offset(JointId::AnkleRight, knee_r, 0.0, -0.42, swing * 0.5);
    f.add(knee_l);
    f.add(knee_r);
    f.add(ankle_l);
    f.add(ankle_r);
    f.add(offset(JointId::FootLeft, ankle_l, 0.0, -0.05, foot_dz));
    f.add(offset(JointId::FootRight, ankle_r, 0.0, -0.05, foot_dz));

    rec.frames.push_back(std::move(f));
  }
  return rec;
}

inline Recording simulate_walk(const SimConfig& config) {
  config.validate();
  SimRng rng(config.seed);
  return simulate_walk(config, rng);
}

/// Braced (T1) then unbraced (T2) pass drawn from one stream seeded by
/// `config.seed`.
inline std::pair<Recording, Recording> healthy_and_braced_pair(const SimConfig& config, double braced_asymmetry) {
  if (!(braced_asymmetry > 0.0 && braced_asymmetry <= 1.0))
    throw Error(Errc::invalid_config, "braced asymmetry must lie in (0, 1]");
  SimConfig braced = config;
  braced.asymmetry = braced_asymmetry;
  braced.condition_label = "T1";
  SimConfig plain = config;
  plain.asymmetry = 0.0;
  plain.condition_label = "T2";
  braced.validate();
  plain.validate();
  SimRng rng(config.seed);
  auto t1 = simulate_walk(braced, rng);
  auto t2 = simulate_walk(plain, rng);
  return {std::move(t1), std::move(t2)};
}

}  // namespace gaitse
