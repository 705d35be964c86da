#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gaitse/skeleton.hpp"

// Shared generators and fixtures for the test binaries.
namespace gaitse::fixtures {

/// Random but valid recording: sparse frames, gaps in frame indices, joints
/// dropped at random, labels from a small alphabet.
inline Recording random_recording(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_int_distribution<int> frames(1, 12);
  std::uniform_int_distribution<int> gap(1, 3);
  std::bernoulli_distribution keep(0.8);
  Recording rec;
  rec.nominal_fps = std::vector<double>{30.0, 15.0, 29.97, 9.0}[seed % 4];
  rec.meta.subject_label = "subj" + std::to_string(seed % 7);
  rec.meta.direction = seed % 2 ? Direction::back : Direction::forward;
  rec.meta.condition_label = seed % 3 ? "T1" : "";
  rec.meta.path_length_m = 3.0 + static_cast<double>(seed % 5) * 0.25;
  std::int64_t index = 0;
  const int n = frames(rng);
  for (int f = 0; f < n; ++f) {
    Frame frame(index, index * 33);
    for (auto j : all_joints())
      if (keep(rng)) frame.add({j, coord(rng), coord(rng), coord(rng) + 3.0});
    if (frame.joint_count() == 0) frame.add({JointId::Head, coord(rng), coord(rng), coord(rng)});
    rec.frames.push_back(frame);
    index += gap(rng);
  }
  return rec;
}

/// Structural equality with coordinates compared at `tol`.
inline bool approx_equal(const Recording& a, const Recording& b, double tol) {
  if (a.nominal_fps != b.nominal_fps || !(a.meta == b.meta) || a.frames.size() != b.frames.size()) return false;
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    const auto& fa = a.frames[i];
    const auto& fb = b.frames[i];
    if (fa.index() != fb.index() || fa.timestamp_ms() != fb.timestamp_ms()) return false;
    for (auto j : all_joints()) {
      const auto& sa = fa.find(j);
      const auto& sb = fb.find(j);
      if (sa.has_value() != sb.has_value()) return false;
      if (sa && (std::abs(sa->x - sb->x) > tol || std::abs(sa->y - sb->y) > tol || std::abs(sa->z - sb->z) > tol))
        return false;
    }
  }
  return true;
}

inline std::vector<double> uniform_series(std::uint64_t seed, std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> out(n);
  for (auto& v : out) v = d(rng);
  return out;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("gaitse_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace gaitse::fixtures
