#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaitse/detail/text.hpp"
#include "gaitse/error.hpp"

namespace gaitse {

// =============================================================================
// Joints
// =============================================================================

/// The 25-joint Kinect v2 skeleton. Declaration order is the canonical order
/// used when emitting a frame.
enum class JointId : std::uint8_t {
  SpineBase,
  SpineMid,
  SpineShoulder,
  Neck,
  Head,
  ShoulderLeft,
  ElbowLeft,
  WristLeft,
  HandLeft,
  ShoulderRight,
  ElbowRight,
  WristRight,
  HandRight,
  HipLeft,
  KneeLeft,
  AnkleLeft,
  FootLeft,
  HipRight,
  KneeRight,
  AnkleRight,
  FootRight,
  HandTipLeft,
  ThumbLeft,
  HandTipRight,
  ThumbRight,
};

inline constexpr std::size_t kJointCount = 25;

// Joints that carry the three tilt parameters.
namespace joints {
inline constexpr JointId ShS = JointId::SpineShoulder;
inline constexpr JointId BS = JointId::SpineBase;
inline constexpr JointId LH = JointId::HipLeft;
inline constexpr JointId RH = JointId::HipRight;
inline constexpr JointId LSh = JointId::ShoulderLeft;
inline constexpr JointId RSh = JointId::ShoulderRight;
}  // namespace joints

inline constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "SpineBase",  "SpineMid",   "SpineShoulder", "Neck",         "Head",      "ShoulderLeft", "ElbowLeft",
    "WristLeft",  "HandLeft",   "ShoulderRight", "ElbowRight",   "WristRight", "HandRight",   "HipLeft",
    "KneeLeft",   "AnkleLeft",  "FootLeft",      "HipRight",     "KneeRight", "AnkleRight",   "FootRight",
    "HandTipLeft", "ThumbLeft", "HandTipRight",  "ThumbRight",
};

constexpr std::size_t index_of(JointId j) noexcept { return static_cast<std::size_t>(j); }

constexpr std::string_view to_string(JointId j) noexcept { return kJointNames[index_of(j)]; }

constexpr std::array<JointId, kJointCount> all_joints() noexcept {
  std::array<JointId, kJointCount> out{};
  for (std::size_t i = 0; i < kJointCount; ++i) out[i] = static_cast<JointId>(i);
  return out;
}

inline std::optional<JointId> joint_from_string(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kJointCount; ++i)
    if (kJointNames[i] == name) return static_cast<JointId>(i);
  return std::nullopt;
}

// =============================================================================
// Samples, frames, recordings
// =============================================================================

/// Skeleton-space position in meters: x lateral, y up, z depth.
struct JointSample {
  JointId joint{};
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  friend bool operator==(const JointSample&, const JointSample&) = default;
};

/// One captured frame; joints the tracker dropped are simply absent.
class Frame {
 public:
  Frame() = default;
  Frame(std::int64_t index, std::int64_t timestamp_ms) : index_(index), timestamp_ms_(timestamp_ms) {}

  std::int64_t index() const noexcept { return index_; }
  std::int64_t timestamp_ms() const noexcept { return timestamp_ms_; }

  const std::optional<JointSample>& find(JointId j) const noexcept { return joints_[index_of(j)]; }
  bool has(JointId j) const noexcept { return joints_[index_of(j)].has_value(); }

  /// Adds a sample; a second sample for the same joint or a non-finite
  /// coordinate is rejected.
  void add(const JointSample& s) {
    if (!s.finite())
      throw Error(Errc::invalid_recording, "non-finite coordinate for joint " + std::string(to_string(s.joint)));
    auto& slot = joints_[index_of(s.joint)];
    if (slot)
      throw Error(Errc::invalid_recording, "duplicate joint " + std::string(to_string(s.joint)) + " in frame " +
                                               std::to_string(index_));
    slot = s;
  }

  /// Replaces or inserts a sample.
  void set(const JointSample& s) { joints_[index_of(s.joint)] = s; }
  void erase(JointId j) noexcept { joints_[index_of(j)].reset(); }

  std::size_t joint_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : joints_) n += s.has_value();
    return n;
  }

  /// Present samples in canonical joint order.
  std::vector<JointSample> samples() const {
    std::vector<JointSample> out;
    for (const auto& s : joints_)
      if (s) out.push_back(*s);
    return out;
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::int64_t index_ = 0;
  std::int64_t timestamp_ms_ = 0;
  std::array<std::optional<JointSample>, kJointCount> joints_{};
};

enum class Direction : std::uint8_t { forward, back };

constexpr std::string_view to_string(Direction d) noexcept { return d == Direction::forward ? "forward" : "back"; }

inline std::optional<Direction> direction_from_string(std::string_view s) noexcept {
  if (s == "forward") return Direction::forward;
  if (s == "back") return Direction::back;
  return std::nullopt;
}

struct RecordingMeta {
  std::string subject_label;
  Direction direction = Direction::forward;
  std::string condition_label;
  double path_length_m = 3.0;

  friend bool operator==(const RecordingMeta&, const RecordingMeta&) = default;
};

struct Recording {
  std::vector<Frame> frames;
  double nominal_fps = 30.0;
  RecordingMeta meta;

  /// Throws Errc::invalid_recording on the first broken invariant.
  void validate() const {
    if (!(nominal_fps > 0.0) || !std::isfinite(nominal_fps))
      throw Error(Errc::invalid_recording, "nominal_fps must be positive");
    if (frames.empty()) throw Error(Errc::invalid_recording, "recording has no frames");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (frames[i].index() < 0 || frames[i].timestamp_ms() < 0)
        throw Error(Errc::invalid_recording, "negative frame index or timestamp");
      if (i > 0 && frames[i].index() <= frames[i - 1].index())
        throw Error(Errc::invalid_recording, "frame indices not strictly increasing");
    }
    for (const auto* label : {&meta.subject_label, &meta.condition_label})
      if (label->find_first_of("\r\n") != std::string::npos)
        throw Error(Errc::invalid_recording, "metadata labels must be single-line");
  }

  friend bool operator==(const Recording&, const Recording&) = default;
};

// =============================================================================
// CSV encoding
// =============================================================================

inline constexpr std::string_view kRecordingColumns = "frame,timestamp_ms,joint,x,y,z";

/// Canonical encoding: metadata comments, column header, then one row per
/// sample sorted by (frame, joint order) with 6-decimal coordinates.
inline std::string emit_recording(const Recording& rec) {
  rec.validate();
  std::string out;
  out += "# fps=" + detail::shortest(rec.nominal_fps) + "\n";
  out += "# subject=" + rec.meta.subject_label + "\n";
  out += "# direction=" + std::string(to_string(rec.meta.direction)) + "\n";
  out += "# condition=" + rec.meta.condition_label + "\n";
  out += "# path_length_m=" + detail::shortest(rec.meta.path_length_m) + "\n";
  out += kRecordingColumns;
  out += '\n';
  for (const auto& f : rec.frames) {
    const auto prefix = std::to_string(f.index()) + "," + std::to_string(f.timestamp_ms()) + ",";
    for (const auto& s : f.samples()) {
      out += prefix;
      out += to_string(s.joint);
      out += ',' + detail::fixed(s.x) + ',' + detail::fixed(s.y) + ',' + detail::fixed(s.z) + '\n';
    }
  }
  return out;
}

inline Recording parse_recording(std::string_view doc) {
  Recording rec;
  std::map<std::int64_t, Frame> frames;
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
      if (key == "fps") {
        rec.nominal_fps = detail::require_double(value, lineno, "fps");
        if (!(rec.nominal_fps > 0.0)) throw ParseError(lineno, "fps must be positive");
      } else if (key == "subject") {
        rec.meta.subject_label = std::string(value);
      } else if (key == "direction") {
        auto d = direction_from_string(value);
        if (!d) throw ParseError(lineno, "direction must be forward or back, got '" + std::string(value) + "'");
        rec.meta.direction = *d;
      } else if (key == "condition") {
        rec.meta.condition_label = std::string(value);
      } else if (key == "path_length_m") {
        rec.meta.path_length_m = detail::require_double(value, lineno, "path_length_m");
      }
      continue;
    }
    const auto fields = detail::split_fields(line);
    if (!have_header) {
      std::string joined;
      for (std::size_t k = 0; k < fields.size(); ++k) (joined += k ? "," : "") += fields[k];
      if (joined != kRecordingColumns)
        throw ParseError(lineno, "expected column header '" + std::string(kRecordingColumns) + "'");
      have_header = true;
      continue;
    }
    if (fields.size() != 6)
      throw ParseError(lineno, "expected 6 columns, got " + std::to_string(fields.size()));
    const auto index = detail::require_int(fields[0], lineno, "frame");
    const auto ts = detail::require_int(fields[1], lineno, "timestamp_ms");
    if (index < 0 || ts < 0) throw ParseError(lineno, "frame and timestamp must be nonnegative");
    const auto joint = joint_from_string(fields[2]);
    if (!joint) throw ParseError(lineno, "unknown joint '" + std::string(fields[2]) + "'", Errc::unknown_joint);
    JointSample s{*joint, detail::require_double(fields[3], lineno, "x"),
                  detail::require_double(fields[4], lineno, "y"), detail::require_double(fields[5], lineno, "z")};

    auto [it, inserted] = frames.try_emplace(index, index, ts);
    if (!inserted && it->second.timestamp_ms() != ts)
      throw ParseError(lineno, "frame " + std::to_string(index) + " has conflicting timestamps");
    if (it->second.has(*joint))
      throw ParseError(lineno, "duplicate joint " + std::string(fields[2]) + " in frame " + std::to_string(index));
    it->second.add(s);
  }
  if (frames.empty()) throw ParseError(0, "empty document: no data rows");

  rec.frames.reserve(frames.size());
  for (auto& [_, f] : frames) rec.frames.push_back(std::move(f));
  return rec;
}

// =============================================================================
// Tracks
// =============================================================================

enum class Axis : std::uint8_t { X, Y, Z };

struct TrackPoint {
  std::int64_t timestamp_ms = 0;
  double value = 0.0;

  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

/// One coordinate of one joint over time. Frames that lack the joint are
/// skipped.
inline std::vector<TrackPoint> joint_track(const Recording& rec, JointId joint, Axis axis) {
  std::vector<TrackPoint> track;
  track.reserve(rec.frames.size());
  for (const auto& f : rec.frames) {
    const auto& s = f.find(joint);
    if (!s) continue;
    const double v = axis == Axis::X ? s->x : axis == Axis::Y ? s->y : s->z;
    track.push_back({f.timestamp_ms(), v});
  }
  if (track.empty())
    throw Error(Errc::joint_never_observed, "joint never observed: " + std::string(to_string(joint)));
  return track;
}

}  // namespace gaitse
