// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fera/pose.hpp"

namespace fera {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
  friend Vec2 operator/(Vec2 a, double s) noexcept { return {a.x / s, a.y / s}; }
  friend bool operator==(Vec2, Vec2) = default;
  double norm() const noexcept { return std::hypot(x, y); }
  double dot(Vec2 o) const noexcept { return x * o.x + y * o.y; }
};

inline constexpr int kBodyJoints = 12;  // COCO 5..16
inline constexpr int kFeatureDim = 101;
inline constexpr int kRawJointDim = 2 * kBodyJoints;

/// Body-joint indices after the five head joints are dropped.
enum BodyJoint : int {
  kBodyLeftShoulder = 0,
  kBodyRightShoulder,
  kBodyLeftElbow,
  kBodyRightElbow,
  kBodyLeftWrist,
  kBodyRightWrist,
  kBodyLeftHip,
  kBodyRightHip,
  kBodyLeftKnee,
  kBodyRightKnee,
  kBodyLeftAnkle,
  kBodyRightAnkle,
};

/// Offsets of each block inside a 101-D frame vector.
namespace layout {
inline constexpr int kJoints = 0;          // 24 normalized coordinates
inline constexpr int kCom = 24;            // 2
inline constexpr int kDistances = 26;      // 11
inline constexpr int kAngles = 37;         // 4
inline constexpr int kTorso = 41;          // sin, cos
inline constexpr int kArms = 43;           // per arm: magnitude, dir x, dir y
inline constexpr int kVelocities = 49;     // 24
inline constexpr int kAccelerations = 73;  // 24
inline constexpr int kComDynamics = 97;    // vx, vy, ax, ay
inline constexpr int kEnd = 101;
}  // namespace layout

inline constexpr int kNumDistances = 11;
/// Fixed distance pairs in body-joint indices; ordering is part of the layout.
inline constexpr std::array<std::array<int, 2>, kNumDistances> kDistancePairs = {{
    {kBodyLeftWrist, kBodyRightWrist},
    {kBodyLeftAnkle, kBodyRightAnkle},
    {kBodyLeftShoulder, kBodyRightShoulder},
    {kBodyLeftHip, kBodyRightHip},
    {kBodyLeftElbow, kBodyRightElbow},
    {kBodyLeftKnee, kBodyRightKnee},
    {kBodyLeftWrist, kBodyLeftAnkle},
    {kBodyRightWrist, kBodyRightAnkle},
    {kBodyLeftWrist, kBodyRightAnkle},
    {kBodyRightWrist, kBodyLeftAnkle},
    {kBodyLeftWrist, kBodyLeftHip},
}};

inline constexpr double kTorsoEpsilon = 1e-6;

/// Per-frame diagnostic bits.
enum FrameFlag : std::uint8_t {
  kFlagInvalidTorso = 1,
  kFlagDegenerateAngle = 2,
  kFlagDegenerateTorsoAxis = 4,
};

/// Pelvis-centered joints in torso units. `joint_mask` bit j is set when body
/// joint j had confidence > 0.
struct NormalizedSkeleton {
  std::array<Vec2, kBodyJoints> joints{};
  std::uint16_t joint_mask = 0;
  bool valid = false;

  friend bool operator==(const NormalizedSkeleton&, const NormalizedSkeleton&) = default;
};

using FeatureFrame = std::array<double, kFeatureDim>;

struct FeatureSequence {
  std::string clip_id;
  Side side = Side::Left;
  std::vector<FeatureFrame> frames;
  std::vector<std::uint8_t> valid_mask;
  std::vector<std::uint16_t> joint_masks;
  std::vector<std::uint8_t> flags;
  std::int64_t first_frame = 0;  // clip frame index of frames[0]

  std::size_t size() const noexcept { return frames.size(); }
  friend bool operator==(const FeatureSequence&, const FeatureSequence&) = default;
};

/// Centers at the hip midpoint and divides by the mean shoulder-hip length.
/// Invalid (all zeros) when a hip or shoulder is missing or the torso length
/// is below kTorsoEpsilon.
NormalizedSkeleton normalize_skeleton(const Skeleton17& s);

struct JointAngle {
  double radians = 0.0;
  bool degenerate = false;
};

/// Angle at b between rays b->a and b->c, in [0, pi].
JointAngle joint_angle(Vec2 a, Vec2 b, Vec2 c);

/// Points tracked through time: 12 body joints followed by the CoM.
using KinematicPoints = std::array<Vec2, kBodyJoints + 1>;

struct Derivatives {
  std::vector<KinematicPoints> velocity;
  std::vector<KinematicPoints> acceleration;
};

/// Backward differences. v_0 = a_0 = 0, a_1 = v_1 - v_0; a difference that
/// touches an invalid frame is zero.
Derivatives temporal_derivatives(std::span<const KinematicPoints> points, std::span<const std::uint8_t> valid);

/// Mean of the joints flagged in `joint_mask`.
Vec2 center_of_mass(const NormalizedSkeleton& s);

/// Builds 101-D frames from already-normalized skeletons.
FeatureSequence assemble_from_normalized(std::span<const NormalizedSkeleton> skeletons);

/// Requires the canonical left view: left tracks unmirrored, right tracks
/// mirrored. Throws ValidationError otherwise.
FeatureSequence assemble_features(const PoseTrack& track);

/// Mirrors right-side tracks into the canonical view; left tracks pass through.
PoseTrack canonical_view(const PoseTrack& track);

/// Recovers the normalized skeleton stored in frame t of a feature sequence.
NormalizedSkeleton stored_skeleton(const FeatureSequence& seq, std::size_t t);

enum class FeatureSubset { All, RawJoints };

int subset_dim(FeatureSubset subset) noexcept;
std::string_view subset_name(FeatureSubset subset) noexcept;
FeatureSubset parse_subset(std::string_view name);

}  // namespace fera
