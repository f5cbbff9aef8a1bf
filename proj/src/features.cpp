// SPDX-License-Identifier: Apache-2.0
#include "fera/features.hpp"

#include <algorithm>
#include <numbers>

#include "fera/error.hpp"

namespace fera {

NormalizedSkeleton normalize_skeleton(const Skeleton17& s) {
  NormalizedSkeleton out;
  for (int j : {kLeftShoulder, kRightShoulder, kLeftHip, kRightHip})
    if (!(s[j].confidence > 0.0)) return out;

  auto p = [&](int j) { return Vec2{s[j].x, s[j].y}; };
  const Vec2 pelvis = 0.5 * (p(kLeftHip) + p(kRightHip));
  const double torso = 0.5 * ((p(kLeftShoulder) - p(kLeftHip)).norm() + (p(kRightShoulder) - p(kRightHip)).norm());
  if (!(torso >= kTorsoEpsilon)) return out;

  for (int b = 0; b < kBodyJoints; ++b) {
    const int j = b + kLeftShoulder;
    out.joints[b] = (p(j) - pelvis) / torso;
    if (s[j].confidence > 0.0) out.joint_mask |= static_cast<std::uint16_t>(1u << b);
  }
  out.valid = true;
  return out;
}

JointAngle joint_angle(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 u = a - b, v = c - b;
  const double nu = u.norm(), nv = v.norm();
  if (nu < kTorsoEpsilon || nv < kTorsoEpsilon) return {0.0, true};
  const double cosine = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
  return {std::acos(cosine), false};
}

Derivatives temporal_derivatives(std::span<const KinematicPoints> points, std::span<const std::uint8_t> valid) {
  const std::size_t n = points.size();
  Derivatives d;
  d.velocity.assign(n, KinematicPoints{});
  d.acceleration.assign(n, KinematicPoints{});
  for (std::size_t t = 1; t < n; ++t) {
    if (!valid[t] || !valid[t - 1]) continue;
    for (std::size_t i = 0; i < points[t].size(); ++i) {
      d.velocity[t][i] = points[t][i] - points[t - 1][i];
      d.acceleration[t][i] = d.velocity[t][i] - d.velocity[t - 1][i];
    }
  }
  return d;
}

Vec2 center_of_mass(const NormalizedSkeleton& s) {
  Vec2 sum;
  int count = 0;
  for (int b = 0; b < kBodyJoints; ++b) {
    if (!((s.joint_mask >> b) & 1u)) continue;
    sum = sum + s.joints[b];
    ++count;
  }
  return count > 0 ? sum / count : Vec2{};
}

namespace {

// Static (per-frame) blocks; returns flag bits.
std::uint8_t fill_static(const NormalizedSkeleton& s, Vec2 com, FeatureFrame& f) {
  std::uint8_t flags = 0;
  for (int b = 0; b < kBodyJoints; ++b) {
    f[layout::kJoints + 2 * b] = s.joints[b].x;
    f[layout::kJoints + 2 * b + 1] = s.joints[b].y;
  }
  f[layout::kCom] = com.x;
  f[layout::kCom + 1] = com.y;

  for (int k = 0; k < kNumDistances; ++k) {
    const auto [a, b] = kDistancePairs[k];
    f[layout::kDistances + k] = (s.joints[a] - s.joints[b]).norm();
  }

  constexpr std::array<std::array<int, 3>, 4> kAngleTriples = {{
      {kBodyLeftShoulder, kBodyLeftElbow, kBodyLeftWrist},
      {kBodyRightShoulder, kBodyRightElbow, kBodyRightWrist},
      {kBodyLeftHip, kBodyLeftKnee, kBodyLeftAnkle},
      {kBodyRightHip, kBodyRightKnee, kBodyRightAnkle},
  }};
  for (int k = 0; k < 4; ++k) {
    const auto [a, b, c] = kAngleTriples[k];
    const auto angle = joint_angle(s.joints[a], s.joints[b], s.joints[c]);
    if (angle.degenerate) flags |= kFlagDegenerateAngle;
    f[layout::kAngles + k] = angle.radians;
  }

  // Torso axis from shoulder center to hip center, measured against image
  // vertical (y grows downward), so an upright torso gives sin 0, cos 1.
  const Vec2 shoulders = 0.5 * (s.joints[kBodyLeftShoulder] + s.joints[kBodyRightShoulder]);
  const Vec2 hips = 0.5 * (s.joints[kBodyLeftHip] + s.joints[kBodyRightHip]);
  const Vec2 axis = hips - shoulders;
  const double axis_len = axis.norm();
  if (axis_len < kTorsoEpsilon) {
    flags |= kFlagDegenerateTorsoAxis;
    f[layout::kTorso] = 0.0;
    f[layout::kTorso + 1] = 1.0;
  } else {
    f[layout::kTorso] = axis.x / axis_len;
    f[layout::kTorso + 1] = axis.y / axis_len;
  }

  const std::array<std::array<int, 2>, 2> arms = {{{kBodyLeftShoulder, kBodyLeftWrist},
                                                    {kBodyRightShoulder, kBodyRightWrist}}};
  for (int k = 0; k < 2; ++k) {
    const Vec2 v = s.joints[arms[k][1]] - s.joints[arms[k][0]];
    const double mag = v.norm();
    const Vec2 dir = mag < kTorsoEpsilon ? Vec2{} : v / mag;
    f[layout::kArms + 3 * k] = mag;
    f[layout::kArms + 3 * k + 1] = dir.x;
    f[layout::kArms + 3 * k + 2] = dir.y;
  }
  return flags;
}

}  // namespace

FeatureSequence assemble_from_normalized(std::span<const NormalizedSkeleton> skeletons) {
  const std::size_t n = skeletons.size();
  FeatureSequence seq;
  seq.frames.assign(n, FeatureFrame{});
  seq.valid_mask.assign(n, 0);
  seq.joint_masks.assign(n, 0);
  seq.flags.assign(n, 0);

  std::vector<KinematicPoints> points(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& s = skeletons[t];
    if (!s.valid) {
      seq.flags[t] = kFlagInvalidTorso;
      continue;
    }
    const Vec2 com = center_of_mass(s);
    std::copy(s.joints.begin(), s.joints.end(), points[t].begin());
    points[t][kBodyJoints] = com;
    seq.valid_mask[t] = 1;
    seq.joint_masks[t] = s.joint_mask;
    seq.flags[t] = fill_static(s, com, seq.frames[t]);
  }

  const auto d = temporal_derivatives(points, seq.valid_mask);
  for (std::size_t t = 0; t < n; ++t) {
    if (!seq.valid_mask[t]) continue;
    auto& f = seq.frames[t];
    for (int b = 0; b < kBodyJoints; ++b) {
      f[layout::kVelocities + 2 * b] = d.velocity[t][b].x;
      f[layout::kVelocities + 2 * b + 1] = d.velocity[t][b].y;
      f[layout::kAccelerations + 2 * b] = d.acceleration[t][b].x;
      f[layout::kAccelerations + 2 * b + 1] = d.acceleration[t][b].y;
    }
    f[layout::kComDynamics] = d.velocity[t][kBodyJoints].x;
    f[layout::kComDynamics + 1] = d.velocity[t][kBodyJoints].y;
    f[layout::kComDynamics + 2] = d.acceleration[t][kBodyJoints].x;
    f[layout::kComDynamics + 3] = d.acceleration[t][kBodyJoints].y;
  }
  return seq;
}

PoseTrack canonical_view(const PoseTrack& track) {
  const bool want_mirrored = track.side == Side::Right;
  return track.mirrored == want_mirrored ? track : mirror_track(track);
}

FeatureSequence assemble_features(const PoseTrack& track) {
  if (track.mirrored != (track.side == Side::Right))
    throw ValidationError("track \"" + track.clip_id + "\" (" + std::string(side_name(track.side)) +
                          ") is not in the canonical left view");
  std::vector<NormalizedSkeleton> skeletons;
  skeletons.reserve(track.frames.size());
  for (const auto& f : track.frames) skeletons.push_back(normalize_skeleton(f.skeleton));
  auto seq = assemble_from_normalized(skeletons);
  seq.clip_id = track.clip_id;
  seq.side = track.side;
  seq.first_frame = track.frames.empty() ? 0 : track.frames.front().frame_index;
  return seq;
}

NormalizedSkeleton stored_skeleton(const FeatureSequence& seq, std::size_t t) {
  NormalizedSkeleton s;
  if (!seq.valid_mask[t]) return s;
  for (int b = 0; b < kBodyJoints; ++b)
    s.joints[b] = Vec2{seq.frames[t][layout::kJoints + 2 * b], seq.frames[t][layout::kJoints + 2 * b + 1]};
  s.joint_mask = seq.joint_masks[t];
  s.valid = true;
  return s;
}

int subset_dim(FeatureSubset subset) noexcept { return subset == FeatureSubset::All ? kFeatureDim : kRawJointDim; }

std::string_view subset_name(FeatureSubset subset) noexcept {
  return subset == FeatureSubset::All ? "all" : "raw_joints";
}

FeatureSubset parse_subset(std::string_view name) {
  if (name == "all") return FeatureSubset::All;
  if (name == "raw_joints") return FeatureSubset::RawJoints;
  throw ValidationError("unknown feature subset \"" + std::string(name) + "\"; expected all or raw_joints");
}

}  // namespace fera
