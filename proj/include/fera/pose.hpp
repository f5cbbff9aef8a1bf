// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fera/labels.hpp"

namespace fera {

/// COCO-17 joint order.
enum Joint : int {
  kNose = 0,
  kLeftEye = 1,
  kRightEye = 2,
  kLeftEar = 3,
  kRightEar = 4,
  kLeftShoulder = 5,
  kRightShoulder = 6,
  kLeftElbow = 7,
  kRightElbow = 8,
  kLeftWrist = 9,
  kRightWrist = 10,
  kLeftHip = 11,
  kRightHip = 12,
  kLeftKnee = 13,
  kRightKnee = 14,
  kLeftAnkle = 15,
  kRightAnkle = 16,
};

inline constexpr int kNumJoints = 17;

/// Index of the anatomical counterpart (nose maps to itself).
int mirror_joint(int joint) noexcept;

/// Pixel coordinates live on a 1/1024 px grid so that W - x is exact.
double snap_pixel(double v) noexcept;

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct Skeleton17 {
  std::array<Keypoint, kNumJoints> joints{};

  const Keypoint& operator[](int j) const { return joints[static_cast<std::size_t>(j)]; }
  Keypoint& operator[](int j) { return joints[static_cast<std::size_t>(j)]; }

  friend bool operator==(const Skeleton17&, const Skeleton17&) = default;
};

struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
  double confidence = 0.0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
  double center_x() const noexcept { return 0.5 * (x_min + x_max); }
  double center_y() const noexcept { return 0.5 * (y_min + y_max); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct FrameSize {
  int width = 0;
  int height = 0;

  bool known() const noexcept { return width > 0 && height > 0; }
  friend bool operator==(const FrameSize&, const FrameSize&) = default;
};

struct PoseCandidate {
  BoundingBox bbox;
  Skeleton17 skeleton;

  friend bool operator==(const PoseCandidate&, const PoseCandidate&) = default;
};

struct PoseFrame {
  std::int64_t frame_index = 0;
  std::vector<PoseCandidate> candidates;

  friend bool operator==(const PoseFrame&, const PoseFrame&) = default;
};

struct TrackFrame {
  std::int64_t frame_index = 0;
  Skeleton17 skeleton;
  bool present = false;

  friend bool operator==(const TrackFrame&, const TrackFrame&) = default;
};

/// One fencer over a clip. `side` is where the fencer stands on the piste;
/// `mirrored` records whether coordinates are currently in the flipped view.
struct PoseTrack {
  std::string clip_id;
  Side side = Side::Left;
  bool mirrored = false;
  FrameSize frame_size;
  double fps = 25.0;
  std::vector<TrackFrame> frames;

  friend bool operator==(const PoseTrack&, const PoseTrack&) = default;
};

/// Throws ValidationError if a keypoint is non-finite or its confidence is
/// outside [0,1], or if a box is inverted.
void validate(const Keypoint& k);
void validate(const BoundingBox& b);

/// Horizontal flip about the frame midline with left/right joint swap.
/// Involution when coordinates are on the snap grid.
PoseTrack mirror_track(const PoseTrack& track);
Skeleton17 mirror_skeleton(const Skeleton17& s, int width);

/// Tight box around joints with confidence > 0, padded by `pad` of its size.
BoundingBox skeleton_bbox(const Skeleton17& s, double pad, double confidence);

}  // namespace fera
