// SPDX-License-Identifier: Apache-2.0
#include "fera/pose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fera/error.hpp"

namespace fera {

namespace {
constexpr double kSnapScale = 1024.0;
}

int mirror_joint(int joint) noexcept {
  if (joint == kNose) return kNose;
  // Symmetric pairs are (odd, even) in COCO order.
  return (joint % 2 == 1) ? joint + 1 : joint - 1;
}

double snap_pixel(double v) noexcept { return std::nearbyint(v * kSnapScale) / kSnapScale; }

void validate(const Keypoint& k) {
  if (!std::isfinite(k.x) || !std::isfinite(k.y))
    throw ValidationError("keypoint coordinates must be finite");
  if (!(k.confidence >= 0.0 && k.confidence <= 1.0))
    throw ValidationError("keypoint confidence must lie in [0,1]");
}

void validate(const BoundingBox& b) {
  if (!(b.x_min <= b.x_max) || !(b.y_min <= b.y_max))
    throw ValidationError("bounding box corners are inverted");
  if (!(b.confidence >= 0.0 && b.confidence <= 1.0))
    throw ValidationError("bounding box confidence must lie in [0,1]");
}

Skeleton17 mirror_skeleton(const Skeleton17& s, int width) {
  const double w = static_cast<double>(width);
  Skeleton17 out;
  for (int j = 0; j < kNumJoints; ++j) {
    const Keypoint& src = s[mirror_joint(j)];
    out[j] = Keypoint{w - src.x, src.y, src.confidence};
  }
  return out;
}

PoseTrack mirror_track(const PoseTrack& track) {
  if (track.frame_size.width <= 0)
    throw ValidationError("cannot mirror track \"" + track.clip_id + "\": frame width unknown");
  PoseTrack out = track;
  out.mirrored = !track.mirrored;
  for (auto& f : out.frames) f.skeleton = mirror_skeleton(f.skeleton, track.frame_size.width);
  return out;
}

BoundingBox skeleton_bbox(const Skeleton17& s, double pad, double confidence) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  for (const auto& k : s.joints) {
    if (k.confidence <= 0.0) continue;
    x0 = std::min(x0, k.x);
    y0 = std::min(y0, k.y);
    x1 = std::max(x1, k.x);
    y1 = std::max(y1, k.y);
  }
  if (x0 > x1) return BoundingBox{0, 0, 0, 0, 0};
  const double px = pad * (x1 - x0), py = pad * (y1 - y0);
  return BoundingBox{snap_pixel(x0 - px), snap_pixel(y0 - py), snap_pixel(x1 + px), snap_pixel(y1 + py),
                     confidence};
}

}  // namespace fera
