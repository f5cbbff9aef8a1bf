// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fera/pose.hpp"
#include "fera/pose_io.hpp"

namespace fera {

struct TrackerConfig {
  int grace_frames = 12;
  double min_area_fraction = 0.03;
  double min_confidence = 0.20;      // strict: confidence must exceed this
  double bottom_margin_px = 1.0;     // boxes reaching within this of the bottom edge touch it
  double score_area_weight = 0.7;
  double score_vertical_weight = 0.3;
  double alpha = 0.5;                // IoU term of the association cost
  double beta = 0.5;                 // centroid term of the association cost
  double gate = 0.8;
  double pose_similarity_cap = 0.5;  // torso units
  double ema_lambda = 0.6;
};

struct Candidate {
  std::size_t source_index = 0;  // position in PoseFrame::candidates
  BoundingBox bbox;
  Skeleton17 skeleton;
  double area_fraction = 0.0;
  double score = 0.0;
};

/// Gates candidates by area, confidence and the bottom edge, scores them by
/// size and vertical placement, and sorts best first. During the grace period
/// only the two best candidates are returned (initial fencer selection).
std::vector<Candidate> filter_candidates(const PoseFrame& frame, FrameSize frame_size, bool grace_active,
                                         const TrackerConfig& config);

double iou(const BoundingBox& a, const BoundingBox& b);

/// alpha * (1 - IoU) + beta * centroid distance / frame diagonal.
double association_distance(const BoundingBox& track_box, const BoundingBox& candidate_box, FrameSize frame_size,
                            double alpha, double beta);

/// Mean distance of the 12 body joints after each skeleton is normalized on
/// its own pelvis and torso; +inf when either cannot be normalized.
double pose_dissimilarity(const Skeleton17& a, const Skeleton17& b);

/// Per-joint exponential smoothing state.
struct EmaState {
  std::array<Keypoint, kNumJoints> value{};
  std::array<bool, kNumJoints> initialized{};
};

/// ema <- lambda * obs + (1 - lambda) * ema for joints observed with
/// confidence > 0; a joint's first observation initializes it. Absent input
/// (or unobserved joints) holds the previous output.
Skeleton17 ema_smooth(EmaState& state, const Skeleton17* observation, double lambda);

struct TrackState {
  int track_id = 0;
  BoundingBox last_bbox;
  Skeleton17 last_skeleton;
  EmaState ema;
  int frames_missing = 0;
};

struct Assignment {
  int track_id = 0;
  std::optional<std::size_t> candidate;  // index into PoseFrame::candidates
  double cost = 0.0;
  bool reassigned = false;  // recovered through the lost-track path
  bool created = false;
};

struct StepResult {
  std::int64_t frame_index = 0;
  std::vector<Assignment> assignments;  // one per live track, by track id
  std::array<std::optional<Skeleton17>, 2> smoothed;
  std::array<bool, 2> present{};
};

/// Two-fencer tracker for one clip. Not thread-safe; use one per clip.
class FencerTracker {
public:
  FencerTracker(TrackerConfig config, FrameSize frame_size);

  StepResult step(const PoseFrame& frame);

  const std::vector<TrackState>& tracks() const noexcept { return tracks_; }
  int frames_seen() const noexcept { return frames_seen_; }

private:
  TrackerConfig config_;
  FrameSize frame_size_;
  std::vector<TrackState> tracks_;
  int frames_seen_ = 0;
};

struct TrackingResult {
  PoseTrack left;
  PoseTrack right;
  std::string report;  // per-frame assignment costs, one line per track and frame
};

/// Runs the tracker over a whole pose file. Frames are made contiguous (gaps
/// become absent frames); the track whose first box lies further left is the
/// left fencer.
TrackingResult run_tracker(const PoseFile& file, const TrackerConfig& config);

}  // namespace fera
