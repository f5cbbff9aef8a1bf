// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fera/calib/calibration.hpp"
#include "fera/features.hpp"
#include "fera/labels.hpp"
#include "fera/mdt/model.hpp"

namespace fera {

struct DetectedAction {
  std::int64_t start_frame = 0;  // clip frame indices, inclusive
  std::int64_t end_frame = 0;
  MoveSet moves;
  std::array<double, kNumMoves> move_confidence{};
  BladeLine blade = BladeLine::Six;
  double blade_confidence = 0.0;

  std::int64_t length() const noexcept { return end_frame - start_frame + 1; }
  /// Highest confidence among the detected moves (0 for an empty set).
  double max_confidence() const noexcept;
  friend bool operator==(const DetectedAction&, const DetectedAction&) = default;
};

struct ActionTimeline {
  std::string clip_id;
  Side side = Side::Left;
  std::vector<DetectedAction> actions;  // sorted by start frame
};

/// Scores a window [start, end] (indices into the sequence). nullopt when
/// the window holds no valid frame.
class WindowClassifier {
public:
  virtual ~WindowClassifier() = default;
  virtual std::optional<mdt::Prediction> classify(const FeatureSequence& seq, std::size_t start,
                                                  std::size_t end) = 0;
};

/// Runs the transformer on each window with temperature scaling applied.
class ModelClassifier final : public WindowClassifier {
public:
  ModelClassifier(const mdt::ModelWeights& weights, calib::TemperatureSet temperatures, FeatureSubset subset);
  std::optional<mdt::Prediction> classify(const FeatureSequence& seq, std::size_t start, std::size_t end) override;

private:
  const mdt::ModelWeights& weights_;
  calib::TemperatureSet temperatures_;
  FeatureSubset subset_;
};

struct ScanConfig {
  int initial_window = 1;
  int max_window = 40;
  int half_step_lookahead = 12;  // frames after a half step searched for its full step
  double nms_iou = 0.5;
};

struct ScanStats {
  long forward_passes = 0;
  long resets = 0;  // start positions abandoned without a confident window
};

/// True when some move reaches its class threshold.
bool is_confident(const mdt::Prediction& p, const calib::ThresholdSet& thresholds);

/// Dynamic windowing: grow [s, s+w-1] from the initial size until a move is
/// confident, keep growing while the label set holds and the confidence
/// does not drop, emit, and restart after the window. A start position
/// with no confident window up to max_window is skipped. Half steps
/// followed closely by the matching full step are merged into it.
std::vector<DetectedAction> scan(const FeatureSequence& features, WindowClassifier& classifier,
                                 const calib::ThresholdSet& thresholds, const ScanConfig& config = {},
                                 ScanStats* stats = nullptr);

/// Inclusive-frame temporal IoU.
double temporal_iou(const DetectedAction& a, const DetectedAction& b);

/// Greedy suppression by descending confidence (ties: earlier start, then
/// label mask, then earlier end). An action is dropped when it shares a
/// move with a kept action and their temporal IoU exceeds the threshold.
ActionTimeline merge_nms(std::vector<DetectedAction> actions, double overlap_threshold, std::string clip_id = {},
                         Side side = Side::Left);

/// One forward pass over a whole trimmed segment.
DetectedAction decode_trimmed(const FeatureSequence& features, WindowClassifier& classifier,
                              const calib::ThresholdSet& thresholds);

/// `clip_id,side,start,end,moves,blade,confidence`, with a header row.
void write_timeline_csv(std::ostream& out, const std::vector<ActionTimeline>& timelines);

}  // namespace fera
