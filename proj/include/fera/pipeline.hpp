// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "fera/annotations.hpp"
#include "fera/calib/calibration.hpp"
#include "fera/calib/metrics.hpp"
#include "fera/config.hpp"
#include "fera/features.hpp"
#include "fera/mdt/dataset.hpp"
#include "fera/mdt/trainer.hpp"
#include "fera/transcript.hpp"
#include "fera/windowing.hpp"

namespace fera::pipeline {

using Log = std::function<void(const std::string&)>;

/// Feature sequences plus the annotations that label them.
struct Corpus {
  std::vector<std::shared_ptr<const FeatureSequence>> sequences;
  std::vector<AnnotatedSequence> annotations;

  std::vector<std::string> clip_ids() const;  // sorted, unique
  /// Subset restricted to the given clips.
  Corpus select(const std::vector<std::string>& clips) const;
};

/// Reads every *.feat file under `features_dir` (sorted by name).
Corpus load_corpus(const std::filesystem::path& features_dir, const std::filesystem::path& annotations_csv);

/// Left and right feature sequences of one pose track pair, computed
/// concurrently when jobs > 1.
std::pair<FeatureSequence, FeatureSequence> track_features(const PoseTrack& left, const PoseTrack& right, int jobs);

struct TrainedModel {
  mdt::ModelWeights weights;
  calib::Calibration calibration;
  mdt::TrainReport report;
  std::vector<std::string> warnings;
  std::uint64_t data_hash = 0;
};

/// Rebalances, trains from a fresh initialization and calibrates on `val`
/// (skipped when `val` is empty). Randomness derives from `seed`.
TrainedModel train_model(const std::vector<mdt::TrainingExample>& train, const std::vector<mdt::TrainingExample>& val,
                         const EngineConfig& config, std::uint64_t seed, const Log& log = {});

/// Temperatures then thresholds fitted on held-out predictions, each
/// skipped when disabled in the config.
calib::Calibration calibrate(const mdt::ModelWeights& weights, const std::vector<mdt::TrainingExample>& val,
                             const EngineConfig& config, std::vector<std::string>* warnings = nullptr);

struct Evaluation {
  std::vector<mdt::Prediction> predictions;  // temperature-scaled
  std::vector<MoveSet> decided;
  calib::MetricsReport report;
};

Evaluation evaluate(const mdt::ModelWeights& weights, const calib::Calibration& calibration,
                    const std::vector<mdt::TrainingExample>& examples, const EngineConfig& config);

struct FoldResult {
  int fold = 0;
  calib::MetricsReport report;
  calib::Calibration calibration;
  mdt::TrainReport train;
  std::size_t train_examples = 0;
  std::size_t test_examples = 0;
};

struct CrossValidation {
  std::string variant = "full";
  std::vector<FoldResult> folds;
};

/// k-fold harness: split by clip, train on each training part, calibrate
/// on its validation part and score the test part. Folds run in parallel
/// up to `config.jobs`.
CrossValidation cross_validate(const Corpus& corpus, const EngineConfig& config, const Log& log = {});

/// Per-class F1 and overall scores as mean and standard deviation over folds.
void write_cv_report(std::ostream& out, const CrossValidation& cv);

/// "full", "no_thresholds", "raw_joints", "augment_none", "augment_noise_only",
/// "augment_temporal_only", "augment_feature_specific_only", "no_temperature",
/// "equal_loss_weights".
const std::vector<std::string>& ablation_variants();
EngineConfig apply_variant(EngineConfig config, const std::string& variant);

/// `variant,metric,mean,std` rows.
void write_ablation_csv(std::ostream& out, const std::vector<CrossValidation>& runs);

/// Dynamic windowing and NMS over one sequence.
ActionTimeline detect_actions(const FeatureSequence& seq, const mdt::ModelWeights& weights,
                              const calib::Calibration& calibration, const EngineConfig& config,
                              ScanStats* stats = nullptr);

std::vector<ActionTimeline> read_timeline_csv(std::istream& in, const std::string& source_name);

/// Timelines as annotation-like sequences; actions with no move are dropped.
AnnotatedSequence timeline_to_sequence(const ActionTimeline& timeline);

/// Pairs the left and right timelines of every clip. Clips with one side
/// only are paired with an empty opponent.
std::vector<ExchangeTranscript> transcripts_from(const std::vector<AnnotatedSequence>& sequences);

/// Per-segment predictions: `clip_id,side,start,end,moves,blade,p_<move>...,p_blade_<line>...`.
struct SegmentPrediction {
  std::string clip_id;
  Side side = Side::Left;
  int start_frame = 0;
  int end_frame = 0;
  MoveSet moves;
  BladeLine blade = BladeLine::Six;
  std::array<double, kNumMoves> move_probs{};
  std::array<double, kNumBlades> blade_probs{};
};

void write_predictions_csv(std::ostream& out, const std::vector<SegmentPrediction>& predictions);
std::vector<SegmentPrediction> read_predictions_csv(std::istream& in, const std::string& source_name);

/// Metrics of stored predictions against annotations with the same
/// (clip, side, start frame) keys. Unmatched predictions are errors.
calib::MetricsReport score_predictions(const std::vector<SegmentPrediction>& predictions,
                                       const std::vector<AnnotatedSequence>& annotations, int bins);

}  // namespace fera::pipeline
