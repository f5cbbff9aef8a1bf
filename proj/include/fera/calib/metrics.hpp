// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fera/labels.hpp"
#include "fera/mdt/model.hpp"

namespace fera::calib {

inline constexpr int kCalibrationBins = 15;

struct ClassScores {
  long tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  long support() const noexcept { return tp + fn; }
};

struct ClassificationMetrics {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double weighted_f1 = 0.0;
  double hamming = 0.0;
  std::vector<int> classes;  // class indices the averages run over
  std::vector<ClassScores> per_class;  // parallel to `classes`
};

/// All 12 move classes.
std::vector<int> all_move_classes();

/// Multi-label scores over `classes`. A class never predicted nor present
/// scores F1 = 0 and still counts toward the macro average.
ClassificationMetrics compute_classification(std::span<const MoveSet> predicted, std::span<const MoveSet> truth,
                                             std::span<const int> classes);
ClassificationMetrics compute_classification(std::span<const MoveSet> predicted, std::span<const MoveSet> truth);

struct BinStats {
  long count = 0;
  double confidence = 0.0;  // mean predicted probability
  double accuracy = 0.0;    // mean outcome
};

struct CalibrationMetrics {
  double ece = 0.0;
  double mce = 0.0;
  double brier = 0.0;
  std::vector<BinStats> bins;
};

/// Each (probability, outcome) pair is one sample; bin m covers
/// [m/M, (m+1)/M) with p = 1 placed in the last bin.
CalibrationMetrics compute_calibration(std::span<const double> probs, std::span<const double> outcomes,
                                       int bins = kCalibrationBins);

/// Flattens move probabilities and indicators of the given classes, sample-major.
void flatten_moves(std::span<const mdt::Prediction> predictions, std::span<const MoveSet> truth,
                   std::span<const int> classes, std::vector<double>& probs, std::vector<double>& outcomes);

using CooccurrenceMatrix = std::array<std::array<long, kNumMoves>, kNumMoves>;

CooccurrenceMatrix cooccurrence(std::span<const MoveSet> label_sets);
void write_cooccurrence_csv(std::ostream& out, const CooccurrenceMatrix& m);

struct MetricsReport {
  ClassificationMetrics classification;
  CalibrationMetrics calibration;
  double blade_accuracy = 0.0;
  long samples = 0;
};

MetricsReport build_report(std::span<const mdt::Prediction> predictions, std::span<const MoveSet> predicted,
                           std::span<const MoveSet> truth, std::span<const BladeLine> blade_truth,
                           int bins = kCalibrationBins);

void write_report_text(std::ostream& out, const MetricsReport& report);
/// `metric,class,value` rows.
void write_report_csv(std::ostream& out, const MetricsReport& report);

}  // namespace fera::calib
