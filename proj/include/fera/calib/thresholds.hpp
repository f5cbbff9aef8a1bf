// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fera/labels.hpp"
#include "fera/mdt/model.hpp"

namespace fera::calib {

inline constexpr double kDefaultThreshold = 0.5;

struct ThresholdSet {
  std::array<double, kNumMoves> tau;

  ThresholdSet() { tau.fill(kDefaultThreshold); }
  static ThresholdSet uniform(double t) {
    ThresholdSet s;
    s.tau.fill(t);
    return s;
  }
  /// Throws unless every entry lies in (0, 1).
  void validate() const;
  friend bool operator==(const ThresholdSet&, const ThresholdSet&) = default;
};

/// Candidate thresholds lo, lo+step, ..., hi (0.05, 0.06, ..., 0.95 by default).
struct ThresholdGrid {
  double lo = 0.05;
  double hi = 0.95;
  double step = 0.01;

  void validate() const;
};

std::vector<double> threshold_grid(const ThresholdGrid& grid = {});

/// Grid threshold with the highest F1 for one class (p >= tau is positive);
/// ties go to the smaller threshold. nullopt when there is no positive.
std::optional<double> best_threshold(std::span<const double> probs, std::span<const std::uint8_t> targets,
                                     const ThresholdGrid& grid = {});

struct ThresholdTuning {
  ThresholdSet thresholds;
  std::vector<std::string> warnings;
};

ThresholdTuning tune_thresholds(std::span<const mdt::Prediction> predictions, std::span<const MoveSet> truth,
                                const ThresholdGrid& grid = {});

/// Moves whose probability reaches their class threshold.
MoveSet decide_moves(const mdt::Prediction& prediction, const ThresholdSet& thresholds);

/// Highest-probability blade class (first on ties).
BladeLine decide_blade(const mdt::Prediction& prediction);

}  // namespace fera::calib
