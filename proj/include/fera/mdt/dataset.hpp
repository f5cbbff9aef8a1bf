// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "fera/annotations.hpp"
#include "fera/features.hpp"
#include "fera/labels.hpp"
#include "fera/mdt/config.hpp"
#include "fera/rng.hpp"

namespace fera::mdt {

/// A labeled slice [start, end] (indices into `sequence->frames`) of one
/// fencer's feature sequence.
struct TrainingExample {
  std::shared_ptr<const FeatureSequence> sequence;
  std::size_t start = 0;
  std::size_t end = 0;
  MoveSet moves;
  BladeLine blade = BladeLine::Six;
  bool duplicate = false;  // added by oversampling

  std::size_t length() const noexcept { return end - start + 1; }
};

struct ExampleBuild {
  std::vector<TrainingExample> examples;
  std::vector<std::string> warnings;
};

/// Pairs annotation segments with the feature sequence of the same clip and
/// side. Segments outside the sequence, or with no valid frame, are skipped
/// with a warning.
ExampleBuild build_examples(const std::vector<std::shared_ptr<const FeatureSequence>>& sequences,
                            const std::vector<AnnotatedSequence>& annotations);

using MoveCounts = std::array<long, kNumMoves>;
using BladeCounts = std::array<long, kNumBlades>;

MoveCounts count_moves(const std::vector<TrainingExample>& examples);
BladeCounts count_blades(const std::vector<TrainingExample>& examples);

/// Inverse-frequency weights normalized to mean 1. A class with zero count
/// gets the weight of the rarest seen class.
std::vector<double> class_weights(const MoveCounts& counts);

struct RebalanceResult {
  std::vector<TrainingExample> examples;
  std::vector<std::string> warnings;
};

/// Duplicates examples of every move class below the oversampling target,
/// then drops random blade-Six examples until their count is at most
/// ratio × mean count of the other four blade classes.
RebalanceResult rebalance(std::vector<TrainingExample> examples, const RebalanceConfig& config, Rng& rng);

}  // namespace fera::mdt
