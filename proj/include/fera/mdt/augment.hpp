// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "fera/features.hpp"
#include "fera/mdt/config.hpp"
#include "fera/mdt/dataset.hpp"
#include "fera/mdt/model.hpp"
#include "fera/rng.hpp"

namespace fera::mdt {

/// Concrete draw of the augmentation transforms for one example.
struct AugmentParams {
  int shift = 0;             // frames; moves both segment boundaries
  double noise_sigma = 0.0;  // std-dev of per-coordinate joint noise
  std::uint64_t noise_seed = 0;
  double rotation = 0.0;  // radians about the pelvis
  double scale = 1.0;

  bool identity() const noexcept { return shift == 0 && noise_sigma == 0.0 && rotation == 0.0 && scale == 1.0; }
};

AugmentParams sample_augment(const AugmentConfig& config, Rng& rng);

/// Model input for one example.
struct ExampleTensor {
  Mat features;  // T × subset_dim
  std::vector<std::uint8_t> mask;
  MoveSet moves;
  BladeLine blade = BladeLine::Six;
};

/// Slices the stored features (no augmentation).
ExampleTensor materialize(const TrainingExample& example, FeatureSubset subset);

/// Applies the transforms to the normalized skeletons and recomputes
/// features. The shifted window is clamped to the sequence.
ExampleTensor materialize(const TrainingExample& example, FeatureSubset subset, const AugmentParams& params);

/// sample_augment followed by materialize.
ExampleTensor augment(const TrainingExample& example, FeatureSubset subset, const AugmentConfig& config, Rng& rng);

/// Rows [start, end] of a feature sequence restricted to a subset.
ExampleTensor slice_features(const FeatureSequence& seq, std::size_t start, std::size_t end, FeatureSubset subset);

}  // namespace fera::mdt
