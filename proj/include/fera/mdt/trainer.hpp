// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fera/features.hpp"
#include "fera/mdt/config.hpp"
#include "fera/mdt/dataset.hpp"
#include "fera/mdt/model.hpp"

namespace fera::mdt {

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;  // training loss under augmentation and dropout
  double lr = 0.0;         // at the end of the epoch
  double mean_grad_norm = 0.0;
};

struct TrainOptions {
  TrainConfig train;
  AugmentConfig augment;
  FeatureSubset subset = FeatureSubset::All;
  std::vector<double> class_weights;  // empty: computed from the training examples
  std::function<void(const EpochStats&)> on_epoch;
};

struct TrainReport {
  double initial_loss = 0.0;  // eval-mode loss on the training set before the first step
  double final_loss = 0.0;
  std::vector<EpochStats> epochs;
  long steps = 0;
  long skipped_steps = 0;
  std::vector<std::string> diagnostics;
  std::vector<double> class_weights;
};

/// Mini-batch AdamW training in place. Deterministic for a fixed seed and
/// example order.
TrainReport train(ModelWeights& weights, const std::vector<TrainingExample>& examples, const TrainOptions& options);

/// Mean combined loss in eval mode without augmentation.
double evaluate_loss(const ModelWeights& weights, const std::vector<TrainingExample>& examples, FeatureSubset subset,
                     std::span<const double> class_weights, double blade_weight);

/// Eval-mode predictions in example order.
std::vector<Prediction> predict(const ModelWeights& weights, const std::vector<TrainingExample>& examples,
                                FeatureSubset subset);

/// Fingerprint of the labeled slices a model was trained on.
std::uint64_t data_hash(const std::vector<TrainingExample>& examples);

}  // namespace fera::mdt
