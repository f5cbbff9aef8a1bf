// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "fera/labels.hpp"
#include "fera/mdt/model.hpp"

namespace fera::mdt {

/// Weighted binary cross-entropy averaged over the labels, written in the
/// max(z,0) - z*y + log1p(exp(-|z|)) form so saturated logits stay finite.
double move_loss(std::span<const double> logits, std::span<const double> targets, std::span<const double> weights);

/// Softmax cross-entropy at class `target`.
double blade_loss(std::span<const double> logits, int target);

double combined_loss(double move, double blade, double blade_weight);

struct LossTerms {
  double move = 0.0;
  double blade = 0.0;
  double total = 0.0;
  Vec dlogits;  // d(total)/d(logits), moves then blades
};

/// Loss of one example and its gradient with respect to the logits.
LossTerms example_loss(const Prediction& prediction, MoveSet moves, BladeLine blade,
                       std::span<const double> class_weights, double blade_weight);

}  // namespace fera::mdt
