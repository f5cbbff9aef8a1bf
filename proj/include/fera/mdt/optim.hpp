// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "fera/mdt/config.hpp"
#include "fera/mdt/model.hpp"

namespace fera::mdt {

/// Linear warmup, flat plateau, then cosine decay to zero at `total_epochs`.
struct LrSchedule {
  double base_lr = 1e-3;
  double warmup_epochs = 3;
  double flat_epochs = 5;
  double total_epochs = 60;

  static LrSchedule from(const TrainConfig& c) {
    return {c.lr, c.warmup_epochs, c.flat_epochs, static_cast<double>(c.epochs)};
  }
  /// Learning rate at a fractional epoch.
  double at(double epoch) const;
};

double global_grad_norm(const ModelWeights& grads);

/// Scales grads so their global L2 norm is at most max_norm; returns the
/// norm before clipping.
double clip_grad_norm(ModelWeights& grads, double max_norm);

/// Name of the first tensor with a non-finite entry.
std::optional<std::string> first_non_finite(const ModelWeights& grads);

/// AdamW with decoupled weight decay.
class AdamW {
public:
  AdamW(const ModelConfig& model, const TrainConfig& train);

  /// Applies one update. Returns the offending tensor name (and leaves the
  /// weights untouched) when a gradient is non-finite.
  std::optional<std::string> step(ModelWeights& weights, const ModelWeights& grads, double lr);

  long steps() const noexcept { return steps_; }

private:
  TrainConfig train_;
  ModelWeights m_, v_;
  long steps_ = 0;
};

}  // namespace fera::mdt
