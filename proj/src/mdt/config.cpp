// SPDX-License-Identifier: Apache-2.0
#include "fera/mdt/config.hpp"

#include <array>
#include <utility>

#include "fera/error.hpp"

namespace fera::mdt {

namespace {

constexpr std::array<std::pair<AugmentMode, std::string_view>, 5> kModeNames = {{
    {AugmentMode::All, "all"},
    {AugmentMode::None, "none"},
    {AugmentMode::NoiseOnly, "noise_only"},
    {AugmentMode::TemporalOnly, "temporal_only"},
    {AugmentMode::FeatureSpecificOnly, "feature_specific_only"},
}};

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0 && weight_decay >= 0 && clip_norm > 0 && adam_eps > 0))
    throw ValidationError("learning rate, clip norm and epsilon must be positive, weight decay non-negative");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1)) throw ValidationError("Adam betas must be in [0, 1)");
  if (batch_size <= 0 || epochs <= 0) throw ValidationError("batch size and epochs must be positive");
  if (warmup_epochs < 0 || flat_epochs < 0) throw ValidationError("schedule phases must be non-negative");
  if (!(blade_loss_weight > 0)) throw ValidationError("blade loss weight must be positive");
}

std::string_view augment_mode_name(AugmentMode mode) noexcept {
  for (const auto& [m, n] : kModeNames)
    if (m == mode) return n;
  return "all";
}

AugmentMode parse_augment_mode(std::string_view name) {
  for (const auto& [m, n] : kModeNames)
    if (n == name) return m;
  throw ValidationError("unknown augmentation mode \"" + std::string(name) +
                        "\" (expected all, none, noise_only, temporal_only, feature_specific_only)");
}

}  // namespace fera::mdt
