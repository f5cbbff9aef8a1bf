// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fera::mdt {

struct ModelConfig {
  int input_dim = 101;
  int embed_dim = 128;
  int layers = 3;
  int heads = 8;
  int ff_dim = 512;
  double dropout = 0.1;
  int num_moves = 12;
  int num_blades = 5;

  int head_dim() const noexcept { return embed_dim / heads; }
  int output_dim() const noexcept { return num_moves + num_blades; }
  /// Throws ValidationError on inconsistent shapes.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TrainConfig {
  double lr = 1e-3;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double clip_norm = 0.5;
  int batch_size = 24;
  double warmup_epochs = 3;
  double flat_epochs = 5;
  int epochs = 60;
  double blade_loss_weight = 0.677;
  bool equal_loss_weights = false;  // ablation: blade weight forced to 1
  std::uint64_t seed = 0;

  double effective_blade_weight() const noexcept { return equal_loss_weights ? 1.0 : blade_loss_weight; }
  void validate() const;
};

enum class AugmentMode { All, None, NoiseOnly, TemporalOnly, FeatureSpecificOnly };

std::string_view augment_mode_name(AugmentMode mode) noexcept;
AugmentMode parse_augment_mode(std::string_view name);

struct AugmentConfig {
  AugmentMode mode = AugmentMode::All;
  int jitter_max = 2;          // shift drawn uniformly from {-jitter_max..jitter_max}
  double noise_sigma = 0.05;   // torso units
  double rotation_max = 0.05;  // radians, U(-max, max)
  double scale_min = 0.95;
  double scale_max = 1.05;

  bool temporal() const noexcept { return mode == AugmentMode::All || mode == AugmentMode::TemporalOnly; }
  bool noise() const noexcept { return mode == AugmentMode::All || mode == AugmentMode::NoiseOnly; }
  bool geometric() const noexcept { return mode == AugmentMode::All || mode == AugmentMode::FeatureSpecificOnly; }
};

struct RebalanceConfig {
  bool enabled = true;
  int oversample_target = 400;
  double blade_six_ratio = 2.0 / 3.0;
};

}  // namespace fera::mdt
