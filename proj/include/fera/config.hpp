// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fera/calib/thresholds.hpp"
#include "fera/features.hpp"
#include "fera/mdt/config.hpp"
#include "fera/referee/explainer_client.hpp"
#include "fera/referee/priority.hpp"
#include "fera/tracker.hpp"
#include "fera/windowing.hpp"

namespace fera {

struct CalibConfig {
  bool per_class_thresholds = true;
  bool temperature_scaling = true;
  calib::ThresholdGrid grid;
  int bins = 15;
  int folds = 5;
};

struct SynthConfig {
  int clips = 20;
  double noise_px = 0.5;
  double occlusion_prob = 0.0;
  int min_steps = 3;
  int max_steps = 6;
  double hit_prob = 0.3;
};

/// Every tunable of the pipeline. All randomness derives from `seed`.
struct EngineConfig {
  std::uint64_t seed = 0;
  int jobs = 1;
  TrackerConfig tracker;
  FeatureSubset subset = FeatureSubset::All;
  mdt::ModelConfig model;
  mdt::TrainConfig train;
  mdt::AugmentConfig augment;
  mdt::RebalanceConfig rebalance;
  CalibConfig calib;
  ScanConfig window;
  referee::RuleToggles rules;
  std::string rulebook;  // empty: built-in rules
  referee::ExplainerConfig explainer;
  SynthConfig synth;

  /// Model input width follows the feature subset.
  mdt::ModelConfig effective_model() const;
  void validate() const;
};

/// `key = value` lines grouped under `[section]` headers; `#` comments.
/// Keys may also be written fully qualified (`train.lr = 0.001`). Strings
/// may be double-quoted. Unknown keys and malformed values are ParseErrors.
EngineConfig parse_config_stream(std::istream& in, const std::string& source_name, EngineConfig base = {});
EngineConfig load_config(const std::filesystem::path& path);

/// Applies one `section.key=value` override.
void set_config_value(EngineConfig& config, const std::string& key, const std::string& value);

/// Every key with its current value, in parseable form.
void dump_config(std::ostream& out, const EngineConfig& config);
std::vector<std::string> config_keys();

}  // namespace fera
