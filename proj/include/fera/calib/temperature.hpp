// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fera/labels.hpp"
#include "fera/mdt/model.hpp"

namespace fera::calib {

inline constexpr double kTemperatureMin = 0.05;
inline constexpr double kTemperatureMax = 20.0;
inline constexpr int kTemperatureMaxIterations = 200;

/// One temperature per move logit followed by one per blade logit. The
/// blade entries share a single fitted value.
struct TemperatureSet {
  std::array<double, kNumMoves + kNumBlades> t;

  TemperatureSet() { t.fill(1.0); }
  std::span<const double> values() const noexcept { return t; }
  void validate() const;
  friend bool operator==(const TemperatureSet&, const TemperatureSet&) = default;
};

struct GoldenResult {
  double x = 1.0;
  int iterations = 0;
  bool converged = false;
};

/// Golden-section minimization of a unimodal function on [lo, hi].
GoldenResult golden_section(const std::function<double(double)>& f, double lo, double hi, double tolerance,
                            int max_iterations);

/// Mean binary NLL of sigmoid(z / T).
double sigmoid_nll(std::span<const double> logits, std::span<const double> targets, double temperature);
/// Mean NLL of softmax(z / T) over rows of `logits`.
double softmax_nll(std::span<const std::vector<double>> logits, std::span<const int> classes, double temperature);

/// NLL-minimizing temperature on [0.05, 20]; 1 when the search fails.
double fit_sigmoid_temperature(std::span<const double> logits, std::span<const double> targets);
double fit_softmax_temperature(std::span<const std::vector<double>> logits, std::span<const int> classes);

struct TemperatureFit {
  TemperatureSet temperatures;
  std::vector<std::string> warnings;
};

TemperatureFit scale_temperatures(std::span<const mdt::Prediction> predictions, std::span<const MoveSet> truth,
                                  std::span<const BladeLine> blades);

/// Prediction recomputed from its logits under the given temperatures.
mdt::Prediction apply_temperatures(const mdt::Prediction& prediction, const TemperatureSet& temperatures);

}  // namespace fera::calib
