// SPDX-License-Identifier: Apache-2.0
#include "fera/calib/thresholds.hpp"

#include <algorithm>
#include <cmath>

#include "fera/error.hpp"
#include "fera/text.hpp"

namespace fera::calib {

void ThresholdSet::validate() const {
  for (int c = 0; c < kNumMoves; ++c) {
    const double t = tau[static_cast<std::size_t>(c)];
    if (!(t > 0.0 && t < 1.0))
      throw ValidationError("threshold for " + std::string(move_name(move_from_index(c))) + " is " + format_double(t) +
                            "; thresholds must lie in (0, 1)");
  }
}

void ThresholdGrid::validate() const {
  if (!(lo > 0.0 && hi < 1.0 && lo <= hi && step > 0.0))
    throw ValidationError("threshold grid needs 0 < lo <= hi < 1 and step > 0");
}

std::vector<double> threshold_grid(const ThresholdGrid& grid) {
  grid.validate();
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((grid.hi - grid.lo) / grid.step + 1e-9));
  // Rounded so that the default grid is exactly k/100.
  for (long k = 0; k <= n; ++k) g.push_back(std::round((grid.lo + static_cast<double>(k) * grid.step) * 1e12) / 1e12);
  return g;
}

std::optional<double> best_threshold(std::span<const double> probs, std::span<const std::uint8_t> targets,
                                     const ThresholdGrid& grid) {
  if (probs.size() != targets.size()) throw ValidationError("probability and target counts differ");
  if (std::none_of(targets.begin(), targets.end(), [](std::uint8_t t) { return t != 0; })) return std::nullopt;
  double best_tau = 0.0, best_f1 = -1.0;
  for (double tau : threshold_grid(grid)) {
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const bool p = probs[i] >= tau;
      tp += p && targets[i];
      fp += p && !targets[i];
      fn += !p && targets[i];
    }
    const double f1 = tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_tau = tau;
    }
  }
  return best_tau;
}

ThresholdTuning tune_thresholds(std::span<const mdt::Prediction> predictions, std::span<const MoveSet> truth,
                                const ThresholdGrid& grid) {
  if (predictions.size() != truth.size()) throw ValidationError("prediction and target counts differ");
  if (predictions.empty()) throw ValidationError("threshold tuning needs a non-empty validation set");
  ThresholdTuning out;
  std::vector<double> probs(predictions.size());
  std::vector<std::uint8_t> targets(predictions.size());
  for (int c = 0; c < kNumMoves; ++c) {
    const auto label = move_from_index(c);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      probs[i] = predictions[i].move_probs.at(static_cast<std::size_t>(c));
      targets[i] = truth[i].contains(label);
    }
    if (const auto tau = best_threshold(probs, targets, grid)) {
      out.thresholds.tau[static_cast<std::size_t>(c)] = *tau;
    } else {
      out.warnings.push_back("no validation positives for " + std::string(move_name(label)) + "; threshold 0.5");
    }
  }
  return out;
}

MoveSet decide_moves(const mdt::Prediction& prediction, const ThresholdSet& thresholds) {
  MoveSet s;
  for (int c = 0; c < kNumMoves; ++c)
    if (prediction.move_probs.at(static_cast<std::size_t>(c)) >= thresholds.tau[static_cast<std::size_t>(c)])
      s.insert(move_from_index(c));
  return s;
}

BladeLine decide_blade(const mdt::Prediction& prediction) {
  const auto& p = prediction.blade_probs;
  return blade_from_index(static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()));
}

}  // namespace fera::calib
