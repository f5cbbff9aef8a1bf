// SPDX-License-Identifier: Apache-2.0
#include "fera/mdt/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fera/error.hpp"

namespace fera::mdt {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sum_exp(std::span<const double> z) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : z) mx = std::max(mx, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - mx);
  return mx + std::log(s);
}

}  // namespace

double move_loss(std::span<const double> logits, std::span<const double> targets, std::span<const double> weights) {
  if (logits.size() != targets.size() || logits.size() != weights.size() || logits.empty())
    throw ValidationError("move loss needs equally sized, non-empty logits, targets and weights");
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = logits[i];
    sum += weights[i] * (std::max(z, 0.0) - z * targets[i] + std::log1p(std::exp(-std::abs(z))));
  }
  return sum / static_cast<double>(logits.size());
}

double blade_loss(std::span<const double> logits, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= logits.size())
    throw ValidationError("blade target " + std::to_string(target) + " out of range");
  return log_sum_exp(logits) - logits[static_cast<std::size_t>(target)];
}

double combined_loss(double move, double blade, double blade_weight) { return move + blade_weight * blade; }

LossTerms example_loss(const Prediction& p, MoveSet moves, BladeLine blade, std::span<const double> class_weights,
                       double blade_weight) {
  const auto nm = p.move_logits.size(), nb = p.blade_logits.size();
  if (nm != static_cast<std::size_t>(kNumMoves) || nb != static_cast<std::size_t>(kNumBlades))
    throw ValidationError("prediction does not have 12 move and 5 blade outputs");
  std::vector<double> y(nm);
  const auto ind = moves.indicators();
  for (std::size_t i = 0; i < nm; ++i) y[i] = ind[i] ? 1.0 : 0.0;
  const int c = blade_index(blade);

  LossTerms out;
  out.move = move_loss(p.move_logits, y, class_weights);
  out.blade = blade_loss(p.blade_logits, c);
  out.total = combined_loss(out.move, out.blade, blade_weight);
  out.dlogits.resize(static_cast<Eigen::Index>(nm + nb));
  for (std::size_t i = 0; i < nm; ++i)
    out.dlogits(static_cast<Eigen::Index>(i)) =
        class_weights[i] * (sigmoid(p.move_logits[i]) - y[i]) / static_cast<double>(nm);
  const double lse = log_sum_exp(p.blade_logits);
  for (std::size_t i = 0; i < nb; ++i)
    out.dlogits(static_cast<Eigen::Index>(nm + i)) =
        blade_weight * (std::exp(p.blade_logits[i] - lse) - (static_cast<int>(i) == c ? 1.0 : 0.0));
  return out;
}

}  // namespace fera::mdt
