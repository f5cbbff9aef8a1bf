// SPDX-License-Identifier: Apache-2.0
#include "fera/mdt/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace fera::mdt {

double LrSchedule::at(double epoch) const {
  if (epoch < warmup_epochs) return base_lr * std::max(epoch, 0.0) / warmup_epochs;
  const double decay_start = warmup_epochs + flat_epochs;
  if (epoch <= decay_start) return base_lr;
  const double span = total_epochs - decay_start;
  if (span <= 0.0) return base_lr;
  const double progress = std::min((epoch - decay_start) / span, 1.0);
  return 0.5 * base_lr * (1.0 + std::cos(std::numbers::pi * progress));
}

double global_grad_norm(const ModelWeights& grads) {
  double sq = 0.0;
  grads.for_each([&](const std::string&, const Mat& g) { sq += g.squaredNorm(); });
  return std::sqrt(sq);
}

double clip_grad_norm(ModelWeights& grads, double max_norm) {
  const double norm = global_grad_norm(grads);
  if (norm > max_norm && std::isfinite(norm)) {
    const double s = max_norm / norm;
    grads.for_each([&](const std::string&, Mat& g) { g *= s; });
  }
  return norm;
}

std::optional<std::string> first_non_finite(const ModelWeights& grads) {
  std::optional<std::string> bad;
  grads.for_each([&](const std::string& name, const Mat& g) {
    if (!bad && !g.allFinite()) bad = name;
  });
  return bad;
}

AdamW::AdamW(const ModelConfig& model, const TrainConfig& train)
    : train_(train), m_(ModelWeights::zeros(model)), v_(ModelWeights::zeros(model)) {}

std::optional<std::string> AdamW::step(ModelWeights& weights, const ModelWeights& grads, double lr) {
  if (auto bad = first_non_finite(grads)) return bad;
  ++steps_;
  const double b1 = train_.beta1, b2 = train_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));

  std::vector<const Mat*> g;
  grads.for_each([&](const std::string&, const Mat& t) { g.push_back(&t); });
  std::vector<Mat*> m, v;
  m_.for_each([&](const std::string&, Mat& t) { m.push_back(&t); });
  v_.for_each([&](const std::string&, Mat& t) { v.push_back(&t); });

  std::size_t i = 0;
  weights.for_each([&](const std::string&, Mat& w) {
    *m[i] = b1 * *m[i] + (1.0 - b1) * *g[i];
    *v[i] = b2 * *v[i] + (1.0 - b2) * g[i]->cwiseAbs2();
    w *= 1.0 - lr * train_.weight_decay;
    w.array() -= lr * (m[i]->array() / c1) / ((v[i]->array() / c2).sqrt() + train_.adam_eps);
    ++i;
  });
  return std::nullopt;
}

}  // namespace fera::mdt
