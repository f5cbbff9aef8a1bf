// SPDX-License-Identifier: Apache-2.0
#include "fera/mdt/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fera/error.hpp"
#include "fera/hash.hpp"
#include "fera/mdt/augment.hpp"
#include "fera/mdt/loss.hpp"
#include "fera/mdt/optim.hpp"
#include "fera/rng.hpp"

namespace fera::mdt {

namespace {

bool any_valid(const std::vector<std::uint8_t>& mask) {
  return std::any_of(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; });
}

void check_input_dim(const ModelWeights& w, FeatureSubset subset) {
  if (w.config.input_dim != subset_dim(subset))
    throw ValidationError("model input_dim " + std::to_string(w.config.input_dim) + " does not match feature subset " +
                          std::string(subset_name(subset)) + " (" + std::to_string(subset_dim(subset)) + ")");
}

}  // namespace

double evaluate_loss(const ModelWeights& weights, const std::vector<TrainingExample>& examples, FeatureSubset subset,
                     std::span<const double> class_weights, double blade_weight) {
  if (examples.empty()) throw ValidationError("cannot evaluate loss on an empty example set");
  check_input_dim(weights, subset);
  double sum = 0.0;
  for (const auto& ex : examples) {
    const auto x = materialize(ex, subset);
    const auto p = forward(weights, x.features, x.mask);
    sum += example_loss(p, x.moves, x.blade, class_weights, blade_weight).total;
  }
  return sum / static_cast<double>(examples.size());
}

std::vector<Prediction> predict(const ModelWeights& weights, const std::vector<TrainingExample>& examples,
                                FeatureSubset subset) {
  check_input_dim(weights, subset);
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    const auto x = materialize(ex, subset);
    out.push_back(forward(weights, x.features, x.mask));
  }
  return out;
}

TrainReport train(ModelWeights& weights, const std::vector<TrainingExample>& examples, const TrainOptions& options) {
  const auto& tc = options.train;
  tc.validate();
  check_input_dim(weights, options.subset);
  if (examples.empty()) throw ValidationError("training set is empty");

  TrainReport report;
  report.class_weights =
      options.class_weights.empty() ? class_weights(count_moves(examples)) : options.class_weights;
  if (report.class_weights.size() != static_cast<std::size_t>(kNumMoves))
    throw ValidationError("expected 12 class weights");
  const double blade_weight = tc.effective_blade_weight();
  report.initial_loss = evaluate_loss(weights, examples, options.subset, report.class_weights, blade_weight);

  Rng rng(tc.seed);
  AdamW opt(weights.config, tc);
  const auto schedule = LrSchedule::from(tc);
  auto grads = ModelWeights::zeros(weights.config);
  ForwardCache cache;
  const auto batch = static_cast<std::size_t>(tc.batch_size);
  const std::size_t batches = (examples.size() + batch - 1) / batch;

  std::vector<std::size_t> order(examples.size());
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    EpochStats stats;
    stats.epoch = epoch;
    double loss_sum = 0.0, norm_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t lo = b * batch, hi = std::min(examples.size(), lo + batch);
      grads.set_zero();
      const double inv = 1.0 / static_cast<double>(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) {
        const auto& ex = examples[order[i]];
        auto x = augment(ex, options.subset, options.augment, rng);
        if (!any_valid(x.mask)) x = materialize(ex, options.subset);
        const auto p = forward(weights, x.features, x.mask, {.train = true, .rng = &rng, .cache = &cache});
        auto loss = example_loss(p, x.moves, x.blade, report.class_weights, blade_weight);
        loss_sum += loss.total;
        ++seen;
        backward(weights, cache, loss.dlogits * inv, grads);
      }
      const double lr = schedule.at(epoch + static_cast<double>(b + 1) / static_cast<double>(batches));
      const double norm = clip_grad_norm(grads, tc.clip_norm);
      norm_sum += norm;
      if (const auto bad = opt.step(weights, grads, lr)) {
        ++report.skipped_steps;
        report.diagnostics.push_back("epoch " + std::to_string(epoch) + " batch " + std::to_string(b) +
                                     ": non-finite gradient in " + *bad + "; step skipped");
      } else {
        ++report.steps;
      }
      stats.lr = lr;
    }
    stats.mean_loss = loss_sum / static_cast<double>(seen);
    stats.mean_grad_norm = norm_sum / static_cast<double>(batches);
    report.epochs.push_back(stats);
    if (options.on_epoch) options.on_epoch(stats);
  }
  report.final_loss = evaluate_loss(weights, examples, options.subset, report.class_weights, blade_weight);
  return report;
}

std::uint64_t data_hash(const std::vector<TrainingExample>& examples) {
  Fnv1a h;
  for (const auto& ex : examples) {
    h.update(ex.sequence->clip_id);
    h.update_value(static_cast<std::uint8_t>(ex.sequence->side));
    h.update_value(static_cast<std::uint64_t>(ex.start));
    h.update_value(static_cast<std::uint64_t>(ex.end));
    h.update_value(ex.moves.mask());
    h.update_value(static_cast<std::uint8_t>(ex.blade));
    for (auto t = ex.start; t <= ex.end; ++t) h.update(ex.sequence->frames[t].data(), sizeof(FeatureFrame));
  }
  return h.digest();
}

}  // namespace fera::mdt
