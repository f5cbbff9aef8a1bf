// SPDX-License-Identifier: Apache-2.0
#include "fera/mdt/augment.hpp"

#include <algorithm>
#include <cmath>

#include "fera/error.hpp"

namespace fera::mdt {

namespace {

// Frames of history needed so velocities and accelerations at the window
// start match a full-sequence computation.
constexpr std::size_t kDerivativeContext = 2;

}  // namespace

AugmentParams sample_augment(const AugmentConfig& config, Rng& rng) {
  // Every draw happens regardless of mode so the stream stays aligned.
  AugmentParams p;
  const int shift = rng.uniform_int(-config.jitter_max, config.jitter_max);
  const std::uint64_t seed = rng.next_u64();
  const double rotation = rng.uniform(-config.rotation_max, config.rotation_max);
  const double scale = rng.uniform(config.scale_min, config.scale_max);
  if (config.temporal()) p.shift = shift;
  if (config.noise()) {
    p.noise_sigma = config.noise_sigma;
    p.noise_seed = seed;
  }
  if (config.geometric()) {
    p.rotation = rotation;
    p.scale = scale;
  }
  return p;
}

ExampleTensor slice_features(const FeatureSequence& seq, std::size_t start, std::size_t end, FeatureSubset subset) {
  if (start > end || end >= seq.size()) throw ValidationError("feature slice out of range");
  const int dim = subset_dim(subset);
  ExampleTensor out;
  const auto T = static_cast<Eigen::Index>(end - start + 1);
  out.features.resize(T, dim);
  out.mask.resize(static_cast<std::size_t>(T));
  for (Eigen::Index r = 0; r < T; ++r) {
    const auto& f = seq.frames[start + static_cast<std::size_t>(r)];
    for (int c = 0; c < dim; ++c) out.features(r, c) = f[static_cast<std::size_t>(c)];
    out.mask[static_cast<std::size_t>(r)] = seq.valid_mask[start + static_cast<std::size_t>(r)];
  }
  return out;
}

ExampleTensor materialize(const TrainingExample& example, FeatureSubset subset) {
  auto out = slice_features(*example.sequence, example.start, example.end, subset);
  out.moves = example.moves;
  out.blade = example.blade;
  return out;
}

ExampleTensor materialize(const TrainingExample& example, FeatureSubset subset, const AugmentParams& params) {
  if (params.identity()) return materialize(example, subset);
  const auto& seq = *example.sequence;
  const auto n = static_cast<long>(seq.size());
  long lo = static_cast<long>(example.start) + params.shift;
  long hi = static_cast<long>(example.end) + params.shift;
  if (lo < 0) {
    hi -= lo;
    lo = 0;
  }
  if (hi > n - 1) {
    lo = std::max(0L, lo - (hi - (n - 1)));
    hi = n - 1;
  }
  const auto from = static_cast<std::size_t>(std::max(0L, lo - static_cast<long>(kDerivativeContext)));

  Rng noise(params.noise_seed);
  const double c = std::cos(params.rotation), s = std::sin(params.rotation);
  std::vector<NormalizedSkeleton> skeletons;
  skeletons.reserve(static_cast<std::size_t>(hi) - from + 1);
  for (auto t = from; t <= static_cast<std::size_t>(hi); ++t) {
    auto sk = stored_skeleton(seq, t);
    if (sk.valid) {
      for (int j = 0; j < kBodyJoints; ++j) {
        if (!((sk.joint_mask >> j) & 1u)) continue;
        Vec2 p = sk.joints[j];
        if (params.noise_sigma > 0.0) {
          p.x += noise.normal(0.0, params.noise_sigma);
          p.y += noise.normal(0.0, params.noise_sigma);
        }
        p = Vec2{c * p.x - s * p.y, s * p.x + c * p.y};
        sk.joints[j] = params.scale * p;
      }
    }
    skeletons.push_back(sk);
  }
  auto recomputed = assemble_from_normalized(skeletons);
  auto out = slice_features(recomputed, static_cast<std::size_t>(lo) - from, static_cast<std::size_t>(hi) - from,
                            subset);
  out.moves = example.moves;
  out.blade = example.blade;
  return out;
}

ExampleTensor augment(const TrainingExample& example, FeatureSubset subset, const AugmentConfig& config, Rng& rng) {
  return materialize(example, subset, sample_augment(config, rng));
}

}  // namespace fera::mdt
