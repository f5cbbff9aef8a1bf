// SPDX-License-Identifier: Apache-2.0
#include "fera/calib/kfold.hpp"

#include <algorithm>

#include "fera/error.hpp"
#include "fera/rng.hpp"

namespace fera::calib {

std::vector<Fold> kfold_split(std::vector<std::string> clip_ids, std::uint64_t seed, int folds) {
  if (folds < 1) throw ValidationError("fold count must be positive");
  std::sort(clip_ids.begin(), clip_ids.end());
  clip_ids.erase(std::unique(clip_ids.begin(), clip_ids.end()), clip_ids.end());
  const auto chunks = static_cast<std::size_t>(2 * folds);
  if (clip_ids.size() < chunks)
    throw ValidationError("need at least " + std::to_string(chunks) + " distinct clips for " + std::to_string(folds) +
                          "-fold splitting, got " + std::to_string(clip_ids.size()));
  Rng rng(seed);
  rng.shuffle(clip_ids);

  const std::size_t n = clip_ids.size();
  auto bound = [&](std::size_t k) { return k * n / chunks; };
  std::vector<Fold> out(static_cast<std::size_t>(folds));
  for (std::size_t f = 0; f < out.size(); ++f) {
    for (std::size_t k = 0; k < chunks; ++k) {
      auto& dst = k == 2 * f ? out[f].val : k == 2 * f + 1 ? out[f].test : out[f].train;
      dst.insert(dst.end(), clip_ids.begin() + static_cast<long>(bound(k)),
                 clip_ids.begin() + static_cast<long>(bound(k + 1)));
    }
  }
  return out;
}

}  // namespace fera::calib
