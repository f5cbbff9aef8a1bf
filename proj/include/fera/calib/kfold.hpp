// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fera::calib {

struct Fold {
  std::vector<std::string> train, val, test;
};

/// Clip-level folds. Clips are shuffled and cut into 2·k chunks; fold i
/// validates on chunk 2i, tests on chunk 2i+1 and trains on the rest, so
/// each fold is 80/10/10 for k = 5 and test sets never overlap.
std::vector<Fold> kfold_split(std::vector<std::string> clip_ids, std::uint64_t seed, int folds = 5);

}  // namespace fera::calib
