// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>
#include <vector>

#include "fera/mdt/model.hpp"
#include "fera/windowing.hpp"

namespace fera::test {

struct PlantedAction {
  long start = 0;  // sequence indices, inclusive
  long end = 0;
  MoveSet moves;
  BladeLine blade = BladeLine::Six;

  long length() const { return end - start + 1; }
};

/// Window classifier with known confidences: a class scores the fraction of
/// the window covered by actions carrying it, once the window holds at least
/// min(10, action length) frames of one such action; otherwise 0.01.
class StubClassifier final : public WindowClassifier {
public:
  explicit StubClassifier(std::vector<PlantedAction> actions, double floor = 0.01)
      : actions_(std::move(actions)), floor_(floor) {}

  std::optional<mdt::Prediction> classify(const FeatureSequence&, std::size_t start, std::size_t end) override {
    ++calls;
    const auto s = static_cast<long>(start), e = static_cast<long>(end);
    const double w = static_cast<double>(e - s + 1);
    mdt::Prediction p;
    p.move_probs.assign(kNumMoves, floor_);
    p.blade_probs.assign(kNumBlades, 0.1);
    std::array<long, kNumMoves> covered{};
    std::array<bool, kNumMoves> enough{};
    long best_inside = 0;
    for (const auto& a : actions_) {
      const long inside = std::max(0L, std::min(e, a.end) - std::max(s, a.start) + 1);
      if (inside == 0) continue;
      for (auto m : a.moves.labels()) {
        covered[static_cast<std::size_t>(move_index(m))] += inside;
        if (inside >= std::min(10L, a.length())) enough[static_cast<std::size_t>(move_index(m))] = true;
      }
      if (inside > best_inside) {
        best_inside = inside;
        p.blade_probs.assign(kNumBlades, 0.1);
        p.blade_probs[static_cast<std::size_t>(blade_index(a.blade))] = 0.6;
      }
    }
    for (std::size_t c = 0; c < kNumMoves; ++c)
      if (enough[c]) p.move_probs[c] = static_cast<double>(covered[c]) / w;
    for (double v : p.move_probs) {
      p.move_logits.push_back(std::log(std::max(v, 1e-12) / std::max(1.0 - v, 1e-12)));
    }
    for (double v : p.blade_probs) p.blade_logits.push_back(std::log(v));
    return p;
  }

  long calls = 0;

private:
  std::vector<PlantedAction> actions_;
  double floor_;
};

inline FeatureSequence blank_sequence(std::size_t frames, std::int64_t first_frame = 0) {
  FeatureSequence seq;
  seq.frames.assign(frames, FeatureFrame{});
  seq.valid_mask.assign(frames, 1);
  seq.joint_masks.assign(frames, 0x0FFF);
  seq.flags.assign(frames, 0);
  seq.first_frame = first_frame;
  return seq;
}

/// Exhaustive reference for greedy NMS: repeatedly take the best remaining
/// action and delete everything it suppresses.
inline std::vector<DetectedAction> oracle_nms(std::vector<DetectedAction> pool, double threshold) {
  std::vector<DetectedAction> kept;
  while (!pool.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      const auto& a = pool[i];
      const auto& b = pool[best];
      const double ca = a.max_confidence(), cb = b.max_confidence();
      if (ca > cb || (ca == cb && std::tuple(a.start_frame, a.moves.mask(), a.end_frame) <
                                      std::tuple(b.start_frame, b.moves.mask(), b.end_frame)))
        best = i;
    }
    const auto winner = pool[best];
    kept.push_back(winner);
    std::vector<DetectedAction> rest;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (i == best) continue;
      const auto& a = pool[i];
      const long inter = std::max<long>(0, std::min(a.end_frame, winner.end_frame) -
                                               std::max(a.start_frame, winner.start_frame) + 1);
      const double iou = static_cast<double>(inter) / static_cast<double>(a.length() + winner.length() - inter);
      if (!(a.moves.intersects(winner.moves) && iou > threshold)) rest.push_back(a);
    }
    pool = std::move(rest);
  }
  std::sort(kept.begin(), kept.end(), [](const DetectedAction& x, const DetectedAction& y) {
    return std::tuple(x.start_frame, x.end_frame, x.moves.mask()) < std::tuple(y.start_frame, y.end_frame, y.moves.mask());
  });
  return kept;
}

}  // namespace fera::test
