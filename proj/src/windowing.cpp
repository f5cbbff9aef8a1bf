// SPDX-License-Identifier: Apache-2.0
#include "fera/windowing.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "fera/calib/thresholds.hpp"
#include "fera/error.hpp"
#include "fera/mdt/augment.hpp"
#include "fera/text.hpp"

namespace fera {

namespace {

DetectedAction make_action(const FeatureSequence& seq, std::size_t start, std::size_t end, const mdt::Prediction& p,
                           const calib::ThresholdSet& thresholds) {
  DetectedAction a;
  a.start_frame = seq.first_frame + static_cast<std::int64_t>(start);
  a.end_frame = seq.first_frame + static_cast<std::int64_t>(end);
  a.moves = calib::decide_moves(p, thresholds);
  for (int c = 0; c < kNumMoves; ++c)
    a.move_confidence[static_cast<std::size_t>(c)] = p.move_probs.at(static_cast<std::size_t>(c));
  a.blade = calib::decide_blade(p);
  a.blade_confidence = p.blade_probs.at(static_cast<std::size_t>(blade_index(a.blade)));
  return a;
}

struct HalfStepPair {
  MoveLabel half;
  MoveLabel full;
};
constexpr std::array<HalfStepPair, 2> kHalfSteps = {{
    {MoveLabel::HalfStepForward, MoveLabel::StepForward},
    {MoveLabel::HalfStepBackward, MoveLabel::StepBackward},
}};

std::vector<DetectedAction> merge_half_steps(std::vector<DetectedAction> raw, const ScanConfig& config) {
  std::vector<DetectedAction> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto a = raw[i];
    if (i + 1 < raw.size()) {
      const auto& next = raw[i + 1];
      for (const auto& [half, full] : kHalfSteps) {
        if (!a.moves.contains(half) || !next.moves.contains(full)) continue;
        if (next.start_frame - a.end_frame > config.half_step_lookahead) continue;
        if (next.end_frame - a.start_frame + 1 > config.max_window) continue;
        DetectedAction m = next;
        m.start_frame = a.start_frame;
        m.moves = a.moves.united(next.moves);
        m.moves.erase(half);
        for (std::size_t c = 0; c < m.move_confidence.size(); ++c)
          m.move_confidence[c] = std::max(a.move_confidence[c], next.move_confidence[c]);
        a = m;
        ++i;
        break;
      }
    }
    out.push_back(a);
  }
  return out;
}

}  // namespace

double DetectedAction::max_confidence() const noexcept {
  double m = 0.0;
  for (int c = 0; c < kNumMoves; ++c)
    if (moves.contains(move_from_index(c))) m = std::max(m, move_confidence[static_cast<std::size_t>(c)]);
  return m;
}

ModelClassifier::ModelClassifier(const mdt::ModelWeights& weights, calib::TemperatureSet temperatures,
                                 FeatureSubset subset)
    : weights_(weights), temperatures_(temperatures), subset_(subset) {
  temperatures_.validate();
}

std::optional<mdt::Prediction> ModelClassifier::classify(const FeatureSequence& seq, std::size_t start,
                                                         std::size_t end) {
  const auto x = mdt::slice_features(seq, start, end, subset_);
  if (std::none_of(x.mask.begin(), x.mask.end(), [](std::uint8_t v) { return v != 0; })) return std::nullopt;
  const auto p = mdt::forward(weights_, x.features, x.mask);
  return mdt::make_prediction(p.move_logits, p.blade_logits, temperatures_.values());
}

bool is_confident(const mdt::Prediction& p, const calib::ThresholdSet& thresholds) {
  for (int c = 0; c < kNumMoves; ++c)
    if (p.move_probs.at(static_cast<std::size_t>(c)) >= thresholds.tau[static_cast<std::size_t>(c)]) return true;
  return false;
}

std::vector<DetectedAction> scan(const FeatureSequence& features, WindowClassifier& classifier,
                                 const calib::ThresholdSet& thresholds, const ScanConfig& config, ScanStats* stats) {
  if (config.initial_window < 1 || config.max_window < config.initial_window)
    throw ValidationError("window sizes must satisfy 1 <= initial <= max");
  ScanStats local;
  ScanStats& st = stats ? *stats : local;
  const std::size_t T = features.size();
  const auto w_max = static_cast<std::size_t>(config.max_window);
  std::vector<DetectedAction> raw;

  std::size_t s = 0;
  while (s < T) {
    std::optional<DetectedAction> best;
    for (auto w = static_cast<std::size_t>(config.initial_window); w <= w_max && s + w - 1 < T; ++w) {
      const auto p = classifier.classify(features, s, s + w - 1);
      ++st.forward_passes;
      if (!p || !is_confident(*p, thresholds)) {
        if (best) break;
        continue;
      }
      auto a = make_action(features, s, s + w - 1, *p, thresholds);
      if (best && (a.moves != best->moves || a.max_confidence() < best->max_confidence())) break;
      best = a;
    }
    if (best) {
      s = static_cast<std::size_t>(best->end_frame - features.first_frame) + 1;
      raw.push_back(*best);
    } else {
      ++st.resets;
      ++s;
    }
  }
  if (st.forward_passes > static_cast<long>(T * w_max)) throw std::logic_error("window scan exceeded its pass bound");
  return merge_half_steps(std::move(raw), config);
}

double temporal_iou(const DetectedAction& a, const DetectedAction& b) {
  const auto inter = std::max<std::int64_t>(0, std::min(a.end_frame, b.end_frame) -
                                                   std::max(a.start_frame, b.start_frame) + 1);
  const auto uni = a.length() + b.length() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

ActionTimeline merge_nms(std::vector<DetectedAction> actions, double overlap_threshold, std::string clip_id,
                         Side side) {
  std::sort(actions.begin(), actions.end(), [](const DetectedAction& x, const DetectedAction& y) {
    const double cx = x.max_confidence(), cy = y.max_confidence();
    if (cx != cy) return cx > cy;
    return std::tuple(x.start_frame, x.moves.mask(), x.end_frame) < std::tuple(y.start_frame, y.moves.mask(), y.end_frame);
  });
  ActionTimeline out;
  out.clip_id = std::move(clip_id);
  out.side = side;
  for (auto& a : actions) {
    const bool suppressed = std::any_of(out.actions.begin(), out.actions.end(), [&](const DetectedAction& k) {
      return k.moves.intersects(a.moves) && temporal_iou(k, a) > overlap_threshold;
    });
    if (!suppressed) out.actions.push_back(std::move(a));
  }
  std::sort(out.actions.begin(), out.actions.end(), [](const DetectedAction& x, const DetectedAction& y) {
    return std::tuple(x.start_frame, x.end_frame, x.moves.mask()) < std::tuple(y.start_frame, y.end_frame, y.moves.mask());
  });
  return out;
}

DetectedAction decode_trimmed(const FeatureSequence& features, WindowClassifier& classifier,
                              const calib::ThresholdSet& thresholds) {
  if (features.size() == 0) throw ValidationError("cannot decode an empty segment");
  const auto p = classifier.classify(features, 0, features.size() - 1);
  if (!p) throw ValidationError("empty sequence");
  return make_action(features, 0, features.size() - 1, *p, thresholds);
}

void write_timeline_csv(std::ostream& out, const std::vector<ActionTimeline>& timelines) {
  out << "clip_id,side,start,end,moves,blade,confidence\n";
  for (const auto& t : timelines)
    for (const auto& a : t.actions)
      out << t.clip_id << ',' << side_name(t.side) << ',' << a.start_frame << ',' << a.end_frame << ','
          << (a.moves.empty() ? std::string("none") : format_moves(a.moves)) << ',' << blade_name(a.blade) << ','
          << format_fixed(a.max_confidence(), 6) << '\n';
}

}  // namespace fera
