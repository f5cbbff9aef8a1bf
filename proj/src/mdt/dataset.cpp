// SPDX-License-Identifier: Apache-2.0
#include "fera/mdt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "fera/error.hpp"

namespace fera::mdt {

ExampleBuild build_examples(const std::vector<std::shared_ptr<const FeatureSequence>>& sequences,
                            const std::vector<AnnotatedSequence>& annotations) {
  std::map<std::pair<std::string, Side>, std::shared_ptr<const FeatureSequence>> by_key;
  for (const auto& s : sequences) by_key[{s->clip_id, s->side}] = s;

  ExampleBuild out;
  for (const auto& a : annotations) {
    const auto it = by_key.find({a.clip_id, a.side});
    if (it == by_key.end()) {
      out.warnings.push_back("no features for " + a.clip_id + "/" + std::string(side_name(a.side)) + "; " +
                             std::to_string(a.segments.size()) + " segments skipped");
      continue;
    }
    const auto& seq = it->second;
    const auto first = seq->first_frame;
    const auto last = first + static_cast<std::int64_t>(seq->size()) - 1;
    for (const auto& seg : a.segments) {
      const std::string where = a.clip_id + "/" + std::string(side_name(a.side)) + " [" +
                                std::to_string(seg.start_frame) + "-" + std::to_string(seg.end_frame) + "]";
      if (seg.start_frame < first || seg.end_frame > last) {
        out.warnings.push_back("segment " + where + " lies outside the feature sequence; skipped");
        continue;
      }
      TrainingExample ex;
      ex.sequence = seq;
      ex.start = static_cast<std::size_t>(seg.start_frame - first);
      ex.end = static_cast<std::size_t>(seg.end_frame - first);
      ex.moves = seg.moves;
      ex.blade = seg.blade;
      const bool any_valid = std::any_of(seq->valid_mask.begin() + static_cast<long>(ex.start),
                                         seq->valid_mask.begin() + static_cast<long>(ex.end) + 1,
                                         [](std::uint8_t v) { return v != 0; });
      if (!any_valid) {
        out.warnings.push_back("segment " + where + " has no valid frame; skipped");
        continue;
      }
      out.examples.push_back(std::move(ex));
    }
  }
  return out;
}

MoveCounts count_moves(const std::vector<TrainingExample>& examples) {
  MoveCounts c{};
  for (const auto& e : examples)
    for (auto m : e.moves.labels()) ++c[static_cast<std::size_t>(move_index(m))];
  return c;
}

BladeCounts count_blades(const std::vector<TrainingExample>& examples) {
  BladeCounts c{};
  for (const auto& e : examples) ++c[static_cast<std::size_t>(blade_index(e.blade))];
  return c;
}

std::vector<double> class_weights(const MoveCounts& counts) {
  std::vector<double> w(counts.size(), 0.0);
  long rarest = 0;
  for (long n : counts)
    if (n > 0 && (rarest == 0 || n < rarest)) rarest = n;
  if (rarest == 0) return std::vector<double>(counts.size(), 1.0);
  for (std::size_t i = 0; i < counts.size(); ++i) w[i] = 1.0 / static_cast<double>(counts[i] > 0 ? counts[i] : rarest);
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  for (auto& v : w) v /= mean;
  return w;
}

RebalanceResult rebalance(std::vector<TrainingExample> examples, const RebalanceConfig& config, Rng& rng) {
  RebalanceResult out;
  if (!config.enabled) {
    out.examples = std::move(examples);
    return out;
  }

  for (int k = 0; k < kNumMoves; ++k) {
    const auto label = move_from_index(k);
    std::vector<std::size_t> holders;
    for (std::size_t i = 0; i < examples.size(); ++i)
      if (examples[i].moves.contains(label)) holders.push_back(i);
    if (holders.empty()) {
      out.warnings.push_back("move class " + std::string(move_name(label)) + " has no examples; not oversampled");
      continue;
    }
    // Counted live: duplicating a multi-label example also raises its other classes.
    auto count = static_cast<long>(holders.size());
    while (count < config.oversample_target) {
      auto copy = examples[holders[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(holders.size()) - 1))]];
      copy.duplicate = true;
      examples.push_back(std::move(copy));
      ++count;
    }
  }

  const auto blades = count_blades(examples);
  const auto six = static_cast<std::size_t>(blade_index(BladeLine::Six));
  double others = 0.0;
  for (std::size_t b = 0; b < blades.size(); ++b)
    if (b != six) others += static_cast<double>(blades[b]);
  const auto cap = static_cast<long>(std::floor(config.blade_six_ratio * others / (kNumBlades - 1)));
  if (others == 0.0) {
    if (blades[six] > 0) out.warnings.push_back("only blade class 6 present; not downsampled");
  } else if (blades[six] > cap) {
    std::vector<std::size_t> six_idx;
    for (std::size_t i = 0; i < examples.size(); ++i)
      if (examples[i].blade == BladeLine::Six) six_idx.push_back(i);
    rng.shuffle(six_idx);
    std::vector<bool> drop(examples.size(), false);
    for (long i = 0; i < blades[six] - cap; ++i) drop[six_idx[static_cast<std::size_t>(i)]] = true;
    std::vector<TrainingExample> kept;
    kept.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i)
      if (!drop[i]) kept.push_back(std::move(examples[i]));
    examples = std::move(kept);
  }
  out.examples = std::move(examples);
  return out;
}

}  // namespace fera::mdt
