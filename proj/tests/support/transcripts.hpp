// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fera/rng.hpp"
#include "fera/transcript.hpp"

namespace fera::test {

inline AnnotatedSequence sequence_of(Side side, std::vector<AnnotationSegment> segments, std::string clip = "bout") {
  return AnnotatedSequence{std::move(clip), side, std::move(segments)};
}

/// Left attacks with two steps (the second with a beat) and lunges onto the
/// target; right retreats, fakes, and counterattacks into the lunge.
inline ExchangeTranscript reference_exchange() {
  using M = MoveLabel;
  const auto left = sequence_of(Side::Left, {{80, 112, {M::StepForward}, BladeLine::Eight},
                                             {112, 134, {M::StepForward, M::Beat}, BladeLine::Eight},
                                             {134, 146, {M::Lunge, M::Hit}, BladeLine::Six}});
  const auto right = sequence_of(Side::Right, {{83, 110, {M::StepBackward}, BladeLine::Six},
                                               {110, 138, {M::Fake}, BladeLine::Six},
                                               {138, 148, {M::Counterattack, M::Hit}, BladeLine::Six}});
  return align_pair(left, right);
}

/// Random single-fencer timeline: footwork with optional blade action, and a
/// final landing move that may carry a hit.
inline AnnotatedSequence random_timeline(Rng& rng, Side side, double hit_prob = 0.5) {
  using M = MoveLabel;
  static const std::vector<M> footwork{M::StepForward, M::StepBackward, M::HalfStepForward, M::HalfStepBackward,
                                       M::Wait,        M::Lunge,        M::Fleche};
  static const std::vector<M> blade{M::Parry, M::Beat, M::Fake, M::Counterattack};
  AnnotatedSequence seq;
  seq.clip_id = "bout";
  seq.side = side;
  int t = rng.uniform_int(0, 6);
  const int n = rng.uniform_int(1, 5);
  for (int i = 0; i < n; ++i) {
    AnnotationSegment s;
    s.start_frame = t;
    s.end_frame = t + rng.uniform_int(3, 20);
    if (rng.bernoulli(0.8)) s.moves.insert(footwork[static_cast<std::size_t>(rng.uniform_int(0, 6))]);
    if (s.moves.empty() || rng.bernoulli(0.3)) s.moves.insert(blade[static_cast<std::size_t>(rng.uniform_int(0, 3))]);
    if (i == n - 1 && rng.bernoulli(hit_prob)) s.moves.insert(M::Hit);
    s.blade = blade_from_index(rng.uniform_int(0, kNumBlades - 1));
    seq.segments.push_back(s);
    t = s.end_frame + (rng.bernoulli(0.5) ? 0 : 1);
  }
  return seq;
}

inline ExchangeTranscript random_exchange(Rng& rng) {
  const auto l = random_timeline(rng, Side::Left);
  const auto r = random_timeline(rng, Side::Right);
  return align_pair(l, r);
}

}  // namespace fera::test
