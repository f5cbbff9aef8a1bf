// SPDX-License-Identifier: Apache-2.0
#include "fera/transcript.hpp"

#include <algorithm>

#include "fera/error.hpp"

namespace fera {

namespace {

void sort_events(std::vector<TranscriptEvent>& events) {
  std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    if (a.start_frame != b.start_frame) return a.start_frame < b.start_frame;
    return a.side == Side::Left && b.side == Side::Right;
  });
}

}  // namespace

ExchangeTranscript align_pair(const AnnotatedSequence& left, const AnnotatedSequence& right) {
  if (left.clip_id != right.clip_id)
    throw ValidationError("cannot align clips \"" + left.clip_id + "\" and \"" + right.clip_id + "\"");
  if (left.side != Side::Left || right.side != Side::Right)
    throw ValidationError("align_pair expects a left and a right timeline for clip \"" + left.clip_id + "\"");
  ExchangeTranscript t{left.clip_id, {}};
  t.events.reserve(left.segments.size() + right.segments.size());
  for (const auto* seq : {&left, &right})
    for (const auto& s : seq->segments)
      t.events.push_back(TranscriptEvent{seq->side, s.start_frame, s.end_frame, s.moves, s.blade});
  sort_events(t.events);
  return t;
}

ExchangeTranscript swap_sides(const ExchangeTranscript& t) {
  ExchangeTranscript out = t;
  for (auto& e : out.events) e.side = opposite(e.side);
  sort_events(out.events);
  return out;
}

std::vector<TranscriptEvent> side_events(const ExchangeTranscript& t, Side side) {
  std::vector<TranscriptEvent> out;
  for (const auto& e : t.events)
    if (e.side == side) out.push_back(e);
  return out;
}

}  // namespace fera
