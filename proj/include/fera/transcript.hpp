// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fera/annotations.hpp"

namespace fera {

struct TranscriptEvent {
  Side side = Side::Left;
  int start_frame = 0;
  int end_frame = 0;
  MoveSet moves;
  BladeLine blade = BladeLine::Six;

  friend bool operator==(const TranscriptEvent&, const TranscriptEvent&) = default;
};

/// Both fencers' events on the shared clip time axis.
struct ExchangeTranscript {
  std::string clip_id;
  std::vector<TranscriptEvent> events;

  friend bool operator==(const ExchangeTranscript&, const ExchangeTranscript&) = default;
};

/// Merges two single-fencer timelines ordered by start frame; equal starts put
/// the left fencer first. Throws ValidationError on clip_id mismatch or when
/// the sides are not left/right.
ExchangeTranscript align_pair(const AnnotatedSequence& left, const AnnotatedSequence& right);

/// Exchanges the two fencers (used by the antisymmetry checks).
ExchangeTranscript swap_sides(const ExchangeTranscript& t);

/// Events of one side in transcript order.
std::vector<TranscriptEvent> side_events(const ExchangeTranscript& t, Side side);

}  // namespace fera
