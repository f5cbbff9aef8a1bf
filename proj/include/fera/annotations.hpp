// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fera/labels.hpp"

namespace fera {

/// One labeled interval of a single-fencer sequence (inclusive frames).
struct AnnotationSegment {
  int start_frame = 0;
  int end_frame = 0;
  MoveSet moves;
  BladeLine blade = BladeLine::Six;

  int length() const noexcept { return end_frame - start_frame + 1; }
  friend bool operator==(const AnnotationSegment&, const AnnotationSegment&) = default;
};

/// Segments of one fencer in one clip, sorted by start frame with unique starts.
struct AnnotatedSequence {
  std::string clip_id;
  Side side = Side::Left;
  std::vector<AnnotationSegment> segments;

  friend bool operator==(const AnnotatedSequence&, const AnnotatedSequence&) = default;
};

/// CSV rows `clip_id,side,start_frame,end_frame,moves,blade`. A header row is
/// optional. Rows of one (clip, side) sharing a start frame are merged: the
/// label sets are united and the longer row supplies the end frame and blade.
/// Output is ordered by clip_id, then left before right.
std::vector<AnnotatedSequence> parse_annotations_stream(std::istream& in, const std::string& source_name);
std::vector<AnnotatedSequence> parse_annotations(const std::filesystem::path& path);

void write_annotations_stream(std::ostream& out, const std::vector<AnnotatedSequence>& sequences);
void write_annotations(const std::filesystem::path& path, const std::vector<AnnotatedSequence>& sequences);

}  // namespace fera
