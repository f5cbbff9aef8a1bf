// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fera/pose.hpp"

namespace fera {

struct PoseFileHeader {
  std::string clip_id;
  FrameSize frame_size;
  double fps = 25.0;

  friend bool operator==(const PoseFileHeader&, const PoseFileHeader&) = default;
};

struct PoseFile {
  PoseFileHeader header;
  std::vector<PoseFrame> frames;

  friend bool operator==(const PoseFile&, const PoseFile&) = default;
};

// JSON Lines pose files. The optional first line is a header object
// {"clip_id", "width", "height", "fps"}; every other line is a frame
// {"frame": int, "candidates": [{"bbox": [x0,y0,x1,y1,conf], "joints": [[x,y,c] x 17]}]}.
// Line numbers in errors are 1-based physical lines.

PoseFile parse_pose_stream(std::istream& in, const std::string& source_name);
PoseFile parse_pose_file(const std::filesystem::path& path);
void write_pose_stream(std::ostream& out, const PoseFile& file);
void write_pose_file(const std::filesystem::path& path, const PoseFile& file);

// Track files reuse the schema: the header additionally carries "side" and
// "mirrored", each frame carries "present" and at most one candidate.

PoseTrack parse_track_stream(std::istream& in, const std::string& source_name);
PoseTrack parse_track_file(const std::filesystem::path& path);
void write_track_stream(std::ostream& out, const PoseTrack& track);
void write_track_file(const std::filesystem::path& path, const PoseTrack& track);

}  // namespace fera
