// SPDX-License-Identifier: Apache-2.0
#include "fera/pose_io.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "fera/error.hpp"
#include "json.hpp"

namespace fera {

using nlohmann::json;

namespace {

struct LineContext {
  const std::string& source;
  std::size_t line;

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ParseError(source, line, field, what);
  }
};

const json& require(const json& obj, const char* key, const LineContext& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) ctx.fail(key, "missing required field");
  return *it;
}

double number(const json& v, const char* field, const LineContext& ctx) {
  if (!v.is_number()) ctx.fail(field, "expected a number");
  return v.get<double>();
}

Skeleton17 parse_joints(const json& arr, const LineContext& ctx) {
  if (!arr.is_array() || arr.size() != kNumJoints)
    ctx.fail("joints", "expected an array of 17 [x,y,c] triples");
  Skeleton17 s;
  for (int j = 0; j < kNumJoints; ++j) {
    const json& t = arr[static_cast<std::size_t>(j)];
    if (!t.is_array() || t.size() != 3) ctx.fail("joints", "joint " + std::to_string(j) + " is not an [x,y,c] triple");
    Keypoint k{snap_pixel(number(t[0], "joints", ctx)), snap_pixel(number(t[1], "joints", ctx)),
               number(t[2], "joints", ctx)};
    try {
      validate(k);
    } catch (const ValidationError& e) {
      ctx.fail("joints", "joint " + std::to_string(j) + ": " + e.what());
    }
    s[j] = k;
  }
  return s;
}

BoundingBox parse_bbox(const json& arr, const LineContext& ctx) {
  if (!arr.is_array() || arr.size() != 5) ctx.fail("bbox", "expected [x0,y0,x1,y1,conf]");
  BoundingBox b{snap_pixel(number(arr[0], "bbox", ctx)), snap_pixel(number(arr[1], "bbox", ctx)),
                snap_pixel(number(arr[2], "bbox", ctx)), snap_pixel(number(arr[3], "bbox", ctx)),
                number(arr[4], "bbox", ctx)};
  try {
    validate(b);
  } catch (const ValidationError& e) {
    ctx.fail("bbox", e.what());
  }
  return b;
}

PoseCandidate parse_candidate(const json& c, const LineContext& ctx) {
  if (!c.is_object()) ctx.fail("candidates", "candidate must be an object");
  PoseCandidate out;
  out.bbox = parse_bbox(require(c, "bbox", ctx), ctx);
  out.skeleton = parse_joints(require(c, "joints", ctx), ctx);
  return out;
}

json joints_json(const Skeleton17& s) {
  json arr = json::array();
  for (const auto& k : s.joints) arr.push_back(json::array({k.x, k.y, k.confidence}));
  return arr;
}

json candidate_json(const PoseCandidate& c) {
  return json{{"bbox", json::array({c.bbox.x_min, c.bbox.y_min, c.bbox.x_max, c.bbox.y_max, c.bbox.confidence})},
              {"joints", joints_json(c.skeleton)}};
}

bool is_header(const json& obj) { return obj.contains("clip_id") && !obj.contains("frame"); }

PoseFileHeader parse_header(const json& obj, const LineContext& ctx) {
  PoseFileHeader h;
  const json& id = require(obj, "clip_id", ctx);
  if (!id.is_string()) ctx.fail("clip_id", "expected a string");
  h.clip_id = id.get<std::string>();
  if (obj.contains("width")) {
    if (!obj["width"].is_number_integer() || obj["width"].get<int>() <= 0) ctx.fail("width", "expected a positive integer");
    h.frame_size.width = obj["width"].get<int>();
  }
  if (obj.contains("height")) {
    if (!obj["height"].is_number_integer() || obj["height"].get<int>() <= 0) ctx.fail("height", "expected a positive integer");
    h.frame_size.height = obj["height"].get<int>();
  }
  if (obj.contains("fps")) h.fps = number(obj["fps"], "fps", ctx);
  return h;
}

json header_json(const PoseFileHeader& h) {
  return json{{"clip_id", h.clip_id}, {"width", h.frame_size.width}, {"height", h.frame_size.height}, {"fps", h.fps}};
}

template <typename OnHeader, typename OnFrame>
void scan_lines(std::istream& in, const std::string& source, OnHeader&& on_header, OnFrame&& on_frame) {
  std::string text;
  std::size_t line_no = 0;
  bool seen_content = false;
  std::optional<std::int64_t> last_index;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    LineContext ctx{source, line_no};
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      ctx.fail("<line>", std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) ctx.fail("<line>", "expected a JSON object");
    if (is_header(obj)) {
      if (seen_content) ctx.fail("clip_id", "header must be the first line");
      on_header(obj, ctx);
      seen_content = true;
      continue;
    }
    seen_content = true;
    const json& frame = require(obj, "frame", ctx);
    if (!frame.is_number_integer() || frame.get<std::int64_t>() < 0)
      ctx.fail("frame", "expected a non-negative integer");
    const auto index = frame.get<std::int64_t>();
    if (last_index && index <= *last_index)
      ctx.fail("frame", "frame index " + std::to_string(index) + " does not increase (previous " +
                            std::to_string(*last_index) + ")");
    last_index = index;
    on_frame(obj, index, ctx);
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

PoseFile parse_pose_stream(std::istream& in, const std::string& source_name) {
  PoseFile file;
  scan_lines(
      in, source_name, [&](const json& obj, const LineContext& ctx) { file.header = parse_header(obj, ctx); },
      [&](const json& obj, std::int64_t index, const LineContext& ctx) {
        PoseFrame f;
        f.frame_index = index;
        const json& cands = require(obj, "candidates", ctx);
        if (!cands.is_array()) ctx.fail("candidates", "expected an array");
        for (const auto& c : cands) f.candidates.push_back(parse_candidate(c, ctx));
        file.frames.push_back(std::move(f));
      });
  return file;
}

PoseFile parse_pose_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  auto file = parse_pose_stream(in, path.string());
  if (file.header.clip_id.empty()) file.header.clip_id = path.stem().string();
  return file;
}

void write_pose_stream(std::ostream& out, const PoseFile& file) {
  out << header_json(file.header).dump() << '\n';
  for (const auto& f : file.frames) {
    json cands = json::array();
    for (const auto& c : f.candidates) cands.push_back(candidate_json(c));
    out << json{{"frame", f.frame_index}, {"candidates", cands}}.dump() << '\n';
  }
}

void write_pose_file(const std::filesystem::path& path, const PoseFile& file) {
  auto out = open_out(path);
  write_pose_stream(out, file);
  if (!out) throw IoError("failed writing " + path.string());
}

PoseTrack parse_track_stream(std::istream& in, const std::string& source_name) {
  PoseTrack track;
  scan_lines(
      in, source_name,
      [&](const json& obj, const LineContext& ctx) {
        auto h = parse_header(obj, ctx);
        track.clip_id = h.clip_id;
        track.frame_size = h.frame_size;
        track.fps = h.fps;
        if (obj.contains("side")) {
          if (!obj["side"].is_string()) ctx.fail("side", "expected a string");
          try {
            track.side = parse_side(obj["side"].get<std::string>());
          } catch (const ValidationError& e) {
            ctx.fail("side", e.what());
          }
        }
        if (obj.contains("mirrored")) {
          if (!obj["mirrored"].is_boolean()) ctx.fail("mirrored", "expected a boolean");
          track.mirrored = obj["mirrored"].get<bool>();
        }
      },
      [&](const json& obj, std::int64_t index, const LineContext& ctx) {
        TrackFrame f;
        f.frame_index = index;
        const json& cands = require(obj, "candidates", ctx);
        if (!cands.is_array() || cands.size() > 1) ctx.fail("candidates", "track frames hold at most one candidate");
        if (!cands.empty()) f.skeleton = parse_candidate(cands[0], ctx).skeleton;
        f.present = !cands.empty();
        if (obj.contains("present")) {
          if (!obj["present"].is_boolean()) ctx.fail("present", "expected a boolean");
          f.present = obj["present"].get<bool>();
        }
        if (!track.frames.empty() && index != track.frames.back().frame_index + 1)
          ctx.fail("frame", "track frames must be contiguous");
        track.frames.push_back(f);
      });
  return track;
}

PoseTrack parse_track_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  auto track = parse_track_stream(in, path.string());
  if (track.clip_id.empty()) track.clip_id = path.stem().string();
  return track;
}

void write_track_stream(std::ostream& out, const PoseTrack& track) {
  json header = header_json(PoseFileHeader{track.clip_id, track.frame_size, track.fps});
  header["side"] = std::string(side_name(track.side));
  header["mirrored"] = track.mirrored;
  out << header.dump() << '\n';
  for (const auto& f : track.frames) {
    json cands = json::array();
    if (f.skeleton != Skeleton17{}) cands.push_back(candidate_json(PoseCandidate{skeleton_bbox(f.skeleton, 0.0, 1.0), f.skeleton}));
    out << json{{"frame", f.frame_index}, {"present", f.present}, {"candidates", cands}}.dump() << '\n';
  }
}

void write_track_file(const std::filesystem::path& path, const PoseTrack& track) {
  auto out = open_out(path);
  write_track_stream(out, track);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace fera
