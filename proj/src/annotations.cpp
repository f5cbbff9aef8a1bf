// SPDX-License-Identifier: Apache-2.0
#include "fera/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "fera/error.hpp"

namespace fera {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = line.find(',', pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

int parse_int(std::string_view s, const std::string& source, std::size_t line, const char* field) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0)
    throw ParseError(source, line, field, "expected a non-negative integer, got \"" + std::string(s) + "\"");
  return v;
}

}  // namespace

std::vector<AnnotatedSequence> parse_annotations_stream(std::istream& in, const std::string& source_name) {
  std::map<std::pair<std::string, Side>, std::vector<AnnotationSegment>> groups;
  std::string text;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, text)) {
    ++line_no;
    std::string_view line = trim(text);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line);
    if (first_content && !fields.empty() && fields[0] == "clip_id") {
      first_content = false;
      continue;
    }
    first_content = false;
    if (fields.size() != 6)
      throw ParseError(source_name, line_no, "<row>", "expected 6 columns, got " + std::to_string(fields.size()));
    if (fields[0].empty()) throw ParseError(source_name, line_no, "clip_id", "must not be empty");
    Side side;
    AnnotationSegment seg;
    try {
      side = parse_side(fields[1]);
    } catch (const ValidationError& e) {
      throw ParseError(source_name, line_no, "side", e.what());
    }
    seg.start_frame = parse_int(fields[2], source_name, line_no, "start_frame");
    seg.end_frame = parse_int(fields[3], source_name, line_no, "end_frame");
    if (seg.end_frame < seg.start_frame)
      throw ParseError(source_name, line_no, "end_frame", "end frame precedes start frame");
    try {
      seg.moves = parse_moves(fields[4]);
    } catch (const ValidationError& e) {
      throw ParseError(source_name, line_no, "moves", e.what());
    }
    try {
      seg.blade = parse_blade(fields[5]);
    } catch (const ValidationError& e) {
      throw ParseError(source_name, line_no, "blade", e.what());
    }
    groups[{std::string(fields[0]), side}].push_back(seg);
  }

  std::vector<AnnotatedSequence> out;
  for (auto& [key, segs] : groups) {
    std::stable_sort(segs.begin(), segs.end(),
                     [](const auto& a, const auto& b) { return a.start_frame < b.start_frame; });
    AnnotatedSequence seq{key.first, key.second, {}};
    for (const auto& s : segs) {
      if (!seq.segments.empty() && seq.segments.back().start_frame == s.start_frame) {
        auto& merged = seq.segments.back();
        merged.moves = merged.moves.united(s.moves);
        if (s.end_frame > merged.end_frame) {
          merged.end_frame = s.end_frame;
          merged.blade = s.blade;
        }
        continue;
      }
      seq.segments.push_back(s);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<AnnotatedSequence> parse_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_annotations_stream(in, path.string());
}

void write_annotations_stream(std::ostream& out, const std::vector<AnnotatedSequence>& sequences) {
  out << "clip_id,side,start_frame,end_frame,moves,blade\n";
  for (const auto& seq : sequences)
    for (const auto& s : seq.segments)
      out << seq.clip_id << ',' << side_name(seq.side) << ',' << s.start_frame << ',' << s.end_frame << ','
          << format_moves(s.moves) << ',' << blade_name(s.blade) << '\n';
}

void write_annotations(const std::filesystem::path& path, const std::vector<AnnotatedSequence>& sequences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_annotations_stream(out, sequences);
}

}  // namespace fera
