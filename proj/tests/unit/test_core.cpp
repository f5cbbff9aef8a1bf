// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fera/annotations.hpp"
#include "fera/error.hpp"
#include "fera/labels.hpp"
#include "fera/pose.hpp"
#include "fera/pose_io.hpp"
#include "fera/transcript.hpp"
#include "test_support.hpp"

using namespace fera;

TEST_CASE("move labels round-trip through their names") {
  for (int i = 0; i < kNumMoves; ++i) {
    const MoveLabel m = move_from_index(i);
    CHECK(parse_move(move_name(m)) == m);
    CHECK(move_index(m) == i);
  }
  CHECK(parse_blade("8") == BladeLine::Eight);
  CHECK(parse_blade("other") == BladeLine::Other);
  CHECK(parse_side("right") == Side::Right);
  CHECK_THROWS_AS(parse_move("jump"), ValidationError);
  CHECK_THROWS_AS(parse_blade("5"), ValidationError);
}

TEST_CASE("unknown move names list the full vocabulary") {
  try {
    parse_move("jump");
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    for (int i = 0; i < kNumMoves; ++i) CHECK(what.find(move_name(move_from_index(i))) != std::string::npos);
  }
}

TEST_CASE("move sets format in code order") {
  const MoveSet s = parse_moves("beat+step_forward");
  CHECK(s.size() == 2);
  CHECK(format_moves(s) == "step_forward+beat");
  CHECK(display_moves(s) == "step forward, beat");
  CHECK_THROWS_AS(parse_moves(""), ValidationError);
  CHECK(MoveSet{MoveLabel::StepForward} < MoveSet{MoveLabel::StepBackward});
}

TEST_CASE("mirroring") {
  PoseTrack t;
  t.clip_id = "c";
  t.frame_size = {1280, 720};
  TrackFrame f;
  f.present = true;
  f.skeleton = test::standing_skeleton(300, 600);
  f.skeleton[kLeftWrist].x = 100;
  f.skeleton[kNose].x = 640;
  t.frames.push_back(f);

  const PoseTrack m = mirror_track(t);
  SUBCASE("x maps to W - x with anatomical swap") {
    CHECK(m.frames[0].skeleton[kRightWrist].x == 1180.0);
    CHECK(m.frames[0].skeleton[kRightWrist].y == f.skeleton[kLeftWrist].y);
  }
  SUBCASE("midline is a fixed point") { CHECK(m.frames[0].skeleton[kNose].x == 640.0); }
  SUBCASE("view flag flips") { CHECK(m.mirrored != t.mirrored); }
  SUBCASE("involution is bit-exact") {
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
      PoseTrack r = t;
      r.frames[0].skeleton = test::random_skeleton(rng, 0, 0, 1280, 720);
      CHECK(mirror_track(mirror_track(r)) == r);
    }
  }
  SUBCASE("pairwise distances are preserved") {
    const auto& a = f.skeleton;
    const auto& b = m.frames[0].skeleton;
    for (int i = 0; i < kNumJoints; ++i)
      for (int j = 0; j < kNumJoints; ++j) {
        const double da = std::hypot(a[i].x - a[j].x, a[i].y - a[j].y);
        const double db = std::hypot(b[mirror_joint(i)].x - b[mirror_joint(j)].x,
                                     b[mirror_joint(i)].y - b[mirror_joint(j)].y);
        CHECK(da == doctest::Approx(db).epsilon(1e-12));
      }
  }
  SUBCASE("unknown frame size is rejected") {
    PoseTrack u = t;
    u.frame_size = {};
    CHECK_THROWS_AS(mirror_track(u), ValidationError);
  }
}

TEST_CASE("pose files") {
  SUBCASE("two lines give two frames in order") {
    std::istringstream in(
        R"({"frame": 0, "candidates": []})"
        "\n"
        R"({"frame": 1, "candidates": []})"
        "\n");
    const PoseFile f = parse_pose_stream(in, "two.jsonl");
    REQUIRE(f.frames.size() == 2);
    CHECK(f.frames[0].frame_index == 0);
    CHECK(f.frames[1].frame_index == 1);
  }
  SUBCASE("missing joints cites line and field") {
    std::istringstream in(R"({"frame": 0, "candidates": [{"bbox": [0,0,10,10,0.9]}]})"
                          "\n");
    try {
      parse_pose_stream(in, "bad.jsonl");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(e.field() == "joints");
    }
  }
  SUBCASE("non-monotonic frame index is rejected") {
    std::istringstream in(R"({"frame": 3, "candidates": []})"
                          "\n"
                          R"({"frame": 2, "candidates": []})"
                          "\n");
    CHECK_THROWS_AS(parse_pose_stream(in, "order.jsonl"), ValidationError);
  }
  SUBCASE("write then parse is bit-exact") {
    Rng rng(11);
    PoseFile file;
    file.header = {"clip", {1280, 720}, 25.0};
    for (int i = 0; i < 5; ++i) {
      PoseFrame fr;
      fr.frame_index = i;
      for (int c = 0; c < 2; ++c) {
        PoseCandidate pc;
        pc.skeleton = test::random_skeleton(rng, 0, 0, 1280, 720);
        for (auto& k : pc.skeleton.joints) k.confidence = 1.0;
        pc.bbox = skeleton_bbox(pc.skeleton, 0.1, 0.8);
        fr.candidates.push_back(pc);
      }
      file.frames.push_back(fr);
    }
    std::stringstream ss;
    write_pose_stream(ss, file);
    CHECK(parse_pose_stream(ss, "rt") == file);
  }
  SUBCASE("track files round-trip") {
    PoseTrack t;
    t.clip_id = "clip";
    t.side = Side::Right;
    t.mirrored = true;
    t.frame_size = {1280, 720};
    for (int i = 0; i < 3; ++i) {
      TrackFrame f;
      f.frame_index = 10 + i;
      f.present = i != 1;
      f.skeleton = test::standing_skeleton(400 + i, 600);
      t.frames.push_back(f);
    }
    std::stringstream ss;
    write_track_stream(ss, t);
    CHECK(parse_track_stream(ss, "rt") == t);
  }
}

TEST_CASE("annotations") {
  SUBCASE("single row") {
    std::istringstream in("clip7,left,80,112,step_forward,8\n");
    const auto seqs = parse_annotations_stream(in, "a.csv");
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].clip_id == "clip7");
    CHECK(seqs[0].side == Side::Left);
    REQUIRE(seqs[0].segments.size() == 1);
    const auto& s = seqs[0].segments[0];
    CHECK(s.start_frame == 80);
    CHECK(s.end_frame == 112);
    CHECK(s.moves == MoveSet{MoveLabel::StepForward});
    CHECK(s.blade == BladeLine::Eight);
  }
  SUBCASE("co-occurring labels") {
    std::istringstream in("clip_id,side,start_frame,end_frame,moves,blade\nc,right,0,10,step_forward+beat,6\n");
    const auto seqs = parse_annotations_stream(in, "a.csv");
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].segments[0].moves.size() == 2);
  }
  SUBCASE("same start rows merge, longer row keeps its end") {
    std::istringstream in("c,left,5,20,step_forward,6\nc,left,5,9,beat,4\n");
    const auto seqs = parse_annotations_stream(in, "a.csv");
    REQUIRE(seqs[0].segments.size() == 1);
    CHECK(seqs[0].segments[0].end_frame == 20);
    CHECK(seqs[0].segments[0].blade == BladeLine::Six);
    CHECK(seqs[0].segments[0].moves == MoveSet{MoveLabel::StepForward, MoveLabel::Beat});
  }
  SUBCASE("empty input") {
    std::istringstream in("");
    CHECK(parse_annotations_stream(in, "a.csv").empty());
  }
  SUBCASE("errors") {
    std::istringstream bad_move("c,left,0,5,jump,6\n");
    CHECK_THROWS_AS(parse_annotations_stream(bad_move, "a.csv"), ParseError);
    std::istringstream reversed("c,left,9,5,wait,6\n");
    CHECK_THROWS_AS(parse_annotations_stream(reversed, "a.csv"), ParseError);
  }
  SUBCASE("write then parse") {
    std::istringstream in("b,right,3,7,lunge+hit,6\nb,left,0,4,wait,other\na,left,1,2,parry,4\n");
    const auto seqs = parse_annotations_stream(in, "a.csv");
    std::stringstream ss;
    write_annotations_stream(ss, seqs);
    CHECK(parse_annotations_stream(ss, "rt") == seqs);
    CHECK(seqs[0].clip_id == "a");
  }
}

namespace {

AnnotatedSequence timeline(Side side, std::vector<std::pair<int, int>> spans) {
  AnnotatedSequence s;
  s.clip_id = "c";
  s.side = side;
  for (auto [a, b] : spans) s.segments.push_back({a, b, MoveSet{MoveLabel::StepForward}, BladeLine::Six});
  return s;
}

}  // namespace

TEST_CASE("align_pair") {
  SUBCASE("merged order") {
    const auto t = align_pair(timeline(Side::Left, {{80, 112}, {112, 134}}), timeline(Side::Right, {{83, 110}}));
    REQUIRE(t.events.size() == 3);
    CHECK(t.events[0].start_frame == 80);
    CHECK(t.events[0].side == Side::Left);
    CHECK(t.events[1].start_frame == 83);
    CHECK(t.events[1].side == Side::Right);
    CHECK(t.events[2].start_frame == 112);
  }
  SUBCASE("one empty side") {
    const auto t = align_pair(timeline(Side::Left, {}), timeline(Side::Right, {{1, 2}, {3, 4}}));
    CHECK(t.events.size() == 2);
    for (const auto& e : t.events) CHECK(e.side == Side::Right);
  }
  SUBCASE("ties go left first") {
    const auto t = align_pair(timeline(Side::Left, {{5, 9}}), timeline(Side::Right, {{5, 9}}));
    CHECK(t.events[0].side == Side::Left);
    CHECK(t.events[1].side == Side::Right);
  }
  SUBCASE("mismatched clips") {
    auto r = timeline(Side::Right, {});
    r.clip_id = "other";
    CHECK_THROWS_AS(align_pair(timeline(Side::Left, {}), r), ValidationError);
  }
  SUBCASE("length and order") {
    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
      std::vector<std::pair<int, int>> a, b;
      for (auto* v : {&a, &b}) {
        const int n = rng.uniform_int(0, 6);
        for (int i = 0, t = 0; i < n; ++i, t += rng.uniform_int(1, 10)) v->push_back({t, t + 3});
      }
      const auto tr = align_pair(timeline(Side::Left, a), timeline(Side::Right, b));
      CHECK(tr.events.size() == a.size() + b.size());
      for (std::size_t i = 1; i < tr.events.size(); ++i)
        CHECK(tr.events[i - 1].start_frame <= tr.events[i].start_frame);
      CHECK(swap_sides(swap_sides(tr)) == tr);
    }
  }
}
