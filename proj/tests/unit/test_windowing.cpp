// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include "doctest.h"
#include "fera/error.hpp"
#include "fera/windowing.hpp"
#include "stub_classifier.hpp"

using namespace fera;
using test::PlantedAction;
using test::StubClassifier;

namespace {

const calib::ThresholdSet kTau = calib::ThresholdSet::uniform(0.9);

DetectedAction action(std::int64_t s, std::int64_t e, MoveSet m, double conf) {
  DetectedAction a;
  a.start_frame = s;
  a.end_frame = e;
  a.moves = m;
  for (auto l : m.labels()) a.move_confidence[static_cast<std::size_t>(move_index(l))] = conf;
  return a;
}

double span_iou(const DetectedAction& a, long s, long e) {
  DetectedAction b;
  b.start_frame = s;
  b.end_frame = e;
  return temporal_iou(a, b);
}

}  // namespace

TEST_CASE("scan") {
  SUBCASE("never confident: no detections, one reset per frame") {
    const auto seq = test::blank_sequence(50);
    StubClassifier stub({});
    ScanStats st;
    CHECK(scan(seq, stub, kTau, {}, &st).empty());
    CHECK(st.resets == 50);
    CHECK(st.forward_passes <= 50 * 40);
    CHECK(stub.calls == st.forward_passes);
    StubClassifier quiet({});
    CHECK(scan(seq, quiet, calib::ThresholdSet::uniform(0.99)).empty());
  }
  SUBCASE("one lunge in [20, 35]") {
    const auto seq = test::blank_sequence(60);
    StubClassifier stub({{20, 35, {MoveLabel::Lunge}, BladeLine::Six}});
    const auto got = scan(seq, stub, kTau);
    REQUIRE(got.size() == 1);
    CHECK(got[0].moves == MoveSet{MoveLabel::Lunge});
    CHECK(span_iou(got[0], 20, 35) >= 0.8);
  }
  SUBCASE("single frame") {
    const auto seq = test::blank_sequence(1);
    StubClassifier stub({{0, 0, {MoveLabel::Beat}, BladeLine::Four}});
    const auto got = scan(seq, stub, kTau);
    REQUIRE(got.size() == 1);
    CHECK(got[0].length() == 1);
    CHECK(got[0].blade == BladeLine::Four);
  }
  SUBCASE("clip frame numbers are preserved") {
    const auto seq = test::blank_sequence(30, 100);
    StubClassifier stub({{5, 16, {MoveLabel::Parry}, BladeLine::Seven}});
    const auto got = scan(seq, stub, kTau);
    REQUIRE(got.size() == 1);
    // The stub accepts one frame of leading slack (purity 10/11 >= 0.9).
    CHECK(got[0].start_frame >= 104);
    CHECK(got[0].start_frame <= 105);
    CHECK(got[0].end_frame == 116);
  }
  SUBCASE("empty input") {
    const auto seq = test::blank_sequence(0);
    StubClassifier stub({});
    CHECK(scan(seq, stub, kTau).empty());
  }
  SUBCASE("half step followed by its full step is merged") {
    const auto seq = test::blank_sequence(60);
    StubClassifier stub({{10, 14, {MoveLabel::HalfStepForward}, BladeLine::Six},
                         {15, 30, {MoveLabel::StepForward}, BladeLine::Six}});
    const auto got = scan(seq, stub, kTau);
    REQUIRE(got.size() == 1);
    CHECK(got[0].start_frame == 10);
    CHECK(got[0].end_frame == 30);
    CHECK(got[0].moves == MoveSet{MoveLabel::StepForward});
  }
  SUBCASE("a lone half step stays") {
    const auto seq = test::blank_sequence(60);
    StubClassifier stub({{10, 14, {MoveLabel::HalfStepBackward}, BladeLine::Six},
                         {40, 55, {MoveLabel::Lunge}, BladeLine::Six}});
    const auto got = scan(seq, stub, kTau);
    REQUIRE(got.size() == 2);
    CHECK(got[0].moves == MoveSet{MoveLabel::HalfStepBackward});
  }
  SUBCASE("random streams stay within the bounds") {
    Rng rng(1);
    for (int k = 0; k < 20; ++k) {
      std::vector<PlantedAction> planted;
      long t = rng.uniform_int(0, 10);
      while (true) {
        const long len = rng.uniform_int(4, 40);
        if (t + len > 200) break;
        planted.push_back({t, t + len - 1, {move_from_index(rng.uniform_int(0, 11))}, BladeLine::Six});
        t += len + rng.uniform_int(0, 8);
      }
      const auto seq = test::blank_sequence(200);
      StubClassifier stub(planted);
      ScanStats st;
      for (const auto& a : scan(seq, stub, kTau, {}, &st)) {
        CHECK(a.length() >= 1);
        CHECK(a.length() <= 40);
      }
      CHECK(st.forward_passes <= 200 * 40);
    }
  }
  SUBCASE("bad window sizes") {
    const auto seq = test::blank_sequence(5);
    StubClassifier stub({});
    ScanConfig c;
    c.initial_window = 0;
    CHECK_THROWS_AS(scan(seq, stub, kTau, c), ValidationError);
  }
}

TEST_CASE("non-maximum suppression") {
  SUBCASE("identical intervals keep the stronger one") {
    const auto t = merge_nms({action(0, 9, {MoveLabel::Lunge}, 0.7), action(0, 9, {MoveLabel::Lunge}, 0.9)}, 0.5);
    REQUIRE(t.actions.size() == 1);
    CHECK(t.actions[0].max_confidence() == 0.9);
  }
  SUBCASE("disjoint intervals all survive, sorted by start") {
    const auto t = merge_nms({action(20, 29, {MoveLabel::Lunge}, 0.7), action(0, 9, {MoveLabel::Lunge}, 0.9)}, 0.5);
    REQUIRE(t.actions.size() == 2);
    CHECK(t.actions[0].start_frame == 0);
  }
  SUBCASE("different labels do not suppress each other") {
    const auto t = merge_nms({action(0, 9, {MoveLabel::Lunge}, 0.7), action(0, 9, {MoveLabel::Parry}, 0.9)}, 0.5);
    CHECK(t.actions.size() == 2);
  }
  SUBCASE("sliding chains match the exhaustive oracle, in any order") {
    Rng rng(2);
    for (int k = 0; k < 200; ++k) {
      std::vector<DetectedAction> chain;
      for (int i = 0; i < 10; ++i) {
        const auto s = static_cast<std::int64_t>(i * rng.uniform_int(1, 4));
        const MoveSet m = rng.bernoulli(0.7) ? MoveSet{MoveLabel::Lunge} : MoveSet{MoveLabel::Lunge, MoveLabel::Hit};
        chain.push_back(action(s, s + rng.uniform_int(3, 15), m, std::round(rng.uniform(0.5, 1.0) * 20) / 20));
      }
      const auto want = test::oracle_nms(chain, 0.5);
      for (int r = 0; r < 3; ++r) {
        rng.shuffle(chain);
        CHECK(merge_nms(chain, 0.5).actions == want);
      }
    }
  }
  SUBCASE("interval IoU") {
    CHECK(temporal_iou(action(0, 9, {}, 0), action(5, 14, {}, 0)) == doctest::Approx(5.0 / 15.0));
    CHECK(temporal_iou(action(0, 9, {}, 0), action(0, 9, {}, 0)) == 1.0);
    CHECK(temporal_iou(action(0, 9, {}, 0), action(10, 19, {}, 0)) == 0.0);
  }
}

TEST_CASE("trimmed decoding") {
  SUBCASE("ground-truth stub on the lunge-hit segment") {
    const auto seq = test::blank_sequence(13, 134);
    StubClassifier stub({{0, 12, {MoveLabel::Lunge, MoveLabel::Hit}, BladeLine::Six}});
    const auto a = decode_trimmed(seq, stub, kTau);
    CHECK(a.start_frame == 134);
    CHECK(a.end_frame == 146);
    CHECK(a.moves == MoveSet{MoveLabel::Lunge, MoveLabel::Hit});
    CHECK(a.blade == BladeLine::Six);
  }
  SUBCASE("nothing confident gives an empty set") {
    const auto seq = test::blank_sequence(8);
    StubClassifier stub({});
    CHECK(decode_trimmed(seq, stub, kTau).moves.empty());
  }
  SUBCASE("empty segment") {
    const auto seq = test::blank_sequence(0);
    StubClassifier stub({});
    CHECK_THROWS_AS(decode_trimmed(seq, stub, kTau), ValidationError);
  }
}

TEST_CASE("timeline csv") {
  ActionTimeline t;
  t.clip_id = "c1";
  t.side = Side::Right;
  auto a = action(3, 9, {MoveLabel::StepForward, MoveLabel::Beat}, 0.93);
  a.blade = BladeLine::Eight;
  t.actions.push_back(a);
  std::ostringstream out;
  write_timeline_csv(out, {t});
  CHECK(out.str() == "clip_id,side,start,end,moves,blade,confidence\nc1,right,3,9,step_forward+beat,8,0.930000\n");
}
