// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fera/synth.hpp"
#include "fera/tracker.hpp"
#include "test_support.hpp"

using namespace fera;

namespace {

constexpr FrameSize kFrame{1280, 720};

PoseCandidate body(double cx, double ground, double torso = 90.0, double conf = 0.9) {
  PoseCandidate c;
  c.skeleton = test::standing_skeleton(cx, ground, torso);
  c.bbox = skeleton_bbox(c.skeleton, 0.1, conf);
  return c;
}

PoseCandidate box(double x0, double y0, double x1, double y1, double conf) {
  PoseCandidate c;
  c.bbox = {x0, y0, x1, y1, conf};
  return c;
}

PoseFrame frame(std::int64_t index, std::vector<PoseCandidate> cands) { return PoseFrame{index, std::move(cands)}; }

double skeleton_distance(const Skeleton17& a, const Skeleton17& b) {
  double d = 0.0;
  for (int j = 0; j < kNumJoints; ++j) d += std::hypot(a[j].x - b[j].x, a[j].y - b[j].y);
  return d / kNumJoints;
}

}  // namespace

TEST_CASE("candidate gating") {
  const TrackerConfig cfg;
  const double frame_area = 1280.0 * 720.0;
  SUBCASE("area below three percent") {
    // 0.02 of the frame area.
    const double side = std::sqrt(0.02 * frame_area);
    CHECK(filter_candidates(frame(0, {box(100, 100, 100 + side, 100 + side, 0.9)}), kFrame, false, cfg).empty());
    const double ok = std::sqrt(0.04 * frame_area);
    CHECK(filter_candidates(frame(0, {box(100, 100, 100 + ok, 100 + ok, 0.9)}), kFrame, false, cfg).size() == 1);
  }
  SUBCASE("confidence must exceed 0.20") {
    CHECK(filter_candidates(frame(0, {box(100, 100, 400, 500, 0.15)}), kFrame, false, cfg).empty());
    CHECK(filter_candidates(frame(0, {box(100, 100, 400, 500, 0.20)}), kFrame, false, cfg).empty());
    CHECK(filter_candidates(frame(0, {box(100, 100, 400, 500, 0.21)}), kFrame, false, cfg).size() == 1);
  }
  SUBCASE("boxes touching the bottom edge are dropped") {
    const auto kept =
        filter_candidates(frame(0, {box(100, 300, 400, 720, 0.9), box(600, 100, 900, 600, 0.9)}), kFrame, false, cfg);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].source_index == 1);
  }
  SUBCASE("sorted by score, area fraction recorded") {
    const auto kept = filter_candidates(
        frame(0, {box(0, 0, 300, 300, 0.9), box(500, 200, 900, 600, 0.9), box(900, 100, 1000, 400, 0.9)}), kFrame,
        false, cfg);
    REQUIRE(kept.size() == 3);
    for (const auto& c : kept) {
      const auto& b = c.bbox;
      CHECK(c.area_fraction == doctest::Approx(b.area() / frame_area));
      CHECK(c.score == doctest::Approx(0.7 * c.area_fraction + 0.3 * b.center_y() / 720.0));
    }
    CHECK(kept[0].score >= kept[1].score);
    CHECK(kept[1].score >= kept[2].score);
    CHECK(filter_candidates(frame(0, {box(0, 0, 300, 300, 0.9), box(500, 200, 900, 600, 0.9),
                                      box(900, 100, 1000, 400, 0.9)}),
                            kFrame, true, cfg)
              .size() == 2);
  }
}

TEST_CASE("iou") {
  const BoundingBox a{0, 0, 2, 2, 1};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, BoundingBox{5, 5, 6, 6, 1}) == 0.0);
  CHECK(iou(a, BoundingBox{1, 0, 3, 2, 1}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(iou(BoundingBox{1, 1, 1, 1, 1}, BoundingBox{1, 1, 1, 1, 1}) == 0.0);
}

TEST_CASE("association cost") {
  const FrameSize f{300, 400};  // diagonal 500
  const BoundingBox a{0, 0, 100, 100, 1};
  CHECK(association_distance(a, a, f, 0.5, 0.5) == 0.0);
  // Disjoint boxes whose centers are a full diagonal apart.
  const BoundingBox p{-1, -1, 1, 1, 1}, q{299, 399, 301, 401, 1};
  CHECK(association_distance(p, q, f, 0.5, 0.5) == doctest::Approx(1.0));
  // Nested boxes: IoU 0.5, centers 50 px apart.
  const BoundingBox big{0, 0, 200, 100, 1};
  const BoundingBox half{0, 0, 100, 100, 1};
  CHECK(iou(big, half) == doctest::Approx(0.5));
  const double ratio = std::hypot(big.center_x() - half.center_x(), 0.0) / 500.0;
  CHECK(ratio == doctest::Approx(0.1));
  CHECK(association_distance(big, half, f, 0.5, 0.5) == doctest::Approx(0.30).epsilon(1e-12));
}

TEST_CASE("ema smoothing") {
  SUBCASE("single step with lambda 0.5") {
    EmaState st;
    Skeleton17 zero, one;
    for (int j = 0; j < kNumJoints; ++j) {
      zero[j] = {0, 0, 1};
      one[j] = {1, 1, 1};
    }
    ema_smooth(st, &zero, 0.5);
    const auto out = ema_smooth(st, &one, 0.5);
    CHECK(out[kNose].x == 0.5);
    CHECK(out[kLeftAnkle].y == 0.5);
  }
  SUBCASE("constant input is a fixed point") {
    EmaState st;
    const auto s = test::standing_skeleton(400, 600);
    for (int i = 0; i < 10; ++i) CHECK(ema_smooth(st, &s, 0.6) == s);
  }
  SUBCASE("missing detection holds the previous output") {
    EmaState st;
    const auto a = test::standing_skeleton(400, 600);
    const auto b = test::standing_skeleton(420, 600);
    ema_smooth(st, &a, 0.6);
    const auto prev = ema_smooth(st, &b, 0.6);
    CHECK(ema_smooth(st, nullptr, 0.6) == prev);
    Skeleton17 unseen = b;
    for (auto& k : unseen.joints) k.confidence = 0.0;
    CHECK(ema_smooth(st, &unseen, 0.6) == prev);
  }
  SUBCASE("output stays within the observed range") {
    Rng rng(5);
    EmaState st;
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < 200; ++i) {
      Skeleton17 s;
      const double x = snap_pixel(rng.uniform(0, 1000));
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      for (auto& k : s.joints) k = {x, x, 1.0};
      const auto out = ema_smooth(st, &s, 0.6);
      CHECK(out[kNose].x >= lo);
      CHECK(out[kNose].x <= hi);
    }
  }
}

TEST_CASE("tracker identities") {
  const TrackerConfig cfg;
  SUBCASE("candidates at the last boxes keep their ids") {
    FencerTracker tr(cfg, kFrame);
    const auto a = body(300, 600), b = body(900, 600);
    tr.step(frame(0, {a, b}));
    const auto r = tr.step(frame(1, {b, a}));
    REQUIRE(r.assignments.size() == 2);
    CHECK(r.assignments[0].candidate == 1u);
    CHECK(r.assignments[1].candidate == 0u);
  }
  SUBCASE("lost id is restored after a five-frame gap") {
    FencerTracker tr(cfg, kFrame);
    const auto a = body(300, 600), b = body(900, 600);
    for (int i = 0; i < 14; ++i) tr.step(frame(i, {a, b}));
    const int id_b = 1;
    for (int i = 14; i < 19; ++i) {
      const auto r = tr.step(frame(i, {a}));
      CHECK_FALSE(r.present[id_b]);
    }
    CHECK(tr.tracks()[1].frames_missing == 5);
    const auto r = tr.step(frame(19, {a, b}));
    CHECK(r.present[id_b]);
    CHECK(r.assignments[1].candidate == 1u);
    CHECK(tr.tracks()[1].frames_missing == 0);
    CHECK(tr.tracks().size() == 2);
  }
  SUBCASE("a stranger after the grace period does not start a track") {
    FencerTracker tr(cfg, kFrame);
    const auto a = body(300, 600), b = body(900, 600);
    for (int i = 0; i < 13; ++i) tr.step(frame(i, {a, b}));
    const auto r = tr.step(frame(13, {a, b, body(620, 560, 70)}));
    CHECK(tr.tracks().size() == 2);
    CHECK(r.assignments[0].candidate == 0u);
    CHECK(r.assignments[1].candidate == 1u);
  }
  SUBCASE("crossing fencers are followed by body, not screen side") {
    // A walks right along the lower line, B walks left higher up and smaller.
    PoseFile file;
    file.header = {"cross", kFrame, 25.0};
    std::vector<double> ax, bx;
    for (int i = 0; i < 60; ++i) {
      ax.push_back(300 + 10.0 * i);
      bx.push_back(900 - 10.0 * i);
      auto ca = body(ax.back(), 640, 95);
      auto cb = body(bx.back(), 520, 70);
      file.frames.push_back(frame(i, i % 2 ? std::vector{ca, cb} : std::vector{cb, ca}));
    }
    const auto res = run_tracker(file, cfg);
    for (int i = 0; i < 60; ++i) {
      const auto& l = res.left.frames[static_cast<std::size_t>(i)];
      CHECK(l.present);
      // The left track is A throughout: pelvis follows ax.
      const double pelvis = 0.5 * (l.skeleton[kLeftHip].x + l.skeleton[kRightHip].x);
      CHECK(std::abs(pelvis - ax[static_cast<std::size_t>(i)]) < 20.0);
    }
  }
  SUBCASE("candidate order does not change assignments") {
    Rng rng(9);
    PoseFile file;
    file.header = {"perm", kFrame, 25.0};
    for (int i = 0; i < 40; ++i)
      file.frames.push_back(frame(i, {body(300 + 3.0 * i, 640), body(900 - 2.0 * i, 630), body(640, 300, 60)}));
    const auto ref = run_tracker(file, cfg);
    for (int k = 0; k < 5; ++k) {
      PoseFile shuffled = file;
      for (auto& f : shuffled.frames) rng.shuffle(f.candidates);
      const auto res = run_tracker(shuffled, cfg);
      CHECK(res.left == ref.left);
      CHECK(res.right == ref.right);
    }
  }
  SUBCASE("generated bouts keep both identities") {
    synth::SynthClipSpec spec;
    spec.seed = 42;
    spec.left = {{{MoveLabel::StepForward}}, {{MoveLabel::StepForward}}, {{MoveLabel::Lunge}}};
    spec.right = {{{MoveLabel::StepBackward}}, {{MoveLabel::StepBackward}}, {{MoveLabel::Parry}}};
    spec.noise_px = 1.0;
    spec.tail_frames = 5;
    const auto bout = synth::generate_bout(spec);
    const auto res = run_tracker(bout.poses, cfg);
    REQUIRE(res.left.frames.size() == bout.left.frames.size());
    for (std::size_t i = 0; i < res.left.frames.size(); ++i) {
      const auto& got_l = res.left.frames[i].skeleton;
      const auto& got_r = res.right.frames[i].skeleton;
      CHECK(skeleton_distance(got_l, bout.left.frames[i].skeleton) <
            skeleton_distance(got_l, bout.right.frames[i].skeleton));
      CHECK(skeleton_distance(got_r, bout.right.frames[i].skeleton) <
            skeleton_distance(got_r, bout.left.frames[i].skeleton));
    }
  }
  SUBCASE("gaps in frame numbers become absent frames") {
    PoseFile file;
    file.header = {"gap", kFrame, 25.0};
    file.frames.push_back(frame(0, {body(300, 640), body(900, 640)}));
    file.frames.push_back(frame(4, {body(300, 640), body(900, 640)}));
    const auto res = run_tracker(file, cfg);
    REQUIRE(res.left.frames.size() == 5);
    CHECK_FALSE(res.left.frames[2].present);
    CHECK(res.left.frames[2].skeleton == res.left.frames[0].skeleton);
    CHECK(res.left.frames[4].present);
  }
}
