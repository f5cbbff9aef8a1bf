// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fera/error.hpp"
#include "fera/synth.hpp"
#include "fera/tracker.hpp"
#include "test_support.hpp"

using namespace fera;
using namespace fera::synth;
using M = MoveLabel;

namespace {

SynthClipSpec attack_vs_retreat(std::uint64_t seed) {
  SynthClipSpec spec;
  spec.clip_id = "attack";
  spec.seed = seed;
  spec.left = {{{M::StepForward}}, {{M::StepForward}}, {{M::StepForward}}, {{M::Lunge, M::Hit}}};
  spec.right = {{{M::StepBackward}}, {{M::StepBackward}}, {{M::StepBackward}}};
  spec.noise_px = 0.5;
  spec.tail_frames = 5;
  return spec;
}

}  // namespace

TEST_CASE("scripted bouts") {
  const auto bout = generate_bout(attack_vs_retreat(7));
  CHECK(bout.verdict.decision == referee::Decision::Left);
  CHECK(bout.left_annotations.segments.size() == 4);
  CHECK(bout.right_annotations.segments.size() == 3);
  CHECK(bout.poses.frames.size() == bout.left.frames.size());
  for (const auto& f : bout.poses.frames) CHECK(f.candidates.size() == 2);

  SUBCASE("same seed, same bout") {
    CHECK(generate_bout(attack_vs_retreat(7)).poses == bout.poses);
    CHECK_FALSE(generate_bout(attack_vs_retreat(8)).poses == bout.poses);
  }
  SUBCASE("segments tile the script from frame 0") {
    for (const auto* a : {&bout.left_annotations, &bout.right_annotations}) {
      int next = 0;
      for (const auto& s : a->segments) {
        CHECK(s.start_frame == next);
        const auto [lo, hi] = duration_range(s.moves);
        CHECK(s.end_frame - s.start_frame + 1 >= lo);
        CHECK(s.end_frame - s.start_frame + 1 <= hi);
        next = s.end_frame + 1;
      }
    }
  }
  SUBCASE("fencers face each other on their own half") {
    const auto& f = bout.poses.frames.front();
    CHECK(f.candidates[0].bbox.center_x() < 640.0);
    CHECK(f.candidates[1].bbox.center_x() > 640.0);
  }
  SUBCASE("the tracker recovers both fencers") {
    const auto tracks = run_tracker(bout.poses, TrackerConfig{});
    CHECK(tracks.left.frames.size() == bout.left.frames.size());
    // Smoothing moves joints slightly; identity must hold on every frame.
    const auto hip_x = [](const Skeleton17& k) { return 0.5 * (k[11].x + k[12].x); };
    for (std::size_t i = 0; i < bout.left.frames.size(); ++i) {
      REQUIRE(tracks.left.frames[i].present);
      REQUIRE(tracks.right.frames[i].present);
      CHECK(std::abs(hip_x(tracks.left.frames[i].skeleton) - hip_x(bout.left.frames[i].skeleton)) < 20.0);
      CHECK(std::abs(hip_x(tracks.right.frames[i].skeleton) - hip_x(bout.right.frames[i].skeleton)) < 20.0);
    }
  }
}

TEST_CASE("occlusion") {
  auto spec = attack_vs_retreat(3);
  spec.occlusion_prob = 1.0;
  spec.occlusion_start = 10;
  spec.occlusion_end = 15;
  const auto bout = generate_bout(spec);
  for (const auto& f : bout.poses.frames) {
    const bool hidden = f.frame_index >= 10 && f.frame_index <= 15;
    CHECK(f.candidates.size() == (hidden ? 0u : 2u));
    CHECK(bout.left.frames[static_cast<std::size_t>(f.frame_index)].present == !hidden);
  }
  spec.occlusion_prob = 1.5;
  CHECK_THROWS_AS(generate_bout(spec), ValidationError);
}

TEST_CASE("corrupt") {
  const auto track = generate_bout(attack_vs_retreat(11)).left;
  CHECK(corrupt(track, 0.0, 0.0, 1) == track);
  for (const auto& f : corrupt(track, 0.0, 1.0, 1).frames) CHECK_FALSE(f.present);

  const double sigma = 2.0;
  const auto noisy = corrupt(track, sigma, 0.0, 5);
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < track.frames.size(); ++i)
    for (int j = 0; j < kNumJoints; ++j) {
      const auto &a = track.frames[i].skeleton[j], &b = noisy.frames[i].skeleton[j];
      sum += std::hypot(a.x - b.x, a.y - b.y);
      ++n;
    }
  // 2-D displacement follows a Rayleigh law with mean sigma * sqrt(pi / 2).
  const double expected = sigma * std::sqrt(std::numbers::pi / 2.0);
  CHECK(sum / n == doctest::Approx(expected).epsilon(0.05));
  CHECK(corrupt(track, sigma, 0.3, 5) == corrupt(track, sigma, 0.3, 5));
  CHECK_THROWS_AS(corrupt(track, -1.0, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(corrupt(track, 0.0, 2.0, 1), ValidationError);
}

TEST_CASE("mirror invariance of generated motion") {
  const std::vector<ScriptStep> script = {{{M::StepForward}}, {{M::Lunge}}, {{M::StepBackward, M::Parry}, BladeLine::Four}};
  const FrameSize size{1280, 720};
  const auto left = generate_fencer(script, 99, Side::Left, "m", 0.5, size);
  const auto right = generate_fencer(script, 99, Side::Right, "m", 0.5, size);
  REQUIRE(left.frames.size() == right.frames.size());
  for (std::size_t i = 0; i < left.frames.size(); ++i) CHECK(mirror_skeleton(right.frames[i], size.width) == left.frames[i]);
  CHECK(left.annotations.segments == right.annotations.segments);
}

TEST_CASE("label compatibility") {
  CHECK_NOTHROW(check_compatible({M::Lunge, M::Hit}));
  CHECK_NOTHROW(check_compatible({M::StepForward, M::Beat}));
  CHECK_THROWS_AS(check_compatible({M::StepForward, M::StepBackward}), ValidationError);
  CHECK_THROWS_AS(check_compatible({M::Parry, M::Beat}), ValidationError);
  CHECK_THROWS_AS(check_compatible(MoveSet{}), ValidationError);

  SynthClipSpec spec;
  spec.left = {{{M::StepForward, M::Lunge}}};
  spec.right = {{{M::Wait}}};
  CHECK_THROWS_AS(generate_bout(spec), ValidationError);
}

TEST_CASE("sampled scripts and corpora") {
  Rng rng(4);
  ScriptSampler sampler;
  for (int k = 0; k < 200; ++k) {
    const auto script = sample_script(rng, sampler);
    CHECK(script.size() >= 3);
    CHECK(script.size() <= 6);
    for (std::size_t i = 0; i + 1 < script.size(); ++i) CHECK_FALSE(script[i].moves.contains(M::Hit));
  }

  CorpusSpec cs;
  cs.clips = 4;
  cs.seed = 21;
  const auto corpus = generate_corpus(cs);
  REQUIRE(corpus.size() == 4);
  CHECK(corpus[2].poses.header.clip_id == "synth_0002");
  CHECK(generate_bout(corpus_clip_spec(cs, 2)).poses == corpus[2].poses);

  test::TempDir dir;
  write_corpus(dir.path(), corpus);
  CHECK(parse_pose_file(dir / "poses/synth_0001.jsonl") == corpus[1].poses);
  const auto ann = parse_annotations(dir / "annotations.csv");
  CHECK(ann.size() == 8);
  const auto verdicts = test::read_text(dir / "verdicts.csv");
  CHECK(verdicts.rfind("clip_id,decision\nsynth_0000,", 0) == 0);
}
