// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fera/annotations.hpp"
#include "fera/labels.hpp"
#include "fera/pose.hpp"
#include "fera/pose_io.hpp"
#include "fera/referee/priority.hpp"
#include "fera/rng.hpp"
#include "fera/transcript.hpp"

namespace fera::synth {

/// Pose parameters animated by the templates, in torso units or radians.
enum Channel : int {
  kFrontDx = 0,  // front ankle, forward offset from the segment's base
  kRearDx,
  kFrontLift,
  kRearLift,
  kBodyDx,   // pelvis forward offset
  kDrop,     // pelvis lowering
  kLean,     // torso lean, radians, positive forward
  kArm,      // sword-arm extension, 0 guard .. 1 straight
  kArmDx,    // extra wrist offset
  kArmDy,
  kBackArm,  // 0 raised guard .. 1 thrown back
  kNumChannels,
};

struct Keyframe {
  double u = 0.0;  // phase in [0, 1]
  double value = 0.0;
};

/// Piecewise-linear channel curves for one move. Channels without keys are
/// left to other templates of the same segment.
struct MotionTemplate {
  MoveLabel move = MoveLabel::Wait;
  int min_frames = 4;
  int max_frames = 40;
  std::array<std::vector<Keyframe>, kNumChannels> channels;
  double advance = 0.0;  // base displacement carried into the next segment

  bool defines(Channel c) const { return !channels[static_cast<std::size_t>(c)].empty(); }
  double sample(Channel c, double u) const;
};

const MotionTemplate& motion_template(MoveLabel move);

/// Throws ValidationError when a label set mixes two footwork moves or two
/// blade actions, or is empty.
void check_compatible(MoveSet moves);

/// Frame range of a label set: footwork decides, then blade action, then hit.
std::pair<int, int> duration_range(MoveSet moves);

struct ScriptStep {
  MoveSet moves;
  BladeLine blade = BladeLine::Six;
  int frames = 0;  // 0 draws a length from duration_range
};

struct SynthClipSpec {
  std::string clip_id = "synth";
  std::uint64_t seed = 0;
  std::vector<ScriptStep> left;
  std::vector<ScriptStep> right;
  double noise_px = 0.0;
  double occlusion_prob = 0.0;
  int occlusion_start = 0;
  int occlusion_end = -1;  // inclusive; -1 runs to the last frame
  int tail_frames = 0;     // idle frames after the longer script
  FrameSize frame_size{1280, 720};
  double fps = 25.0;

  void validate() const;
};

/// One fencer's motion in pixels. Right-side motion is generated in the
/// canonical left view and mirrored, so mirroring it back reproduces the
/// left-side generation with the same seed bit for bit.
struct FencerMotion {
  std::vector<Skeleton17> frames;
  AnnotatedSequence annotations;
};

/// `total_frames` of motion: the script first, then idle guard. Negative
/// `total_frames` stops at the end of the script.
FencerMotion generate_fencer(const std::vector<ScriptStep>& script, std::uint64_t seed, Side side,
                             const std::string& clip_id, double noise_px, FrameSize frame_size, int total_frames = -1);

struct SynthBout {
  PoseFile poses;
  PoseTrack left;
  PoseTrack right;
  AnnotatedSequence left_annotations;
  AnnotatedSequence right_annotations;
  ExchangeTranscript transcript;
  referee::Verdict verdict;
};

SynthBout generate_bout(const SynthClipSpec& spec);

/// Gaussian pixel noise on observed joints, then per-frame dropout.
PoseTrack corrupt(const PoseTrack& track, double noise_sigma, double dropout, std::uint64_t seed);

/// Random scripts drawn from a vocabulary of label sets.
struct ScriptSampler {
  std::vector<MoveSet> vocabulary;  // empty: every single move except hit
  int min_steps = 3;
  int max_steps = 6;
  double hit_prob = 0.3;      // a final lunge, fleche or counterattack lands
  double six_prob = 0.5;      // remaining mass spread over the other lines
};

std::vector<ScriptStep> sample_script(Rng& rng, const ScriptSampler& sampler);

struct CorpusSpec {
  int clips = 20;
  std::uint64_t seed = 0;
  ScriptSampler sampler;
  double noise_px = 0.5;
  double occlusion_prob = 0.0;
  int tail_frames = 5;
  std::string prefix = "synth";
};

/// Clip i is seeded with Rng::derive(seed, i) and named prefix_0000.
SynthClipSpec corpus_clip_spec(const CorpusSpec& spec, int index);
std::vector<SynthBout> generate_corpus(const CorpusSpec& spec);

/// poses/<clip>.jsonl, annotations.csv and verdicts.csv (clip_id,decision).
void write_corpus(const std::filesystem::path& dir, const std::vector<SynthBout>& bouts);

}  // namespace fera::synth
