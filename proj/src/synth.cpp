// SPDX-License-Identifier: Apache-2.0
#include "fera/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "fera/error.hpp"
#include "fera/referee/explain.hpp"

namespace fera::synth {

namespace {

using M = MoveLabel;

constexpr double kStance = 1.1;        // ankle separation at guard
constexpr double kPelvisHeight = 1.4;  // above the ankles at guard
constexpr double kThigh = 0.8;
constexpr double kShin = 0.8;
constexpr double kUpperArm = 0.55;
constexpr double kForearm = 0.5;
constexpr double kConfidence = 0.9;

constexpr std::array<M, 7> kFootwork = {M::StepForward,      M::StepBackward, M::HalfStepForward, M::HalfStepBackward,
                                        M::Lunge,            M::Fleche,       M::Wait};
constexpr std::array<M, 4> kBladeActions = {M::Parry, M::Beat, M::Fake, M::Counterattack};

using Keys = std::vector<Keyframe>;

MotionTemplate make(M move, int lo, int hi, double advance,
                    std::initializer_list<std::pair<Channel, Keys>> channels) {
  MotionTemplate t;
  t.move = move;
  t.min_frames = lo;
  t.max_frames = hi;
  t.advance = advance;
  for (const auto& [c, keys] : channels) t.channels[static_cast<std::size_t>(c)] = keys;
  return t;
}

std::map<M, MotionTemplate> build_templates() {
  std::map<M, MotionTemplate> t;
  // Steps: the leading foot lifts and moves first, the other follows.
  t[M::StepForward] = make(M::StepForward, 12, 20, 0.5,
                           {{kFrontDx, {{0, 0}, {.5, .5}, {1, .5}}},
                            {kRearDx, {{0, 0}, {.5, 0}, {1, .5}}},
                            {kFrontLift, {{0, 0}, {.25, .15}, {.5, 0}}},
                            {kRearLift, {{.5, 0}, {.75, .1}, {1, 0}}},
                            {kBodyDx, {{0, 0}, {1, .5}}},
                            {kLean, {{0, 0}, {.5, .08}, {1, 0}}}});
  t[M::StepBackward] = make(M::StepBackward, 12, 20, -0.5,
                            {{kRearDx, {{0, 0}, {.5, -.5}, {1, -.5}}},
                             {kFrontDx, {{0, 0}, {.5, 0}, {1, -.5}}},
                             {kRearLift, {{0, 0}, {.25, .15}, {.5, 0}}},
                             {kFrontLift, {{.5, 0}, {.75, .1}, {1, 0}}},
                             {kBodyDx, {{0, 0}, {1, -.5}}},
                             {kLean, {{0, 0}, {.5, -.08}, {1, 0}}}});
  t[M::HalfStepForward] = make(M::HalfStepForward, 4, 6, 0.25,
                               {{kFrontDx, {{0, 0}, {.5, .25}, {1, .25}}},
                                {kRearDx, {{0, 0}, {.5, 0}, {1, .25}}},
                                {kFrontLift, {{0, 0}, {.25, .1}, {.5, 0}}},
                                {kBodyDx, {{0, 0}, {1, .25}}},
                                {kLean, {{0, 0}, {.5, .04}, {1, 0}}}});
  t[M::HalfStepBackward] = make(M::HalfStepBackward, 4, 6, -0.25,
                                {{kRearDx, {{0, 0}, {.5, -.25}, {1, -.25}}},
                                 {kFrontDx, {{0, 0}, {.5, 0}, {1, -.25}}},
                                 {kRearLift, {{0, 0}, {.25, .1}, {.5, 0}}},
                                 {kBodyDx, {{0, 0}, {1, -.25}}},
                                 {kLean, {{0, 0}, {.5, -.04}, {1, 0}}}});
  // Lunge: arm first, then the front leg kicks out and the pelvis drops.
  t[M::Lunge] = make(M::Lunge, 30, 40, 0.65,
                     {{kArm, {{0, 0}, {.25, 1}, {1, 1}}},
                      {kFrontDx, {{0, 0}, {.2, 0}, {.6, 1.3}, {1, 1.3}}},
                      {kFrontLift, {{.2, 0}, {.4, .25}, {.6, 0}}},
                      {kBodyDx, {{0, 0}, {.2, 0}, {.6, .65}, {1, .65}}},
                      {kDrop, {{0, 0}, {.2, 0}, {.6, .35}, {1, .35}}},
                      {kBackArm, {{0, 0}, {.2, 0}, {.6, 1}, {1, 1}}},
                      {kLean, {{0, 0}, {.6, .12}, {1, .12}}}});
  // Fleche: strong lean, the rear leg crosses in front.
  t[M::Fleche] = make(M::Fleche, 20, 30, 1.1,
                      {{kArm, {{0, 0}, {.2, 1}, {1, 1}}},
                       {kLean, {{0, 0}, {.3, .35}, {1, .35}}},
                       {kRearDx, {{0, 0}, {.3, 0}, {.8, 2}, {1, 2}}},
                       {kRearLift, {{.3, 0}, {.55, .3}, {.8, 0}}},
                       {kFrontDx, {{0, 0}, {.8, .3}, {1, .3}}},
                       {kBodyDx, {{0, 0}, {.3, .2}, {1, 1.1}}},
                       {kBackArm, {{0, 0}, {.3, .6}, {1, .6}}}});
  t[M::Wait] = make(M::Wait, 8, 20, 0.0,
                    {{kBodyDx, {{0, 0}, {.25, .04}, {.75, -.04}, {1, 0}}}, {kDrop, {{0, 0}, {.5, .06}, {1, 0}}}});
  t[M::Parry] = make(M::Parry, 6, 12, 0.0,
                     {{kArm, {{0, 0}, {.4, .15}, {1, .05}}},
                      {kArmDy, {{0, 0}, {.4, -.3}, {.8, -.3}, {1, -.1}}},
                      {kArmDx, {{0, 0}, {.4, -.12}, {1, -.05}}}});
  t[M::Beat] = make(M::Beat, 4, 8, 0.0,
                    {{kArm, {{0, 0}, {.6, .35}, {1, .3}}},
                     {kArmDy, {{0, 0}, {.3, .2}, {.6, -.05}, {1, 0}}},
                     {kArmDx, {{0, 0}, {.3, .1}, {1, .05}}}});
  t[M::Counterattack] = make(M::Counterattack, 10, 18, 0.0,
                             {{kArm, {{0, 0}, {.4, .95}, {1, .95}}},
                              {kLean, {{0, 0}, {.4, .15}, {1, .15}}},
                              {kDrop, {{0, 0}, {.4, .1}, {1, .1}}}});
  t[M::Fake] = make(M::Fake, 6, 12, 0.0,
                    {{kArm, {{0, 0}, {.4, .55}, {1, 0}}},
                     {kArmDy, {{0, 0}, {.4, .08}, {1, 0}}},
                     {kLean, {{0, 0}, {.4, .05}, {1, 0}}}});
  // A lone hit is a short extension; as a modifier it is blended in at the end.
  t[M::Hit] = make(M::Hit, 4, 8, 0.0, {{kArm, {{0, .6}, {.5, 1}, {1, 1}}}});
  return t;
}

double lerp(double a, double b, double s) { return a + (b - a) * s; }

struct Point {
  double x = 0.0;
  double y = 0.0;
};

Point add(Point a, double dx, double dy) { return {a.x + dx, a.y + dy}; }

/// Rotates (dx, dy) so that "up" tilts toward +x by `lean`.
Point rotated(Point origin, double dx, double dy, double lean) {
  const double c = std::cos(lean), s = std::sin(lean);
  return {origin.x + c * dx - s * dy, origin.y + s * dx + c * dy};
}

/// Two-segment chain from `root` toward `target`. The middle joint bends
/// toward +x when `bend_x`, otherwise toward +y.
std::pair<Point, Point> two_bone(Point root, Point target, double a, double b, bool bend_x) {
  double dx = target.x - root.x, dy = target.y - root.y;
  double d = std::hypot(dx, dy);
  const double reach = (a + b) * 0.999;
  if (d > reach) {
    dx *= reach / d;
    dy *= reach / d;
    d = reach;
  }
  const Point end{root.x + dx, root.y + dy};
  if (d < 1e-9) return {add(root, 0, a), end};
  const double along = (a * a - b * b + d * d) / (2 * d);
  const double h = std::sqrt(std::max(0.0, a * a - along * along));
  const double ux = dx / d, uy = dy / d;
  double px = -uy, py = ux;
  if ((bend_x && px < 0) || (!bend_x && py < 0)) {
    px = -px;
    py = -py;
  }
  return {{root.x + ux * along + px * h, root.y + uy * along + py * h}, end};
}

std::pair<double, double> blade_offset(BladeLine b) {
  switch (b) {
    case BladeLine::Four: return {-0.1, 0.0};
    case BladeLine::Six: return {0.0, 0.0};
    case BladeLine::Seven: return {-0.1, 0.2};
    case BladeLine::Eight: return {0.0, 0.2};
    case BladeLine::Other: return {0.05, -0.25};
  }
  return {0.0, 0.0};
}

using Params = std::array<double, kNumChannels>;

struct Body {
  double torso = 90.0;   // px
  double ground = 610.0;
  double base = 300.0;   // stance center, px
};

Skeleton17 pose_skeleton(const Body& body, const Params& p, BladeLine blade) {
  const double L = body.torso;
  const double lean = p[kLean];
  const Point front_ankle{body.base + (kStance / 2 + p[kFrontDx]) * L, body.ground - p[kFrontLift] * L};
  const Point rear_ankle{body.base + (-kStance / 2 + p[kRearDx]) * L, body.ground - p[kRearLift] * L};
  const Point pelvis{body.base + p[kBodyDx] * L, body.ground - (kPelvisHeight - p[kDrop]) * L};
  const Point front_hip = add(pelvis, 0.1 * L, 0), rear_hip = add(pelvis, -0.1 * L, 0);
  const Point neck = rotated(pelvis, 0, -L, lean);
  const Point front_shoulder = rotated(neck, 0.12 * L, 0, lean);
  const Point rear_shoulder = rotated(neck, -0.12 * L, 0, lean);
  const Point head = rotated(neck, 0.1 * L, -0.45 * L, lean);

  const auto [front_knee, fa] = two_bone(front_hip, front_ankle, kThigh * L, kShin * L, true);
  const auto [rear_knee, ra] = two_bone(rear_hip, rear_ankle, kThigh * L, kShin * L, true);

  const double ext = std::clamp(p[kArm], 0.0, 1.2);
  const auto [bx, by] = blade_offset(blade);
  const Point wrist_target{front_shoulder.x + (lerp(0.5, 1.02, ext) + p[kArmDx] + bx) * L,
                           front_shoulder.y + (lerp(0.45, -0.05, ext) + p[kArmDy] + by) * L};
  const auto [front_elbow, front_wrist] = two_bone(front_shoulder, wrist_target, kUpperArm * L, kForearm * L, false);

  const double back = std::clamp(p[kBackArm], 0.0, 1.0);
  const Point rear_elbow = add(rear_shoulder, lerp(-0.3, -0.45, back) * L, lerp(-0.1, 0.15, back) * L);
  const Point rear_wrist = add(rear_shoulder, lerp(-0.35, -0.95, back) * L, lerp(-0.55, 0.35, back) * L);

  Skeleton17 s;
  auto put = [&](int j, Point q) { s[j] = Keypoint{q.x, q.y, kConfidence}; };
  put(kNose, add(head, 0.12 * L, 0));
  put(kRightEye, add(head, 0.08 * L, -0.05 * L));
  put(kLeftEye, add(head, 0.04 * L, -0.05 * L));
  put(kRightEar, add(head, -0.02 * L, -0.02 * L));
  put(kLeftEar, add(head, -0.08 * L, -0.02 * L));
  // The armed side faces the opponent: right joints lead.
  put(kRightShoulder, front_shoulder);
  put(kLeftShoulder, rear_shoulder);
  put(kRightElbow, front_elbow);
  put(kLeftElbow, rear_elbow);
  put(kRightWrist, front_wrist);
  put(kLeftWrist, rear_wrist);
  put(kRightHip, front_hip);
  put(kLeftHip, rear_hip);
  put(kRightKnee, front_knee);
  put(kLeftKnee, rear_knee);
  put(kRightAnkle, fa);
  put(kLeftAnkle, ra);
  return s;
}

const MotionTemplate* find_in(MoveSet moves, auto const& group) {
  for (M m : group)
    if (moves.contains(m)) return &motion_template(m);
  return nullptr;
}

double smoothstep01(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3 - 2 * x);
}

/// Channel values of a segment at phase u, scaled by the segment amplitude.
Params segment_params(MoveSet moves, double u, double amplitude) {
  Params p{};
  const MotionTemplate* layers[] = {find_in(moves, kFootwork), find_in(moves, kBladeActions)};
  bool any = false;
  for (const auto* t : layers) {
    if (!t) continue;
    any = true;
    for (int c = 0; c < kNumChannels; ++c)
      if (t->defines(static_cast<Channel>(c))) p[static_cast<std::size_t>(c)] = amplitude * t->sample(static_cast<Channel>(c), u);
  }
  if (moves.contains(M::Hit)) {
    if (!any) {
      p[kArm] = motion_template(M::Hit).sample(kArm, u);
    } else {
      const double h = smoothstep01((u - 0.7) / 0.15);
      p[kArm] = lerp(p[kArm], 1.0, h);
      p[kArmDx] = lerp(p[kArmDx], 0.15, h);
      p[kArmDy] = lerp(p[kArmDy], -0.05, h);
    }
  }
  return p;
}

double segment_advance(MoveSet moves, double amplitude) {
  const auto* t = find_in(moves, kFootwork);
  return t ? amplitude * t->advance : 0.0;
}

Skeleton17 finish(Skeleton17 s, Rng& rng, double noise_px, Side side, FrameSize fs) {
  for (auto& k : s.joints) {
    if (noise_px > 0.0) {
      k.x += rng.normal(0.0, noise_px);
      k.y += rng.normal(0.0, noise_px);
    }
    k.x = snap_pixel(k.x);
    k.y = snap_pixel(k.y);
  }
  return side == Side::Right ? mirror_skeleton(s, fs.width) : s;
}

void validate_script(const std::vector<ScriptStep>& script, std::string_view name) {
  if (script.empty()) throw ValidationError(std::string(name) + " script is empty");
  for (std::size_t i = 0; i < script.size(); ++i) {
    try {
      check_compatible(script[i].moves);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(name) + " script step " + std::to_string(i) + ": " + e.what());
    }
    if (script[i].frames != 0 && (script[i].frames < 4 || script[i].frames > 40))
      throw ValidationError(std::string(name) + " script step " + std::to_string(i) + ": length " +
                            std::to_string(script[i].frames) + " outside [4, 40]");
  }
}

PoseTrack make_track(const std::string& clip_id, Side side, const SynthClipSpec& spec,
                     const std::vector<Skeleton17>& frames, const std::vector<std::uint8_t>& present) {
  PoseTrack t;
  t.clip_id = clip_id;
  t.side = side;
  t.frame_size = spec.frame_size;
  t.fps = spec.fps;
  t.frames.resize(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i)
    t.frames[i] = TrackFrame{static_cast<std::int64_t>(i), frames[i], present[i] != 0};
  return t;
}

}  // namespace

double MotionTemplate::sample(Channel c, double u) const {
  const auto& keys = channels[static_cast<std::size_t>(c)];
  if (keys.empty()) return 0.0;
  if (u <= keys.front().u) return keys.front().value;
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (u <= keys[i].u) {
      const auto& a = keys[i - 1];
      const auto& b = keys[i];
      return lerp(a.value, b.value, (u - a.u) / (b.u - a.u));
    }
  }
  return keys.back().value;
}

const MotionTemplate& motion_template(MoveLabel move) {
  static const auto templates = build_templates();
  return templates.at(move);
}

void check_compatible(MoveSet moves) {
  if (moves.empty()) throw ValidationError("empty move set");
  auto count = [&](const auto& group) {
    return std::count_if(group.begin(), group.end(), [&](M m) { return moves.contains(m); });
  };
  if (count(kFootwork) > 1)
    throw ValidationError("incompatible templates \"" + format_moves(moves) + "\": more than one footwork move");
  if (count(kBladeActions) > 1)
    throw ValidationError("incompatible templates \"" + format_moves(moves) + "\": more than one blade action");
}

std::pair<int, int> duration_range(MoveSet moves) {
  check_compatible(moves);
  const MotionTemplate* t = find_in(moves, kFootwork);
  if (!t) t = find_in(moves, kBladeActions);
  if (!t) t = &motion_template(M::Hit);
  return {t->min_frames, t->max_frames};
}

void SynthClipSpec::validate() const {
  validate_script(left, "left");
  validate_script(right, "right");
  if (!(noise_px >= 0.0)) throw ValidationError("noise level must be >= 0");
  if (!(occlusion_prob >= 0.0 && occlusion_prob <= 1.0)) throw ValidationError("occlusion probability must lie in [0,1]");
  if (tail_frames < 0) throw ValidationError("tail frames must be >= 0");
  if (!frame_size.known()) throw ValidationError("frame size must be positive");
}

FencerMotion generate_fencer(const std::vector<ScriptStep>& script, std::uint64_t seed, Side side,
                             const std::string& clip_id, double noise_px, FrameSize frame_size, int total_frames) {
  validate_script(script, side == Side::Left ? "left" : "right");
  Rng rng(seed);
  Body body;
  body.torso = rng.uniform(85.0, 100.0);
  body.ground = 0.85 * frame_size.height;
  body.base = rng.uniform(0.2, 0.24) * frame_size.width;

  FencerMotion out;
  out.annotations.clip_id = clip_id;
  out.annotations.side = side;
  int frame = 0;
  for (const auto& step : script) {
    const auto [lo, hi] = duration_range(step.moves);
    const int n = step.frames > 0 ? step.frames : rng.uniform_int(lo, hi);
    const double amplitude = rng.uniform(0.85, 1.15);
    out.annotations.segments.push_back({frame, frame + n - 1, step.moves, step.blade});
    for (int i = 0; i < n; ++i) {
      const double u = n > 1 ? static_cast<double>(i) / (n - 1) : 1.0;
      out.frames.push_back(
          finish(pose_skeleton(body, segment_params(step.moves, u, amplitude), step.blade), rng, noise_px, side, frame_size));
    }
    body.base += segment_advance(step.moves, amplitude) * body.torso;
    frame += n;
  }
  const BladeLine last_blade = script.back().blade;
  while (static_cast<int>(out.frames.size()) < total_frames)
    out.frames.push_back(finish(pose_skeleton(body, Params{}, last_blade), rng, noise_px, side, frame_size));
  return out;
}

SynthBout generate_bout(const SynthClipSpec& spec) {
  spec.validate();
  auto left = generate_fencer(spec.left, Rng::derive(spec.seed, 0), Side::Left, spec.clip_id, spec.noise_px,
                              spec.frame_size);
  auto right = generate_fencer(spec.right, Rng::derive(spec.seed, 1), Side::Right, spec.clip_id, spec.noise_px,
                               spec.frame_size);
  const std::size_t total = std::max(left.frames.size(), right.frames.size()) + static_cast<std::size_t>(spec.tail_frames);
  // Regenerate with padding so both sides cover the clip; the script part is unchanged.
  left = generate_fencer(spec.left, Rng::derive(spec.seed, 0), Side::Left, spec.clip_id, spec.noise_px, spec.frame_size,
                         static_cast<int>(total));
  right = generate_fencer(spec.right, Rng::derive(spec.seed, 1), Side::Right, spec.clip_id, spec.noise_px,
                          spec.frame_size, static_cast<int>(total));

  const int occ_end = spec.occlusion_end < 0 ? static_cast<int>(total) - 1 : spec.occlusion_end;
  std::array<std::vector<std::uint8_t>, 2> present;
  for (int s = 0; s < 2; ++s) {
    Rng occ(Rng::derive(spec.seed, 2 + static_cast<std::uint64_t>(s)));
    present[static_cast<std::size_t>(s)].assign(total, 1);
    for (std::size_t i = 0; i < total; ++i) {
      const int f = static_cast<int>(i);
      const bool in_range = f >= spec.occlusion_start && f <= occ_end;
      // Always draw so the pattern does not depend on the range.
      if (occ.bernoulli(spec.occlusion_prob) && in_range) present[static_cast<std::size_t>(s)][i] = 0;
    }
  }

  SynthBout bout;
  bout.poses.header = PoseFileHeader{spec.clip_id, spec.frame_size, spec.fps};
  bout.poses.frames.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    auto& pf = bout.poses.frames[i];
    pf.frame_index = static_cast<std::int64_t>(i);
    const Skeleton17* skel[2] = {&left.frames[i], &right.frames[i]};
    for (int s = 0; s < 2; ++s) {
      if (!present[static_cast<std::size_t>(s)][i]) continue;
      pf.candidates.push_back({skeleton_bbox(*skel[s], 0.1, kConfidence), *skel[s]});
    }
  }
  bout.left = make_track(spec.clip_id, Side::Left, spec, left.frames, present[0]);
  bout.right = make_track(spec.clip_id, Side::Right, spec, right.frames, present[1]);
  bout.left_annotations = std::move(left.annotations);
  bout.right_annotations = std::move(right.annotations);
  bout.transcript = align_pair(bout.left_annotations, bout.right_annotations);
  bout.verdict = referee::referee_exchange(bout.transcript);
  return bout;
}

PoseTrack corrupt(const PoseTrack& track, double noise_sigma, double dropout, std::uint64_t seed) {
  if (!(noise_sigma >= 0.0)) throw ValidationError("noise sigma must be >= 0");
  if (!(dropout >= 0.0 && dropout <= 1.0)) throw ValidationError("dropout must lie in [0,1]");
  Rng rng(seed);
  PoseTrack out = track;
  for (auto& f : out.frames) {
    if (noise_sigma > 0.0) {
      for (auto& k : f.skeleton.joints) {
        if (k.confidence <= 0.0) continue;
        k.x = snap_pixel(k.x + rng.normal(0.0, noise_sigma));
        k.y = snap_pixel(k.y + rng.normal(0.0, noise_sigma));
      }
    }
    if (rng.bernoulli(dropout)) f.present = false;
  }
  return out;
}

std::vector<ScriptStep> sample_script(Rng& rng, const ScriptSampler& sampler) {
  if (sampler.min_steps < 1 || sampler.max_steps < sampler.min_steps)
    throw ValidationError("script sampler needs 1 <= min_steps <= max_steps");
  std::vector<MoveSet> vocab = sampler.vocabulary;
  if (vocab.empty())
    for (int i = 0; i < kNumMoves; ++i)
      if (move_from_index(i) != M::Hit) vocab.push_back(MoveSet{move_from_index(i)});
  for (auto m : vocab) check_compatible(m);

  const int n = rng.uniform_int(sampler.min_steps, sampler.max_steps);
  std::vector<ScriptStep> script;
  for (int i = 0; i < n; ++i) {
    ScriptStep step;
    step.moves = vocab[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(vocab.size()) - 1))];
    step.blade = rng.bernoulli(sampler.six_prob)
                     ? BladeLine::Six
                     : std::array{BladeLine::Four, BladeLine::Seven, BladeLine::Eight, BladeLine::Other}[static_cast<std::size_t>(
                           rng.uniform_int(0, 3))];
    script.push_back(step);
  }
  auto& last = script.back().moves;
  const bool lands = last.contains(M::Lunge) || last.contains(M::Fleche) || last.contains(M::Counterattack);
  if (rng.bernoulli(sampler.hit_prob) && lands) last.insert(M::Hit);
  return script;
}

SynthClipSpec corpus_clip_spec(const CorpusSpec& spec, int index) {
  char id[32];
  std::snprintf(id, sizeof id, "_%04d", index);
  Rng rng(Rng::derive(spec.seed, static_cast<std::uint64_t>(index)));
  SynthClipSpec clip;
  clip.clip_id = spec.prefix + id;
  clip.seed = rng.next_u64();
  clip.left = sample_script(rng, spec.sampler);
  clip.right = sample_script(rng, spec.sampler);
  clip.noise_px = spec.noise_px;
  clip.occlusion_prob = spec.occlusion_prob;
  clip.tail_frames = spec.tail_frames;
  return clip;
}

std::vector<SynthBout> generate_corpus(const CorpusSpec& spec) {
  if (spec.clips < 1) throw ValidationError("corpus needs at least one clip");
  std::vector<SynthBout> out;
  out.reserve(static_cast<std::size_t>(spec.clips));
  for (int i = 0; i < spec.clips; ++i) out.push_back(generate_bout(corpus_clip_spec(spec, i)));
  return out;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<SynthBout>& bouts) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "poses", ec);
  if (ec) throw IoError("cannot create " + (dir / "poses").string() + ": " + ec.message());
  std::vector<AnnotatedSequence> annotations;
  for (const auto& b : bouts) {
    write_pose_file(dir / "poses" / (b.poses.header.clip_id + ".jsonl"), b.poses);
    annotations.push_back(b.left_annotations);
    annotations.push_back(b.right_annotations);
  }
  write_annotations(dir / "annotations.csv", annotations);
  std::ofstream v(dir / "verdicts.csv", std::ios::binary);
  if (!v) throw IoError("cannot write " + (dir / "verdicts.csv").string());
  v << "clip_id,decision\n";
  for (const auto& b : bouts) v << b.poses.header.clip_id << ',' << referee::decision_name(b.verdict.decision) << '\n';
}

}  // namespace fera::synth
