// SPDX-License-Identifier: Apache-2.0
#include "fera/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "fera/error.hpp"
#include "fera/features.hpp"

namespace fera {

namespace {

auto geometry_key(const BoundingBox& b) { return std::tie(b.x_min, b.y_min, b.x_max, b.y_max); }

}  // namespace

std::vector<Candidate> filter_candidates(const PoseFrame& frame, FrameSize frame_size, bool grace_active,
                                         const TrackerConfig& config) {
  if (!frame_size.known()) throw ValidationError("frame size must be positive for candidate filtering");
  const double frame_area = static_cast<double>(frame_size.width) * frame_size.height;
  const double bottom = frame_size.height - config.bottom_margin_px;

  std::vector<Candidate> out;
  for (std::size_t i = 0; i < frame.candidates.size(); ++i) {
    const auto& c = frame.candidates[i];
    const double area_fraction = std::clamp(c.bbox.area() / frame_area, 0.0, 1.0);
    if (area_fraction < config.min_area_fraction) continue;
    if (!(c.bbox.confidence > config.min_confidence)) continue;
    if (c.bbox.y_max >= bottom) continue;
    const double vertical = std::clamp(c.bbox.center_y() / frame_size.height, 0.0, 1.0);
    out.push_back(Candidate{i, c.bbox, c.skeleton, area_fraction,
                            config.score_area_weight * area_fraction + config.score_vertical_weight * vertical});
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return geometry_key(a.bbox) < geometry_key(b.bbox);
  });
  if (grace_active && out.size() > 2) out.resize(2);
  return out;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double association_distance(const BoundingBox& track_box, const BoundingBox& candidate_box, FrameSize frame_size,
                            double alpha, double beta) {
  const double diag = std::hypot(static_cast<double>(frame_size.width), static_cast<double>(frame_size.height));
  const double dist = std::hypot(track_box.center_x() - candidate_box.center_x(),
                                 track_box.center_y() - candidate_box.center_y());
  return alpha * (1.0 - iou(track_box, candidate_box)) + beta * (diag > 0.0 ? dist / diag : 0.0);
}

double pose_dissimilarity(const Skeleton17& a, const Skeleton17& b) {
  const auto na = normalize_skeleton(a), nb = normalize_skeleton(b);
  if (!na.valid || !nb.valid) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (int j = 0; j < kBodyJoints; ++j) sum += (na.joints[j] - nb.joints[j]).norm();
  return sum / kBodyJoints;
}

Skeleton17 ema_smooth(EmaState& state, const Skeleton17* observation, double lambda) {
  Skeleton17 out;
  for (int j = 0; j < kNumJoints; ++j) {
    auto& v = state.value[j];
    if (observation && (*observation)[j].confidence > 0.0) {
      const auto& o = (*observation)[j];
      if (!state.initialized[j]) {
        v = o;
        state.initialized[j] = true;
      } else {
        // Kept on the pixel grid so smoothed tracks stay exactly mirrorable.
        v.x = snap_pixel(lambda * o.x + (1.0 - lambda) * v.x);
        v.y = snap_pixel(lambda * o.y + (1.0 - lambda) * v.y);
        v.confidence = o.confidence;
      }
    }
    out[j] = state.initialized[j] ? v : Keypoint{};
  }
  return out;
}

FencerTracker::FencerTracker(TrackerConfig config, FrameSize frame_size)
    : config_(config), frame_size_(frame_size) {
  if (!frame_size.known()) throw ValidationError("tracker needs a known frame size");
}

StepResult FencerTracker::step(const PoseFrame& frame) {
  const bool grace = frames_seen_ < config_.grace_frames;
  ++frames_seen_;
  const auto cands = filter_candidates(frame, frame_size_, grace, config_);

  std::vector<std::optional<std::size_t>> match(tracks_.size());  // track slot -> cands index
  std::vector<double> match_cost(tracks_.size(), 0.0);
  std::vector<bool> reassigned(tracks_.size(), false);
  std::vector<bool> taken(cands.size(), false);

  // Gated greedy assignment. Sorting by (cost, id, geometry) makes the result
  // independent of the order candidates arrive in.
  struct Pair {
    double cost;
    std::size_t track;
    std::size_t cand;
  };
  std::vector<Pair> pairs;
  for (std::size_t t = 0; t < tracks_.size(); ++t)
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const double cost =
          association_distance(tracks_[t].last_bbox, cands[c].bbox, frame_size_, config_.alpha, config_.beta);
      if (cost <= config_.gate) pairs.push_back({cost, t, c});
    }
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.track != b.track) return tracks_[a.track].track_id < tracks_[b.track].track_id;
    return geometry_key(cands[a.cand].bbox) < geometry_key(cands[b.cand].bbox);
  });
  for (const auto& p : pairs) {
    if (match[p.track] || taken[p.cand]) continue;
    match[p.track] = p.cand;
    match_cost[p.track] = p.cost;
    taken[p.cand] = true;
  }

  // Lost tracks: recover through IoU with the last box, guarded by pose similarity.
  for (std::size_t t = 0; t < tracks_.size(); ++t) {
    if (match[t] || tracks_[t].frames_missing == 0) continue;
    std::optional<std::size_t> best;
    double best_iou = 0.0;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (taken[c]) continue;
      const double o = iou(tracks_[t].last_bbox, cands[c].bbox);
      if (o <= 0.0) continue;
      if (!best || o > best_iou || (o == best_iou && geometry_key(cands[c].bbox) < geometry_key(cands[*best].bbox))) {
        best = c;
        best_iou = o;
      }
    }
    if (best && pose_dissimilarity(tracks_[t].last_skeleton, cands[*best].skeleton) <= config_.pose_similarity_cap) {
      match[t] = best;
      match_cost[t] = association_distance(tracks_[t].last_bbox, cands[*best].bbox, frame_size_, config_.alpha,
                                           config_.beta);
      reassigned[t] = true;
      taken[*best] = true;
    }
  }

  StepResult result;
  result.frame_index = frame.frame_index;

  // Track creation is only allowed while the grace period lasts.
  std::vector<bool> created(tracks_.size(), false);
  if (grace && tracks_.size() < 2) {
    std::vector<std::size_t> fresh;
    for (std::size_t c = 0; c < cands.size() && tracks_.size() + fresh.size() < 2; ++c)
      if (!taken[c]) fresh.push_back(c);
    std::sort(fresh.begin(), fresh.end(), [&](std::size_t a, std::size_t b) {
      if (cands[a].bbox.center_x() != cands[b].bbox.center_x())
        return cands[a].bbox.center_x() < cands[b].bbox.center_x();
      return geometry_key(cands[a].bbox) < geometry_key(cands[b].bbox);
    });
    for (auto c : fresh) {
      TrackState s;
      s.track_id = tracks_.empty() ? 0 : 1 - tracks_.front().track_id;
      tracks_.push_back(s);
      match.push_back(c);
      match_cost.push_back(0.0);
      reassigned.push_back(false);
      created.push_back(true);
      taken[c] = true;
    }
  }

  for (std::size_t t = 0; t < tracks_.size(); ++t) {
    auto& s = tracks_[t];
    Assignment a;
    a.track_id = s.track_id;
    a.cost = match_cost[t];
    a.reassigned = reassigned[t];
    a.created = created[t];
    Skeleton17 smoothed;
    if (match[t]) {
      const auto& c = cands[*match[t]];
      a.candidate = c.source_index;
      s.last_bbox = c.bbox;
      s.last_skeleton = c.skeleton;
      s.frames_missing = 0;
      smoothed = ema_smooth(s.ema, &c.skeleton, config_.ema_lambda);
    } else {
      ++s.frames_missing;
      smoothed = ema_smooth(s.ema, nullptr, config_.ema_lambda);
    }
    result.assignments.push_back(a);
    result.smoothed[static_cast<std::size_t>(s.track_id)] = smoothed;
    result.present[static_cast<std::size_t>(s.track_id)] = match[t].has_value();
  }
  std::sort(result.assignments.begin(), result.assignments.end(),
            [](const Assignment& x, const Assignment& y) { return x.track_id < y.track_id; });
  return result;
}

TrackingResult run_tracker(const PoseFile& file, const TrackerConfig& config) {
  FencerTracker tracker(config, file.header.frame_size);
  std::array<PoseTrack, 2> tracks;
  std::array<std::optional<double>, 2> first_x;
  std::array<EmaState, 2> idle;  // never-created tracks output empty skeletons
  std::ostringstream report;
  report << "# frame track candidate cost status\n";

  auto emit = [&](std::int64_t index, const StepResult* r) {
    for (int id = 0; id < 2; ++id) {
      TrackFrame f;
      f.frame_index = index;
      if (r && r->smoothed[id]) {
        f.skeleton = *r->smoothed[id];
        f.present = r->present[id];
      } else if (!tracks[id].frames.empty()) {
        f.skeleton = tracks[id].frames.back().skeleton;
      } else {
        f.skeleton = ema_smooth(idle[id], nullptr, config.ema_lambda);
      }
      tracks[id].frames.push_back(f);
    }
  };

  std::optional<std::int64_t> prev;
  for (const auto& frame : file.frames) {
    if (prev)
      for (auto gap = *prev + 1; gap < frame.frame_index; ++gap) {
        emit(gap, nullptr);
        report << gap << " - - - gap\n";
      }
    prev = frame.frame_index;
    const auto r = tracker.step(frame);
    emit(frame.frame_index, &r);
    for (const auto& a : r.assignments) {
      report << frame.frame_index << ' ' << a.track_id << ' ';
      if (a.candidate) {
        report << *a.candidate << ' ' << a.cost << ' '
               << (a.created ? "created" : a.reassigned ? "reassigned" : "matched") << '\n';
        const auto& box = frame.candidates[*a.candidate].bbox;
        if (!first_x[static_cast<std::size_t>(a.track_id)]) first_x[static_cast<std::size_t>(a.track_id)] = box.center_x();
      } else {
        report << "- - held\n";
      }
    }
  }

  // Side assignment: compare where each track was first seen.
  const double mid = 0.5 * file.header.frame_size.width;
  int left_id = 0;
  if (first_x[0] && first_x[1]) left_id = *first_x[0] <= *first_x[1] ? 0 : 1;
  else if (first_x[0]) left_id = *first_x[0] <= mid ? 0 : 1;
  else if (first_x[1]) left_id = *first_x[1] <= mid ? 1 : 0;

  TrackingResult out;
  auto finish = [&](PoseTrack& t, Side side) {
    t.clip_id = file.header.clip_id;
    t.side = side;
    t.mirrored = false;
    t.frame_size = file.header.frame_size;
    t.fps = file.header.fps;
  };
  out.left = std::move(tracks[static_cast<std::size_t>(left_id)]);
  out.right = std::move(tracks[static_cast<std::size_t>(1 - left_id)]);
  finish(out.left, Side::Left);
  finish(out.right, Side::Right);
  out.report = report.str();
  return out;
}

}  // namespace fera
