// SPDX-License-Identifier: Apache-2.0
#include "fera/referee/priority.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "fera/error.hpp"

namespace fera::referee {

namespace {

std::size_t at(Side s) { return static_cast<std::size_t>(s); }

bool has_any(MoveSet m, std::initializer_list<MoveLabel> labels) {
  return std::any_of(labels.begin(), labels.end(), [&](MoveLabel l) { return m.contains(l); });
}

}  // namespace

std::string_view decision_name(Decision d) noexcept {
  switch (d) {
    case Decision::Left: return "Left";
    case Decision::Right: return "Right";
    case Decision::None: break;
  }
  return "None";
}

Decision parse_decision(std::string_view name) {
  if (name == "Left") return Decision::Left;
  if (name == "Right") return Decision::Right;
  if (name == "None") return Decision::None;
  throw ValidationError("unknown decision \"" + std::string(name) + "\" (expected Left, Right or None)");
}

Decision decision_for(Side side) noexcept { return side == Side::Left ? Decision::Left : Decision::Right; }

Decision swapped(Decision d) noexcept {
  if (d == Decision::Left) return Decision::Right;
  if (d == Decision::Right) return Decision::Left;
  return Decision::None;
}

std::vector<std::string> Verdict::fired_rule_ids() const {
  std::vector<std::string> ids;
  for (const auto& f : fired)
    if (std::find(ids.begin(), ids.end(), f.rule_id) == ids.end()) ids.push_back(f.rule_id);
  return ids;
}

bool is_offensive(MoveSet m) noexcept {
  using M = MoveLabel;
  const bool forward = has_any(m, {M::StepForward, M::HalfStepForward});
  return forward || has_any(m, {M::Lunge, M::Fleche, M::Beat});
}

Verdict evaluate_priority(const ExchangeTranscript& t, const RuleToggles& toggles) {
  using M = MoveLabel;
  if (t.events.empty()) throw ValidationError("transcript is empty");

  std::vector<std::size_t> order(t.events.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return t.events[a].start_frame < t.events[b].start_frame; });

  Verdict v;
  std::optional<Side> holder;
  std::optional<Side> fell_short;
  std::vector<std::size_t> fell_short_events;
  std::array<bool, 2> attacked{}, hit{};
  std::vector<std::size_t> hit_events;
  int last_frame = t.events[order.front()].end_frame;
  v.priority_trace.push_back({t.events[order.front()].start_frame, std::nullopt});

  auto fire = [&](std::string_view id, Side side, std::vector<std::size_t> events) {
    v.fired.push_back({std::string(id), side, std::move(events), holder});
  };

  for (std::size_t g = 0; g < order.size();) {
    const int frame = t.events[order[g]].start_frame;
    std::array<MoveSet, 2> ms{};
    std::array<std::vector<std::size_t>, 2> idx{};
    for (; g < order.size() && t.events[order[g]].start_frame == frame; ++g) {
      const auto& e = t.events[order[g]];
      ms[at(e.side)] = ms[at(e.side)].united(e.moves);
      idx[at(e.side)].push_back(order[g]);
      last_frame = std::max(last_frame, e.end_frame);
    }
    const auto before = holder;

    if (!holder) {
      if (toggles.initiation) {
        const bool off_l = is_offensive(ms[0]), off_r = is_offensive(ms[1]);
        if (off_l && off_r) {
          // Simultaneous initiation: nobody gains priority.
          fire(kRuleInitiation, Side::Left, idx[0]);
          fire(kRuleInitiation, Side::Right, idx[1]);
        } else if (off_l || off_r) {
          const Side s = off_l ? Side::Left : Side::Right;
          holder = s;
          fire(kRuleInitiation, s, idx[at(s)]);
        }
      }
    } else {
      const Side h = *holder, d = opposite(h);
      const MoveSet md = ms[at(d)];
      if (!md.empty()) {
        if (toggles.interruption && has_any(md, {M::Parry, M::Beat})) {
          holder = d;
          fire(kRuleInterruption, d, idx[at(d)]);
        } else if (toggles.falls_short && fell_short == h && (is_offensive(md) || md.contains(M::Counterattack))) {
          holder = d;
          auto cited = fell_short_events;
          cited.insert(cited.end(), idx[at(d)].begin(), idx[at(d)].end());
          fire(kRuleFallsShort, d, std::move(cited));
        } else if (md.contains(M::Counterattack)) {
          if (!toggles.counterattack) holder = d;
          fire(kRuleCounterattack, d, idx[at(d)]);
        }
      }
    }
    if (holder != before) fell_short.reset();
    if (holder && has_any(ms[at(*holder)], {M::Lunge, M::Fleche}) && !ms[at(*holder)].contains(M::Hit)) {
      fell_short = holder;
      fell_short_events = idx[at(*holder)];
    }

    for (Side s : {Side::Left, Side::Right}) {
      attacked[at(s)] = attacked[at(s)] || is_offensive(ms[at(s)]) || ms[at(s)].contains(M::Counterattack);
      if (ms[at(s)].contains(M::Hit)) {
        hit[at(s)] = true;
        for (auto i : idx[at(s)])
          if (t.events[i].moves.contains(M::Hit)) hit_events.push_back(i);
      }
    }
    if (holder != before) v.priority_trace.push_back({frame, holder});
  }
  v.priority_trace.push_back({last_frame, holder});

  if (!toggles.touch) {
    v.decision = holder ? decision_for(*holder) : Decision::None;
    return v;
  }
  if (!hit[0] && !hit[1]) {
    v.decision = Decision::None;
  } else if (hit[0] && hit[1]) {
    v.decision = holder ? decision_for(*holder) : Decision::None;
  } else {
    const Side s = hit[0] ? Side::Left : Side::Right;
    v.decision = (holder == s || !attacked[at(opposite(s))]) ? decision_for(s) : Decision::None;
  }
  const Side cited_side = v.decision == Decision::Right ? Side::Right : Side::Left;
  fire(kRuleTouch, cited_side, hit_events);
  return v;
}

}  // namespace fera::referee
