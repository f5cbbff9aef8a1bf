// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fera/referee/rulebook.hpp"
#include "fera/transcript.hpp"

namespace fera::referee {

enum class Decision { Left, Right, None };

std::string_view decision_name(Decision d) noexcept;
Decision parse_decision(std::string_view name);
Decision decision_for(Side side) noexcept;
/// Left <-> Right, None fixed.
Decision swapped(Decision d) noexcept;

/// Individual switches for the five clauses, for auditing.
struct RuleToggles {
  bool initiation = true;      // (a) first offensive action takes priority
  bool interruption = true;    // (b) defender's parry or beat takes priority
  bool falls_short = true;     // (c) missed lunge/fleche hands priority to the next action
  bool counterattack = true;   // (d) counterattack never takes priority (off: it does)
  bool touch = true;           // (e) hits resolved against priority (off: holder wins)
};

struct FiredRule {
  std::string rule_id;
  Side side = Side::Left;           // fencer whose action triggered the rule
  std::vector<std::size_t> events;  // transcript indices cited by the rule
  std::optional<Side> holder;       // priority after the rule applied
};

struct PriorityPoint {
  int frame = 0;
  std::optional<Side> holder;
  friend bool operator==(const PriorityPoint&, const PriorityPoint&) = default;
};

struct Verdict {
  Decision decision = Decision::None;
  std::string explanation;
  std::vector<FiredRule> fired;
  std::vector<PriorityPoint> priority_trace;
  std::string source = "rules";  // rules, explainer or fallback
  std::vector<std::string> diagnostics;

  /// Distinct rule ids in first-fired order.
  std::vector<std::string> fired_rule_ids() const;
};

/// Offensive for initiation purposes: forward footwork, lunge, fleche or
/// beat; a fake only together with forward footwork.
bool is_offensive(MoveSet moves) noexcept;

/// Right-of-way state machine over the transcript. Events sharing a start
/// frame are resolved together so the outcome does not depend on which
/// side is listed first. Fills everything except the explanation.
Verdict evaluate_priority(const ExchangeTranscript& transcript, const RuleToggles& toggles = {});

}  // namespace fera::referee
