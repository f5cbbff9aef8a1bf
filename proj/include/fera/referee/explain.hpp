// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "fera/referee/priority.hpp"
#include "fera/referee/rulebook.hpp"
#include "fera/transcript.hpp"

namespace fera::referee {

/// "lunge, hit (134–146)".
std::string cite_event(const TranscriptEvent& e);

/// "Decision: X" line, then an "Explanation:" paragraph with one sentence
/// per fired rule id, each tagged with the id in brackets.
std::string render_explanation(const Verdict& verdict, const ExchangeTranscript& transcript);

/// evaluate_priority plus render_explanation.
Verdict referee_exchange(const ExchangeTranscript& transcript, const RuleToggles& toggles = {});

/// Prompt with the selected rules, both move sequences with blade
/// positions, and the two-part answer request.
std::string format_prompt(const ExchangeTranscript& transcript, const RuleBook& rules);

/// {decision, explanation, fired_rules, priority_trace, source, diagnostics}.
std::string verdict_json(const Verdict& verdict, const std::string& clip_id);

}  // namespace fera::referee
