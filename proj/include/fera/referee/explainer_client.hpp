// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "fera/referee/priority.hpp"
#include "fera/referee/rulebook.hpp"
#include "fera/transcript.hpp"

namespace fera::referee {

struct ExplainerConfig {
  std::string url;  // http://host[:port]/path; empty disables the client
  std::string token_env = "FERA_EXPLAINER_TOKEN";
  double timeout_seconds = 10.0;
  int max_tokens = 256;
  bool fallback = true;
};

struct ParsedReply {
  Decision decision = Decision::None;
  std::string explanation;
};

/// Reads "Decision: X" from the first non-empty line and the text after an
/// "Explanation:" line; anything else is ignored. nullopt when the first
/// line is not a decision.
std::optional<ParsedReply> parse_reply(const std::string& text);

/// Asks the external text generator for a verdict. On any failure (no
/// endpoint, network, timeout, bad reply) the deterministic verdict is
/// returned with source "fallback" and a diagnostic; with fallback
/// disabled the failure is thrown as ValidationError.
Verdict query_explainer(const std::string& prompt, const ExchangeTranscript& transcript, const ExplainerConfig& config,
                        const RuleToggles& toggles = {});

}  // namespace fera::referee
