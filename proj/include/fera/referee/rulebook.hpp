// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fera/labels.hpp"
#include "fera/transcript.hpp"

namespace fera::referee {

inline constexpr std::string_view kRuleInitiation = "A-initiation";
inline constexpr std::string_view kRuleInterruption = "B-interruption";
inline constexpr std::string_view kRuleFallsShort = "C-falls-short";
inline constexpr std::string_view kRuleCounterattack = "D-counterattack";
inline constexpr std::string_view kRuleTouch = "E-touch";

struct Rule {
  std::string id;
  std::string text;
  MoveSet keywords;  // moves whose presence makes the rule relevant

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct RuleBook {
  std::vector<Rule> rules;

  const Rule* find(std::string_view id) const noexcept;
};

/// Foil right-of-way rules covering the five clauses of the priority engine.
RuleBook default_rulebook();

/// Tab-separated `id<TAB>move+move<TAB>text` lines; `#` starts a comment.
RuleBook parse_rulebook_stream(std::istream& in, const std::string& source_name);
RuleBook load_rulebook(const std::filesystem::path& path);

/// Rules whose keywords meet a move of the transcript, in rulebook order.
/// Falls back to the whole book when nothing matches; throws
/// ValidationError("no rules") on an empty book.
std::vector<Rule> select_rules(const ExchangeTranscript& transcript, const RuleBook& book);

}  // namespace fera::referee
