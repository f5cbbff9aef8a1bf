// SPDX-License-Identifier: Apache-2.0
#include "fera/referee/rulebook.hpp"

#include <fstream>
#include <istream>

#include "fera/error.hpp"
#include "fera/text.hpp"

namespace fera::referee {

const Rule* RuleBook::find(std::string_view id) const noexcept {
  for (const auto& r : rules)
    if (r.id == id) return &r;
  return nullptr;
}

RuleBook default_rulebook() {
  using M = MoveLabel;
  RuleBook b;
  b.rules = {
      {std::string(kRuleFallsShort),
       "If an attack is initiated but falls short or misses, priority shifts to the other fencer.",
       {M::Lunge, M::Fleche}},
      {std::string(kRuleInitiation),
       "Priority is given to the fencer who initiates the attack unless it is interrupted.",
       {M::StepForward, M::HalfStepForward, M::Lunge, M::Fleche, M::Beat, M::Fake}},
      {std::string(kRuleInterruption),
       "A parry or a beat by the defending fencer interrupts the attack and gives the defender priority.",
       {M::Parry, M::Beat}},
      {std::string(kRuleCounterattack),
       "A counterattack into a continuing attack does not take priority from the attacker.",
       {M::Counterattack}},
      {std::string(kRuleTouch),
       "When both fencers hit, the fencer holding priority scores; a single hit scores for the priority holder or "
       "against an opponent who never attacked.",
       {M::Hit}},
  };
  return b;
}

RuleBook parse_rulebook_stream(std::istream& in, const std::string& source) {
  RuleBook b;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) throw ParseError(source, line_no, "row", "expected id, moves and text separated by tabs");
    Rule r;
    r.id = std::string(trim(std::string_view(line).substr(0, tab1)));
    if (r.id.empty()) throw ParseError(source, line_no, "id", "rule id is empty");
    if (b.find(r.id)) throw ParseError(source, line_no, "id", "duplicate rule id " + r.id);
    try {
      r.keywords = parse_moves(trim(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1)));
    } catch (const ValidationError& e) {
      throw ParseError(source, line_no, "moves", e.what());
    }
    r.text = std::string(trim(std::string_view(line).substr(tab2 + 1)));
    if (r.text.empty()) throw ParseError(source, line_no, "text", "rule text is empty");
    b.rules.push_back(std::move(r));
  }
  return b;
}

RuleBook load_rulebook(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_rulebook_stream(in, path.string());
}

std::vector<Rule> select_rules(const ExchangeTranscript& transcript, const RuleBook& book) {
  if (book.rules.empty()) throw ValidationError("no rules");
  MoveSet present;
  for (const auto& e : transcript.events) present = present.united(e.moves);
  std::vector<Rule> out;
  for (const auto& r : book.rules)
    if (r.keywords.intersects(present)) out.push_back(r);
  if (out.empty()) out = book.rules;
  return out;
}

}  // namespace fera::referee
