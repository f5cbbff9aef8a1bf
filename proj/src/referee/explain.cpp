// SPDX-License-Identifier: Apache-2.0
#include "fera/referee/explain.hpp"

#include <algorithm>
#include <cctype>

#include "fera/error.hpp"
#include "json.hpp"

namespace fera::referee {

namespace {

constexpr std::string_view kRangeDash = "–";

std::string range(int a, int b) { return std::to_string(a) + std::string(kRangeDash) + std::to_string(b); }

std::string fencer(Side s) { return s == Side::Left ? "the left fencer" : "the right fencer"; }

std::string cite_all(const ExchangeTranscript& t, const std::vector<std::size_t>& idx, Side side) {
  std::vector<std::string> parts;
  for (auto i : idx)
    if (t.events[i].side == side) parts.push_back(cite_event(t.events[i]));
  if (parts.empty()) return "its action";
  std::string out = parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) out += " and " + parts[k];
  return out;
}

std::string clause(const FiredRule& f, const Verdict& v, const ExchangeTranscript& t) {
  const Side s = f.side, o = opposite(s);
  if (f.rule_id == kRuleInitiation) {
    if (!f.holder) return fencer(s) + " attacks with " + cite_all(t, f.events, s) + " at the same moment as the opponent, so neither gains priority";
    return fencer(s) + " initiates the attack with " + cite_all(t, f.events, s);
  }
  if (f.rule_id == kRuleInterruption) return fencer(s) + " interrupts with " + cite_all(t, f.events, s) + " and takes priority";
  if (f.rule_id == kRuleFallsShort)
    return fencer(o) + "'s " + cite_all(t, f.events, o) + " falls short, so priority shifts to " + fencer(s) + " with " +
           cite_all(t, f.events, s);
  if (f.rule_id == kRuleCounterattack) {
    if (f.holder == s) return fencer(s) + "'s " + cite_all(t, f.events, s) + " takes priority";
    return fencer(s) + "'s " + cite_all(t, f.events, s) + " does not take priority from the continuing attack";
  }
  if (f.rule_id == kRuleTouch) {
    bool hit_l = false, hit_r = false;
    for (auto i : f.events) (t.events[i].side == Side::Left ? hit_l : hit_r) = true;
    if (!hit_l && !hit_r) return "neither fencer hits, so no touch is awarded";
    if (hit_l && hit_r) {
      const std::string both = "both fencers hit, " + fencer(Side::Left).substr(4) + " with " +
                               cite_all(t, f.events, Side::Left) + " and " + fencer(Side::Right).substr(4) + " with " +
                               cite_all(t, f.events, Side::Right);
      if (v.decision == Decision::None) return both + "; neither holds priority, so no touch is awarded";
      const Side holder = v.decision == Decision::Left ? Side::Left : Side::Right;
      return both + "; priority stays with " + fencer(holder) + ", who scores";
    }
    const Side h = hit_l ? Side::Left : Side::Right;
    if (v.decision == Decision::None)
      return fencer(h) + " hits with " + cite_all(t, f.events, h) +
             " without priority against an attacking opponent, so no touch is awarded";
    return fencer(h) + " hits with " + cite_all(t, f.events, h) + " and scores";
  }
  return fencer(s) + " triggers " + f.rule_id;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string blade_phrase(BladeLine b) { return b == BladeLine::Other ? "other" : std::string(blade_name(b)); }

}  // namespace

std::string cite_event(const TranscriptEvent& e) {
  return display_moves(e.moves, ", ") + " (" + range(e.start_frame, e.end_frame) + ")";
}

std::string render_explanation(const Verdict& v, const ExchangeTranscript& t) {
  std::string out = "Decision: " + std::string(decision_name(v.decision)) + "\nExplanation:";
  const auto ids = v.fired_rule_ids();
  if (ids.empty()) return out + " No rule applied.\n";
  for (const auto& id : ids) {
    std::string sentence;
    for (const auto& f : v.fired) {
      if (f.rule_id != id) continue;
      sentence += (sentence.empty() ? "" : "; ") + clause(f, v, t);
    }
    out += " [" + id + "] " + capitalize(sentence) + ".";
  }
  return out + "\n";
}

Verdict referee_exchange(const ExchangeTranscript& transcript, const RuleToggles& toggles) {
  auto v = evaluate_priority(transcript, toggles);
  v.explanation = render_explanation(v, transcript);
  return v;
}

std::string format_prompt(const ExchangeTranscript& t, const RuleBook& rules) {
  const auto selected = select_rules(t, rules);
  std::string out = "Rules:\n";
  for (const auto& r : selected) out += "- " + r.text + "\n";
  out += "\nFencing moves:\n";
  for (Side s : {Side::Left, Side::Right}) {
    out += s == Side::Left ? "Left:" : "Right:";
    const auto events = side_events(t, s);
    if (events.empty()) out += " (no moves)";
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& e = events[i];
      out += " [" + range(e.start_frame, e.end_frame) + "] " + display_moves(e.moves, " + ") + " (blade pos. " +
             blade_phrase(e.blade) + ")" + (i + 1 < events.size() ? ";" : ".");
    }
    out += "\n";
  }
  out +=
      "\nAnswer in two parts:\n"
      "1. One line of the form \"Decision: Left\", \"Decision: Right\" or \"Decision: None\".\n"
      "2. A line starting \"Explanation:\" that briefly justifies the decision from the rules and moves above.\n";
  return out;
}

std::string verdict_json(const Verdict& v, const std::string& clip_id) {
  nlohmann::ordered_json j;
  j["clip_id"] = clip_id;
  j["decision"] = decision_name(v.decision);
  j["explanation"] = v.explanation;
  j["fired_rules"] = v.fired_rule_ids();
  auto trace = nlohmann::ordered_json::array();
  for (const auto& p : v.priority_trace)
    trace.push_back({{"frame", p.frame}, {"holder", p.holder ? std::string(side_name(*p.holder)) : "none"}});
  j["priority_trace"] = trace;
  j["source"] = v.source;
  j["diagnostics"] = v.diagnostics;
  return j.dump(2);
}

}  // namespace fera::referee
