// SPDX-License-Identifier: Apache-2.0
#include "fera/referee/explainer_client.hpp"

#include <cstdlib>
#include <regex>
#include <sstream>

#include "fera/error.hpp"
#include "fera/referee/explain.hpp"
#include "fera/text.hpp"
#include "httplib.h"
#include "json.hpp"

namespace fera::referee {

namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  static const std::regex re(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ValidationError("explainer URL must look like http://host[:port]/path");
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

std::string request(const std::string& prompt, const ExplainerConfig& config) {
  const auto ep = split_url(config.url);
  httplib::Client client(ep.base);
  const auto secs = static_cast<time_t>(config.timeout_seconds);
  const auto usecs = static_cast<time_t>((config.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (const char* token = std::getenv(config.token_env.c_str()); token && *token)
    headers.emplace("Authorization", std::string("Bearer ") + token);

  nlohmann::json body = {{"prompt", prompt}, {"max_tokens", config.max_tokens}, {"temperature", 0}};
  auto res = client.Post(ep.path, headers, body.dump(), "application/json");
  if (!res) throw ValidationError("explainer request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw ValidationError("explainer answered HTTP " + std::to_string(res->status));
  const auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.is_object() || !reply.contains("text") || !reply["text"].is_string())
    throw ValidationError("explainer reply is not JSON with a \"text\" string");
  return reply["text"].get<std::string>();
}

}  // namespace

std::optional<ParsedReply> parse_reply(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::optional<ParsedReply> out;
  bool in_explanation = false;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (!out) {
      if (t.empty()) continue;
      constexpr std::string_view prefix = "Decision:";
      if (!t.starts_with(prefix)) return std::nullopt;
      const auto value = trim(t.substr(prefix.size()));
      if (value != "Left" && value != "Right" && value != "None") return std::nullopt;
      out = ParsedReply{parse_decision(value), {}};
      continue;
    }
    constexpr std::string_view prefix = "Explanation:";
    if (!in_explanation && t.starts_with(prefix)) {
      out->explanation = std::string(trim(t.substr(prefix.size())));
      in_explanation = true;
    } else if (in_explanation) {
      break;  // trailing lines are ignored
    }
  }
  return out;
}

Verdict query_explainer(const std::string& prompt, const ExchangeTranscript& transcript, const ExplainerConfig& config,
                        const RuleToggles& toggles) {
  auto v = referee_exchange(transcript, toggles);
  std::string failure;
  if (config.url.empty()) {
    failure = "no explainer endpoint configured";
  } else {
    try {
      const auto text = request(prompt, config);
      if (const auto parsed = parse_reply(text)) {
        if (parsed->decision != v.decision)
          v.diagnostics.push_back("explainer decision " + std::string(decision_name(parsed->decision)) +
                                  " differs from rule engine decision " + std::string(decision_name(v.decision)));
        v.decision = parsed->decision;
        v.explanation = "Decision: " + std::string(decision_name(parsed->decision)) +
                        "\nExplanation: " + parsed->explanation + "\n";
        v.source = "explainer";
        return v;
      }
      failure = "unparsable explainer reply: first line is not \"Decision: Left|Right|None\"";
    } catch (const ValidationError& e) {
      failure = e.what();
    }
  }
  if (!config.fallback) throw ValidationError(failure);
  v.source = "fallback";
  v.diagnostics.push_back(failure);
  return v;
}

}  // namespace fera::referee
