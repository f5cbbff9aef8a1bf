// SPDX-License-Identifier: Apache-2.0
#include "fera/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <type_traits>

#include "fera/error.hpp"
#include "fera/text.hpp"

namespace fera {

namespace {

struct Field {
  std::string key;
  std::function<std::string(const EngineConfig&)> get;
  std::function<void(EngineConfig&, std::string_view)> set;  // throws ValidationError
};

template <typename T>
std::string to_text(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, std::string>) {
    return "\"" + v + "\"";
  } else if constexpr (std::is_floating_point_v<T>) {
    return format_double(v);
  } else {
    return std::to_string(v);
  }
}

template <typename T>
T from_text(std::string_view s) {
  if constexpr (std::is_same_v<T, bool>) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ValidationError("expected true or false, got \"" + std::string(s) + "\"");
  } else if constexpr (std::is_same_v<T, std::string>) {
    return std::string(s);
  } else {
    const auto v = parse_number<T>(s);
    if (!v) throw ValidationError("expected a number, got \"" + std::string(s) + "\"");
    return *v;
  }
}

template <typename Access>
Field plain(std::string key, Access access) {
  using T = std::remove_cvref_t<decltype(access(std::declval<EngineConfig&>()))>;
  return {std::move(key), [access](const EngineConfig& c) { return to_text<T>(access(const_cast<EngineConfig&>(c))); },
          [access](EngineConfig& c, std::string_view v) { access(c) = from_text<T>(v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> v;
    auto add = [&](std::string key, auto access) { v.push_back(plain(std::move(key), access)); };
#define FERA_FIELD(key, expr) add(key, [](EngineConfig& c) -> auto& { return c.expr; })
    FERA_FIELD("seed", seed);
    FERA_FIELD("jobs", jobs);

    FERA_FIELD("tracker.grace_frames", tracker.grace_frames);
    FERA_FIELD("tracker.min_area_fraction", tracker.min_area_fraction);
    FERA_FIELD("tracker.min_confidence", tracker.min_confidence);
    FERA_FIELD("tracker.bottom_margin_px", tracker.bottom_margin_px);
    FERA_FIELD("tracker.score_area_weight", tracker.score_area_weight);
    FERA_FIELD("tracker.score_vertical_weight", tracker.score_vertical_weight);
    FERA_FIELD("tracker.alpha", tracker.alpha);
    FERA_FIELD("tracker.beta", tracker.beta);
    FERA_FIELD("tracker.gate", tracker.gate);
    FERA_FIELD("tracker.pose_similarity_cap", tracker.pose_similarity_cap);
    FERA_FIELD("tracker.ema_lambda", tracker.ema_lambda);

    v.push_back({"features.subset", [](const EngineConfig& c) { return std::string(subset_name(c.subset)); },
                 [](EngineConfig& c, std::string_view s) { c.subset = parse_subset(s); }});

    FERA_FIELD("model.embed_dim", model.embed_dim);
    FERA_FIELD("model.layers", model.layers);
    FERA_FIELD("model.heads", model.heads);
    FERA_FIELD("model.ff_dim", model.ff_dim);
    FERA_FIELD("model.dropout", model.dropout);

    FERA_FIELD("train.lr", train.lr);
    FERA_FIELD("train.weight_decay", train.weight_decay);
    FERA_FIELD("train.beta1", train.beta1);
    FERA_FIELD("train.beta2", train.beta2);
    FERA_FIELD("train.adam_eps", train.adam_eps);
    FERA_FIELD("train.clip_norm", train.clip_norm);
    FERA_FIELD("train.batch_size", train.batch_size);
    FERA_FIELD("train.warmup_epochs", train.warmup_epochs);
    FERA_FIELD("train.flat_epochs", train.flat_epochs);
    FERA_FIELD("train.epochs", train.epochs);
    FERA_FIELD("train.blade_loss_weight", train.blade_loss_weight);
    FERA_FIELD("train.equal_loss_weights", train.equal_loss_weights);

    v.push_back({"augment.mode", [](const EngineConfig& c) { return std::string(mdt::augment_mode_name(c.augment.mode)); },
                 [](EngineConfig& c, std::string_view s) { c.augment.mode = mdt::parse_augment_mode(s); }});
    FERA_FIELD("augment.jitter_max", augment.jitter_max);
    FERA_FIELD("augment.noise_sigma", augment.noise_sigma);
    FERA_FIELD("augment.rotation_max", augment.rotation_max);
    FERA_FIELD("augment.scale_min", augment.scale_min);
    FERA_FIELD("augment.scale_max", augment.scale_max);

    FERA_FIELD("rebalance.enabled", rebalance.enabled);
    FERA_FIELD("rebalance.oversample_target", rebalance.oversample_target);
    FERA_FIELD("rebalance.blade_six_ratio", rebalance.blade_six_ratio);

    FERA_FIELD("calib.per_class_thresholds", calib.per_class_thresholds);
    FERA_FIELD("calib.temperature_scaling", calib.temperature_scaling);
    FERA_FIELD("calib.threshold_min", calib.grid.lo);
    FERA_FIELD("calib.threshold_max", calib.grid.hi);
    FERA_FIELD("calib.threshold_step", calib.grid.step);
    FERA_FIELD("calib.bins", calib.bins);
    FERA_FIELD("calib.folds", calib.folds);

    FERA_FIELD("window.initial_window", window.initial_window);
    FERA_FIELD("window.max_window", window.max_window);
    FERA_FIELD("window.half_step_lookahead", window.half_step_lookahead);
    FERA_FIELD("window.nms_iou", window.nms_iou);

    FERA_FIELD("referee.initiation", rules.initiation);
    FERA_FIELD("referee.interruption", rules.interruption);
    FERA_FIELD("referee.falls_short", rules.falls_short);
    FERA_FIELD("referee.counterattack", rules.counterattack);
    FERA_FIELD("referee.touch", rules.touch);
    FERA_FIELD("referee.rulebook", rulebook);

    FERA_FIELD("explainer.url", explainer.url);
    FERA_FIELD("explainer.token_env", explainer.token_env);
    FERA_FIELD("explainer.timeout_seconds", explainer.timeout_seconds);
    FERA_FIELD("explainer.max_tokens", explainer.max_tokens);
    FERA_FIELD("explainer.fallback", explainer.fallback);

    FERA_FIELD("synth.clips", synth.clips);
    FERA_FIELD("synth.noise_px", synth.noise_px);
    FERA_FIELD("synth.occlusion_prob", synth.occlusion_prob);
    FERA_FIELD("synth.min_steps", synth.min_steps);
    FERA_FIELD("synth.max_steps", synth.max_steps);
    FERA_FIELD("synth.hit_prob", synth.hit_prob);
#undef FERA_FIELD
    return v;
  }();
  return f;
}

const Field* find_field(std::string_view key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

std::string_view unquote(std::string_view v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

/// Drops a trailing `# comment` outside of quotes.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

mdt::ModelConfig EngineConfig::effective_model() const {
  auto m = model;
  m.input_dim = subset_dim(subset);
  return m;
}

void EngineConfig::validate() const {
  if (jobs < 1) throw ValidationError("jobs: must be >= 1");
  effective_model().validate();
  train.validate();
  calib.grid.validate();
  if (calib.bins < 1) throw ValidationError("calib.bins: must be >= 1");
  if (calib.folds < 2) throw ValidationError("calib.folds: must be >= 2");
  if (window.initial_window < 1 || window.max_window < window.initial_window)
    throw ValidationError("window: need 1 <= initial_window <= max_window");
  if (!(window.nms_iou >= 0.0 && window.nms_iou <= 1.0)) throw ValidationError("window.nms_iou: must lie in [0, 1]");
  if (augment.jitter_max < 0 || augment.noise_sigma < 0 || augment.rotation_max < 0 ||
      !(augment.scale_min > 0 && augment.scale_min <= augment.scale_max))
    throw ValidationError("augment: magnitudes must be non-negative and 0 < scale_min <= scale_max");
  if (rebalance.oversample_target < 0) throw ValidationError("rebalance.oversample_target: must be >= 0");
  if (!(tracker.ema_lambda > 0.0 && tracker.ema_lambda <= 1.0))
    throw ValidationError("tracker.ema_lambda: must lie in (0, 1]");
  if (tracker.grace_frames < 0) throw ValidationError("tracker.grace_frames: must be >= 0");
}

void set_config_value(EngineConfig& config, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw ValidationError("unknown config key \"" + key + "\"");
  try {
    f->set(config, unquote(trim(value)));
  } catch (const ValidationError& e) {
    throw ValidationError("config key \"" + key + "\": " + e.what());
  }
}

EngineConfig parse_config_stream(std::istream& in, const std::string& source_name, EngineConfig base) {
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) throw ParseError(source_name, line_no, "section", "malformed section header");
      section = std::string(trim(t.substr(1, t.size() - 2)));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError(source_name, line_no, std::string(t), "expected key = value");
    const auto name = std::string(trim(t.substr(0, eq)));
    const auto key = section.empty() || name.find('.') != std::string::npos ? name : section + "." + name;
    const Field* f = find_field(key);
    if (!f) throw ParseError(source_name, line_no, key, "unknown config key");
    try {
      f->set(base, unquote(trim(t.substr(eq + 1))));
    } catch (const ValidationError& e) {
      throw ParseError(source_name, line_no, key, e.what());
    }
  }
  try {
    base.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source_name + ": " + e.what());
  }
  return base;
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config_stream(in, path.string());
}

void dump_config(std::ostream& out, const EngineConfig& config) {
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const auto s = dot == std::string::npos ? std::string() : f.key.substr(0, dot);
    if (s != section) {
      out << "\n[" << s << "]\n";
      section = s;
    }
    out << (dot == std::string::npos ? f.key : f.key.substr(dot + 1)) << " = " << f.get(config) << '\n';
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

}  // namespace fera
