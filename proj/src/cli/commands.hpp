// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fera/config.hpp"

namespace fera::cli {

namespace fs = std::filesystem;

struct Context {
  EngineConfig config;
  fs::path out_dir = ".";
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  void log(const std::string& message) const;
};

struct ModelInputs {
  fs::path weights;
  fs::path calibration;  // empty: defaults
  fs::path features;
  fs::path annotations;
  std::string split = "all";  // all, train, val, test (fold 0)
};

void cmd_synth(const Context& ctx, int clips);
void cmd_track(const Context& ctx, const std::vector<fs::path>& inputs);
void cmd_features(const Context& ctx, const std::vector<fs::path>& inputs, bool csv);
void cmd_train(const Context& ctx, const fs::path& features, const fs::path& annotations);
void cmd_infer(const Context& ctx, const ModelInputs& in);
void cmd_window(const Context& ctx, const ModelInputs& in);
void cmd_referee(const Context& ctx, const fs::path& timelines, const fs::path& annotations, bool prompts);
void cmd_evaluate(const Context& ctx, const ModelInputs& in, const fs::path& predictions);
void cmd_calibrate(const Context& ctx, const ModelInputs& in);
void cmd_ablate(const Context& ctx, const fs::path& features, const fs::path& annotations,
                const std::vector<std::string>& variants);

}  // namespace fera::cli
