// SPDX-License-Identifier: Apache-2.0
#include "fera/cli.hpp"

#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "fera/error.hpp"

namespace fera::cli {

namespace {

void add_model_inputs(CLI::App* sub, ModelInputs& in, const std::string& default_split) {
  in.split = default_split;
  sub->add_option("--weights", in.weights, "Trained weights archive");
  sub->add_option("--calibration", in.calibration, "Calibration CSV (default: thresholds 0.5, temperatures 1)");
  sub->add_option("--features", in.features, "Directory of .feat files");
  sub->add_option("--annotations", in.annotations, "Annotation CSV");
  sub->add_option("--split", in.split, "all, train, val or test (first fold of the clip split)")
      ->check(CLI::IsMember({"all", "train", "val", "test"}));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Foil bout analysis: pose tracking, move detection and right-of-way verdicts", "fera"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  bool print_config = false;
  app.add_option("--config", config_path, "Engine config file (key = value with [sections])");
  app.add_option("--seed", seed, "Overrides the config seed");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "Directory for outputs");
  app.add_option("--set", overrides, "Config override section.key=value (repeatable)");
  app.add_flag("--print-config", print_config, "Print the effective configuration and exit");

  int synth_clips = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus of pose files and annotations");
  synth->add_option("--clips", synth_clips, "Number of clips (default synth.clips)");

  std::vector<std::filesystem::path> track_inputs;
  auto* track = app.add_subcommand("track", "Track the two fencers in pose files");
  track->add_option("inputs", track_inputs, "Pose files or directories of *.jsonl")->required();

  std::vector<std::filesystem::path> feature_inputs;
  bool feature_csv = false;
  auto* features = app.add_subcommand("features", "Compute 101-D feature sequences from tracks");
  features->add_option("inputs", feature_inputs, "Track files or directories of *.track.jsonl")->required();
  features->add_flag("--csv", feature_csv, "Also write a named-column CSV per track");

  std::filesystem::path train_features, train_annotations;
  auto* train = app.add_subcommand("train", "Train the move detector and calibrate it on a held-out split");
  train->add_option("--features", train_features, "Directory of .feat files")->required();
  train->add_option("--annotations", train_annotations, "Annotation CSV")->required();

  ModelInputs infer_in, window_in, eval_in, calib_in;
  auto* infer = app.add_subcommand("infer", "Classify annotated segments");
  add_model_inputs(infer, infer_in, "all");
  auto* window = app.add_subcommand("window", "Detect actions in untrimmed sequences");
  add_model_inputs(window, window_in, "all");

  std::filesystem::path ref_timelines, ref_annotations;
  bool ref_prompts = false;
  auto* referee = app.add_subcommand("referee", "Decide each exchange by right of way");
  referee->add_option("--timelines", ref_timelines, "Timeline CSV from `window`");
  referee->add_option("--annotations", ref_annotations, "Annotation CSV (ground-truth transcripts)");
  referee->add_flag("--prompts", ref_prompts, "Write the explainer prompt of every clip");

  std::filesystem::path eval_predictions;
  auto* evaluate = app.add_subcommand("evaluate", "Score a model or stored predictions");
  add_model_inputs(evaluate, eval_in, "test");
  evaluate->add_option("--predictions", eval_predictions, "Prediction CSV from `infer`");

  auto* calibrate = app.add_subcommand("calibrate", "Fit temperatures and thresholds on a split");
  add_model_inputs(calibrate, calib_in, "val");

  std::filesystem::path abl_features, abl_annotations;
  std::vector<std::string> variants;
  auto* ablate = app.add_subcommand("ablate", "Cross-validate ablation variants");
  ablate->add_option("--features", abl_features, "Directory of .feat files")->required();
  ablate->add_option("--annotations", abl_annotations, "Annotation CSV")->required();
  ablate->add_option("--variant", variants, "Variant name (repeatable; default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    Context ctx;
    ctx.out = &out;
    ctx.err = &err;
    ctx.out_dir = out_dir;
    if (!config_path.empty()) ctx.config = load_config(config_path);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ValidationError("--set expects key=value, got \"" + o + "\"");
      set_config_value(ctx.config, o.substr(0, eq), o.substr(eq + 1));
    }
    if (seed) ctx.config.seed = *seed;
    if (jobs) ctx.config.jobs = *jobs;
    ctx.config.validate();

    if (print_config) {
      dump_config(out, ctx.config);
      return 0;
    }
    if (*synth) cmd_synth(ctx, synth_clips);
    else if (*track) cmd_track(ctx, track_inputs);
    else if (*features) cmd_features(ctx, feature_inputs, feature_csv);
    else if (*train) cmd_train(ctx, train_features, train_annotations);
    else if (*infer) cmd_infer(ctx, infer_in);
    else if (*window) cmd_window(ctx, window_in);
    else if (*referee) cmd_referee(ctx, ref_timelines, ref_annotations, ref_prompts);
    else if (*evaluate) cmd_evaluate(ctx, eval_in, eval_predictions);
    else if (*calibrate) cmd_calibrate(ctx, calib_in);
    else if (*ablate) cmd_ablate(ctx, abl_features, abl_annotations, variants);
    else {
      out << app.help();
      return 1;
    }
    return 0;
  } catch (const IoError& e) {
    err << "fera: I/O error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "fera: I/O error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "fera: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fera::cli
