// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <fstream>
#include <map>
#include <mutex>
#include <ostream>

#include "fera/calib/calibration.hpp"
#include "fera/calib/kfold.hpp"
#include "fera/calib/metrics.hpp"
#include "fera/calib/thresholds.hpp"
#include "fera/error.hpp"
#include "fera/feature_io.hpp"
#include "fera/mdt/archive.hpp"
#include "fera/parallel.hpp"
#include "fera/pipeline.hpp"
#include "fera/pose_io.hpp"
#include "fera/referee/explain.hpp"
#include "fera/referee/explainer_client.hpp"
#include "fera/referee/rulebook.hpp"
#include "fera/synth.hpp"
#include "fera/text.hpp"
#include "fera/tracker.hpp"

namespace fera::cli {

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  ensure_dir(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  return f;
}

bool ends_with(const std::string& s, std::string_view suffix) { return s.ends_with(suffix); }

/// Files named directly plus matching files inside named directories, sorted.
std::vector<fs::path> collect(const std::vector<fs::path>& inputs, std::string_view suffix) {
  std::vector<fs::path> out;
  for (const auto& p : inputs) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && ends_with(e.path().filename().string(), suffix)) found.push_back(e.path());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::exists(p, ec)) {
      out.push_back(p);
    } else {
      throw IoError("input " + p.string() + " does not exist");
    }
  }
  if (out.empty()) throw ValidationError("no input files matching *" + std::string(suffix));
  return out;
}

struct LoadedModel {
  mdt::ModelWeights weights;
  calib::Calibration calibration;
  EngineConfig config;  // subset taken from the weights manifest
};

LoadedModel load_model(const Context& ctx, const ModelInputs& in) {
  if (in.weights.empty()) throw ValidationError("--weights is required");
  auto archive = mdt::load_weights(in.weights);
  LoadedModel m{std::move(archive.weights), {}, ctx.config};
  if (const auto it = archive.manifest.find("features.subset"); it != archive.manifest.end())
    m.config.subset = parse_subset(it->second);
  if (m.weights.config.input_dim != subset_dim(m.config.subset))
    throw ValidationError(in.weights.string() + ": model input width " + std::to_string(m.weights.config.input_dim) +
                          " does not match feature subset " + std::string(subset_name(m.config.subset)));
  if (!in.calibration.empty()) m.calibration = calib::load_calibration(in.calibration);
  return m;
}

/// Fold 0 of the clip-level split, or the whole corpus for "all".
pipeline::Corpus select_split(const pipeline::Corpus& corpus, const EngineConfig& config, const std::string& split) {
  if (split == "all") return corpus;
  const auto folds = calib::kfold_split(corpus.clip_ids(), config.seed, config.calib.folds);
  const auto& f = folds.front();
  if (split == "train") return corpus.select(f.train);
  if (split == "val") return corpus.select(f.val);
  if (split == "test") return corpus.select(f.test);
  throw ValidationError("unknown split \"" + split + "\" (expected all, train, val or test)");
}

std::vector<mdt::TrainingExample> examples_of(const Context& ctx, const pipeline::Corpus& corpus) {
  auto b = mdt::build_examples(corpus.sequences, corpus.annotations);
  for (const auto& w : b.warnings) ctx.log(w);
  return std::move(b.examples);
}

pipeline::Corpus load_corpus_for(const ModelInputs& in) {
  if (in.features.empty() || in.annotations.empty()) throw ValidationError("--features and --annotations are required");
  return pipeline::load_corpus(in.features, in.annotations);
}

void write_report(const Context& ctx, const calib::MetricsReport& report, const std::vector<MoveSet>& predicted) {
  {
    auto f = open_out(ctx.out_dir / "report.txt");
    calib::write_report_text(f, report);
  }
  {
    auto f = open_out(ctx.out_dir / "report.csv");
    calib::write_report_csv(f, report);
  }
  auto f = open_out(ctx.out_dir / "cooccurrence.csv");
  calib::write_cooccurrence_csv(f, calib::cooccurrence(predicted));
  calib::write_report_text(*ctx.out, report);
}

}  // namespace

void Context::log(const std::string& message) const {
  if (err) *err << "fera: " << message << '\n';
}

void cmd_synth(const Context& ctx, int clips) {
  synth::CorpusSpec spec;
  const auto& s = ctx.config.synth;
  spec.clips = clips > 0 ? clips : s.clips;
  spec.seed = ctx.config.seed;
  spec.noise_px = s.noise_px;
  spec.occlusion_prob = s.occlusion_prob;
  spec.sampler.min_steps = s.min_steps;
  spec.sampler.max_steps = s.max_steps;
  spec.sampler.hit_prob = s.hit_prob;
  std::vector<synth::SynthBout> bouts(static_cast<std::size_t>(spec.clips));
  parallel_for(spec.clips, ctx.config.jobs, [&](int i) {
    bouts[static_cast<std::size_t>(i)] = synth::generate_bout(synth::corpus_clip_spec(spec, i));
  });
  synth::write_corpus(ctx.out_dir, bouts);
  ctx.log("wrote " + std::to_string(bouts.size()) + " synthetic clips to " + ctx.out_dir.string());
}

void cmd_track(const Context& ctx, const std::vector<fs::path>& inputs) {
  const auto files = collect(inputs, ".jsonl");
  ensure_dir(ctx.out_dir);
  std::mutex log_mutex;
  parallel_for(static_cast<int>(files.size()), ctx.config.jobs, [&](int i) {
    const auto pose = parse_pose_file(files[static_cast<std::size_t>(i)]);
    const auto result = run_tracker(pose, ctx.config.tracker);
    const auto& id = pose.header.clip_id;
    write_track_file(ctx.out_dir / (id + ".left.track.jsonl"), result.left);
    write_track_file(ctx.out_dir / (id + ".right.track.jsonl"), result.right);
    auto rep = open_out(ctx.out_dir / (id + ".tracking.txt"));
    rep << result.report;
    std::lock_guard lock(log_mutex);
    ctx.log("tracked " + id + " (" + std::to_string(pose.frames.size()) + " frames)");
  });
}

void cmd_features(const Context& ctx, const std::vector<fs::path>& inputs, bool csv) {
  const auto files = collect(inputs, ".track.jsonl");
  ensure_dir(ctx.out_dir);
  parallel_for(static_cast<int>(files.size()), ctx.config.jobs, [&](int i) {
    const auto track = parse_track_file(files[static_cast<std::size_t>(i)]);
    const auto seq = assemble_features(canonical_view(track));
    const auto stem = track.clip_id + "." + std::string(side_name(track.side));
    write_feature_file(ctx.out_dir / (stem + ".feat"), seq);
    if (csv) {
      auto f = open_out(ctx.out_dir / (stem + ".features.csv"));
      write_feature_csv(f, seq);
    }
  });
  ctx.log("wrote features for " + std::to_string(files.size()) + " tracks");
}

void cmd_train(const Context& ctx, const fs::path& features, const fs::path& annotations) {
  const auto& cfg = ctx.config;
  const auto corpus = pipeline::load_corpus(features, annotations);
  const auto clips = corpus.clip_ids();
  pipeline::Corpus train_part = corpus, val_part;
  std::map<std::string, std::string> split;
  for (const auto& c : clips) split[c] = "train";
  if (static_cast<int>(clips.size()) >= 2 * cfg.calib.folds) {
    const auto fold = calib::kfold_split(clips, cfg.seed, cfg.calib.folds).front();
    train_part = corpus.select(fold.train);
    val_part = corpus.select(fold.val);
    for (const auto& c : fold.val) split[c] = "val";
    for (const auto& c : fold.test) split[c] = "test";
  } else {
    ctx.log("fewer than " + std::to_string(2 * cfg.calib.folds) +
            " clips: training on everything without calibration");
  }
  const auto train = examples_of(ctx, train_part);
  const auto val = examples_of(ctx, val_part);

  auto log = open_out(ctx.out_dir / "train_log.csv");
  log << "epoch,loss,lr,grad_norm\n";
  auto model = pipeline::train_model(train, {}, cfg, cfg.seed, [&](const std::string& m) { ctx.log(m); });
  for (const auto& e : model.report.epochs)
    log << e.epoch << ',' << format_double(e.mean_loss) << ',' << format_double(e.lr) << ','
        << format_double(e.mean_grad_norm) << '\n';
  for (const auto& w : model.warnings) ctx.log(w);

  // Calibrate what will be reloaded from disk.
  mdt::round_to_f32(model.weights);
  std::vector<std::string> warnings;
  const auto cal = pipeline::calibrate(model.weights, val, cfg, &warnings);
  for (const auto& w : warnings) ctx.log(w);

  mdt::Manifest manifest = {{"seed", std::to_string(cfg.seed)},
                            {"data_hash", std::to_string(model.data_hash)},
                            {"features.subset", std::string(subset_name(cfg.subset))},
                            {"augment.mode", std::string(mdt::augment_mode_name(cfg.augment.mode))},
                            {"train.epochs", std::to_string(cfg.train.epochs)},
                            {"train.examples", std::to_string(train.size())},
                            {"train.initial_loss", format_double(model.report.initial_loss)},
                            {"train.final_loss", format_double(model.report.final_loss)}};
  mdt::save_weights(ctx.out_dir / "weights.bin", model.weights, manifest);
  calib::save_calibration(ctx.out_dir / "calibration.csv", cal);
  auto s = open_out(ctx.out_dir / "split.csv");
  s << "clip_id,split\n";
  for (const auto& [c, part] : split) s << c << ',' << part << '\n';
  *ctx.out << "trained on " << train.size() << " segments; loss " << format_fixed(model.report.initial_loss, 4)
           << " -> " << format_fixed(model.report.final_loss, 4) << '\n';
}

void cmd_infer(const Context& ctx, const ModelInputs& in) {
  const auto m = load_model(ctx, in);
  const auto corpus = select_split(load_corpus_for(in), m.config, in.split);
  const auto examples = examples_of(ctx, corpus);
  const auto ev = pipeline::evaluate(m.weights, m.calibration, examples, m.config);
  std::vector<pipeline::SegmentPrediction> rows;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& e = examples[i];
    const auto& p = ev.predictions[i];
    pipeline::SegmentPrediction r;
    r.clip_id = e.sequence->clip_id;
    r.side = e.sequence->side;
    r.start_frame = static_cast<int>(e.sequence->first_frame + static_cast<std::int64_t>(e.start));
    r.end_frame = static_cast<int>(e.sequence->first_frame + static_cast<std::int64_t>(e.end));
    r.moves = ev.decided[i];
    r.blade = calib::decide_blade(p);
    std::copy(p.move_probs.begin(), p.move_probs.end(), r.move_probs.begin());
    std::copy(p.blade_probs.begin(), p.blade_probs.end(), r.blade_probs.begin());
    rows.push_back(r);
  }
  auto f = open_out(ctx.out_dir / "predictions.csv");
  pipeline::write_predictions_csv(f, rows);
  ctx.log("wrote " + std::to_string(rows.size()) + " segment predictions");
}

void cmd_window(const Context& ctx, const ModelInputs& in) {
  const auto m = load_model(ctx, in);
  if (in.features.empty()) throw ValidationError("--features is required");
  const auto files = collect({in.features}, ".feat");
  std::vector<ActionTimeline> timelines(files.size());
  std::vector<ScanStats> stats(files.size());
  parallel_for(static_cast<int>(files.size()), ctx.config.jobs, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    const auto seq = read_feature_file(files[k]);
    timelines[k] = pipeline::detect_actions(seq, m.weights, m.calibration, m.config, &stats[k]);
  });
  {
    auto f = open_out(ctx.out_dir / "timelines.csv");
    write_timeline_csv(f, timelines);
  }
  auto f = open_out(ctx.out_dir / "window_stats.csv");
  f << "clip_id,side,forward_passes,resets,actions\n";
  for (std::size_t i = 0; i < files.size(); ++i)
    f << timelines[i].clip_id << ',' << side_name(timelines[i].side) << ',' << stats[i].forward_passes << ','
      << stats[i].resets << ',' << timelines[i].actions.size() << '\n';
}

void cmd_referee(const Context& ctx, const fs::path& timelines, const fs::path& annotations, bool prompts) {
  std::vector<AnnotatedSequence> sequences;
  if (!timelines.empty()) {
    std::ifstream f(timelines, std::ios::binary);
    if (!f) throw IoError("cannot open " + timelines.string());
    for (const auto& t : pipeline::read_timeline_csv(f, timelines.string()))
      sequences.push_back(pipeline::timeline_to_sequence(t));
  } else if (!annotations.empty()) {
    sequences = parse_annotations(annotations);
  } else {
    throw ValidationError("referee needs --timelines or --annotations");
  }
  const auto& cfg = ctx.config;
  const auto book = cfg.rulebook.empty() ? referee::default_rulebook() : referee::load_rulebook(cfg.rulebook);

  auto summary = open_out(ctx.out_dir / "verdicts.csv");
  summary << "clip_id,decision,source,fired_rules\n";
  for (const auto& t : pipeline::transcripts_from(sequences)) {
    referee::Verdict v;
    std::string prompt;
    if (t.events.empty()) {
      v.explanation = "Decision: None\nExplanation: No actions were detected.\n";
      v.diagnostics.push_back("empty transcript");
    } else {
      prompt = referee::format_prompt(t, book);
      v = cfg.explainer.url.empty() ? referee::referee_exchange(t, cfg.rules)
                                    : referee::query_explainer(prompt, t, cfg.explainer, cfg.rules);
    }
    for (const auto& d : v.diagnostics) ctx.log(t.clip_id + ": " + d);
    auto jf = open_out(ctx.out_dir / "verdicts" / (t.clip_id + ".json"));
    jf << referee::verdict_json(v, t.clip_id) << '\n';
    if (prompts && !prompt.empty()) {
      auto pf = open_out(ctx.out_dir / "prompts" / (t.clip_id + ".txt"));
      pf << prompt;
    }
    std::string ids;
    for (const auto& id : v.fired_rule_ids()) ids += (ids.empty() ? "" : "+") + id;
    summary << t.clip_id << ',' << referee::decision_name(v.decision) << ',' << v.source << ','
            << (ids.empty() ? "none" : ids) << '\n';
    *ctx.out << t.clip_id << ": " << referee::decision_name(v.decision) << '\n';
  }
}

void cmd_evaluate(const Context& ctx, const ModelInputs& in, const fs::path& predictions) {
  if (!predictions.empty()) {
    if (in.annotations.empty()) throw ValidationError("--annotations is required");
    std::ifstream f(predictions, std::ios::binary);
    if (!f) throw IoError("cannot open " + predictions.string());
    const auto rows = pipeline::read_predictions_csv(f, predictions.string());
    const auto report = pipeline::score_predictions(rows, parse_annotations(in.annotations), ctx.config.calib.bins);
    std::vector<MoveSet> predicted;
    for (const auto& r : rows) predicted.push_back(r.moves);
    write_report(ctx, report, predicted);
    return;
  }
  const auto m = load_model(ctx, in);
  const auto corpus = select_split(load_corpus_for(in), m.config, in.split);
  const auto ev = pipeline::evaluate(m.weights, m.calibration, examples_of(ctx, corpus), m.config);
  write_report(ctx, ev.report, ev.decided);
}

void cmd_calibrate(const Context& ctx, const ModelInputs& in) {
  const auto m = load_model(ctx, in);
  const auto corpus = select_split(load_corpus_for(in), m.config, in.split);
  std::vector<std::string> warnings;
  const auto cal = pipeline::calibrate(m.weights, examples_of(ctx, corpus), m.config, &warnings);
  for (const auto& w : warnings) ctx.log(w);
  calib::save_calibration(ctx.out_dir / "calibration.csv", cal);
}

void cmd_ablate(const Context& ctx, const fs::path& features, const fs::path& annotations,
                const std::vector<std::string>& variants) {
  const auto corpus = pipeline::load_corpus(features, annotations);
  const auto& names = variants.empty() ? pipeline::ablation_variants() : variants;
  std::vector<pipeline::CrossValidation> runs;
  for (const auto& v : names) {
    const auto cfg = pipeline::apply_variant(ctx.config, v);
    ctx.log("variant " + v);
    auto cv = pipeline::cross_validate(corpus, cfg, [&](const std::string& m) { ctx.log(v + " " + m); });
    cv.variant = v;
    auto f = open_out(ctx.out_dir / ("cv_" + v + ".txt"));
    pipeline::write_cv_report(f, cv);
    runs.push_back(std::move(cv));
  }
  auto f = open_out(ctx.out_dir / "ablation.csv");
  pipeline::write_ablation_csv(f, runs);
  pipeline::write_ablation_csv(*ctx.out, runs);
}

}  // namespace fera::cli
