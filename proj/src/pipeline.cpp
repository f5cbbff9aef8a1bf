// SPDX-License-Identifier: Apache-2.0
#include "fera/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>

#include "fera/calib/kfold.hpp"
#include "fera/calib/temperature.hpp"
#include "fera/calib/thresholds.hpp"
#include "fera/error.hpp"
#include "fera/feature_io.hpp"
#include "fera/mdt/model.hpp"
#include "fera/parallel.hpp"
#include "fera/rng.hpp"
#include "fera/text.hpp"

namespace fera::pipeline {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <typename T>
T field_number(std::string_view v, const std::string& source, std::size_t line, const char* name) {
  const auto n = parse_number<T>(v);
  if (!n) throw ParseError(source, line, name, "expected a number, got \"" + std::string(v) + "\"");
  return *n;
}

template <typename F>
auto field_value(F&& parse, const std::string& source, std::size_t line, const char* name) {
  try {
    return parse();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(source, line, name, e.what());
  }
}

std::vector<MoveSet> truth_moves(const std::vector<mdt::TrainingExample>& examples) {
  std::vector<MoveSet> t;
  t.reserve(examples.size());
  for (const auto& e : examples) t.push_back(e.moves);
  return t;
}

std::vector<BladeLine> truth_blades(const std::vector<mdt::TrainingExample>& examples) {
  std::vector<BladeLine> t;
  t.reserve(examples.size());
  for (const auto& e : examples) t.push_back(e.blade);
  return t;
}

struct MetricSeries {
  std::string name;
  std::vector<double> values;
};

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

std::vector<MetricSeries> overall_series(const CrossValidation& cv) {
  std::vector<MetricSeries> s = {{"macro_f1", {}}, {"micro_f1", {}}, {"weighted_f1", {}}, {"hamming", {}},
                                 {"blade_accuracy", {}}, {"ece", {}}, {"mce", {}}, {"brier", {}}};
  for (const auto& f : cv.folds) {
    const auto& c = f.report.classification;
    const auto& k = f.report.calibration;
    const double vals[] = {c.macro_f1, c.micro_f1, c.weighted_f1, c.hamming, f.report.blade_accuracy,
                           k.ece, k.mce, k.brier};
    for (std::size_t i = 0; i < s.size(); ++i) s[i].values.push_back(vals[i]);
  }
  return s;
}

}  // namespace

std::vector<std::string> Corpus::clip_ids() const {
  std::set<std::string> ids;
  for (const auto& s : sequences) ids.insert(s->clip_id);
  return {ids.begin(), ids.end()};
}

Corpus Corpus::select(const std::vector<std::string>& clips) const {
  const std::set<std::string> keep(clips.begin(), clips.end());
  Corpus out;
  for (const auto& s : sequences)
    if (keep.count(s->clip_id)) out.sequences.push_back(s);
  for (const auto& a : annotations)
    if (keep.count(a.clip_id)) out.annotations.push_back(a);
  return out;
}

Corpus load_corpus(const std::filesystem::path& features_dir, const std::filesystem::path& annotations_csv) {
  std::error_code ec;
  if (!std::filesystem::is_directory(features_dir, ec))
    throw IoError("feature directory " + features_dir.string() + " does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(features_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".feat") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("no .feat files in " + features_dir.string());
  Corpus c;
  for (const auto& f : files) c.sequences.push_back(std::make_shared<const FeatureSequence>(read_feature_file(f)));
  c.annotations = parse_annotations(annotations_csv);
  return c;
}

std::pair<FeatureSequence, FeatureSequence> track_features(const PoseTrack& left, const PoseTrack& right, int jobs) {
  auto compute = [](const PoseTrack& t) { return assemble_features(canonical_view(t)); };
  if (jobs > 1) {
    auto l = std::async(std::launch::async, compute, std::cref(left));
    auto r = compute(right);
    return {l.get(), std::move(r)};
  }
  return {compute(left), compute(right)};
}

calib::Calibration calibrate(const mdt::ModelWeights& weights, const std::vector<mdt::TrainingExample>& val,
                             const EngineConfig& config, std::vector<std::string>* warnings) {
  calib::Calibration c;
  if (val.empty()) return c;
  auto preds = mdt::predict(weights, val, config.subset);
  const auto truth = truth_moves(val);
  if (config.calib.temperature_scaling) {
    auto fit = calib::scale_temperatures(preds, truth, truth_blades(val));
    c.temperatures = fit.temperatures;
    if (warnings) warnings->insert(warnings->end(), fit.warnings.begin(), fit.warnings.end());
    for (auto& p : preds) p = calib::apply_temperatures(p, c.temperatures);
  }
  if (config.calib.per_class_thresholds) {
    auto tuned = calib::tune_thresholds(preds, truth, config.calib.grid);
    c.thresholds = tuned.thresholds;
    if (warnings) warnings->insert(warnings->end(), tuned.warnings.begin(), tuned.warnings.end());
  }
  return c;
}

TrainedModel train_model(const std::vector<mdt::TrainingExample>& train, const std::vector<mdt::TrainingExample>& val,
                         const EngineConfig& config, std::uint64_t seed, const Log& log) {
  if (train.empty()) throw ValidationError("no training examples");
  TrainedModel out;
  std::vector<mdt::TrainingExample> data = train;
  if (config.rebalance.enabled) {
    Rng rng(Rng::derive(seed, 1));
    auto r = mdt::rebalance(std::move(data), config.rebalance, rng);
    data = std::move(r.examples);
    out.warnings = std::move(r.warnings);
  }
  Rng init(Rng::derive(seed, 0));
  out.weights = mdt::init_weights(config.effective_model(), init);

  mdt::TrainOptions opts;
  opts.train = config.train;
  opts.train.seed = Rng::derive(seed, 2);
  opts.augment = config.augment;
  opts.subset = config.subset;
  if (log)
    opts.on_epoch = [&](const mdt::EpochStats& e) {
      log("epoch " + std::to_string(e.epoch) + " loss " + format_fixed(e.mean_loss, 6) + " lr " +
          format_double(e.lr) + " grad_norm " + format_fixed(e.mean_grad_norm, 4));
    };
  out.report = mdt::train(out.weights, data, opts);
  out.warnings.insert(out.warnings.end(), out.report.diagnostics.begin(), out.report.diagnostics.end());
  out.calibration = calibrate(out.weights, val, config, &out.warnings);
  out.data_hash = mdt::data_hash(train);
  return out;
}

Evaluation evaluate(const mdt::ModelWeights& weights, const calib::Calibration& calibration,
                    const std::vector<mdt::TrainingExample>& examples, const EngineConfig& config) {
  if (examples.empty()) throw ValidationError("no examples to evaluate");
  Evaluation ev;
  ev.predictions = mdt::predict(weights, examples, config.subset);
  for (auto& p : ev.predictions) {
    p = calib::apply_temperatures(p, calibration.temperatures);
    ev.decided.push_back(calib::decide_moves(p, calibration.thresholds));
  }
  ev.report = calib::build_report(ev.predictions, ev.decided, truth_moves(examples), truth_blades(examples),
                                  config.calib.bins);
  return ev;
}

CrossValidation cross_validate(const Corpus& corpus, const EngineConfig& config, const Log& log) {
  const auto folds = calib::kfold_split(corpus.clip_ids(), config.seed, config.calib.folds);
  CrossValidation cv;
  cv.folds.resize(folds.size());
  std::mutex log_mutex;
  auto say = [&](const std::string& m) {
    if (!log) return;
    std::lock_guard lock(log_mutex);
    log(m);
  };
  parallel_for(static_cast<int>(folds.size()), config.jobs, [&](int f) {
    const auto& fold = folds[static_cast<std::size_t>(f)];
    auto examples = [&](const std::vector<std::string>& clips) {
      const auto part = corpus.select(clips);
      return mdt::build_examples(part.sequences, part.annotations);
    };
    const auto train = examples(fold.train), val = examples(fold.val), test = examples(fold.test);
    const std::string tag = "fold " + std::to_string(f) + ": ";
    for (const auto* b : {&train, &val, &test})
      for (const auto& w : b->warnings) say(tag + w);
    auto model = train_model(train.examples, val.examples, config, Rng::derive(config.seed, 100 + static_cast<std::uint64_t>(f)),
                             [&](const std::string& m) { say(tag + m); });
    for (const auto& w : model.warnings) say(tag + w);
    auto ev = evaluate(model.weights, model.calibration, test.examples, config);
    auto& r = cv.folds[static_cast<std::size_t>(f)];
    r.fold = f;
    r.report = std::move(ev.report);
    r.calibration = model.calibration;
    r.train = std::move(model.report);
    r.train_examples = train.examples.size();
    r.test_examples = test.examples.size();
    say(tag + "macro_f1 " + format_fixed(r.report.classification.macro_f1, 4));
  });
  return cv;
}

void write_cv_report(std::ostream& out, const CrossValidation& cv) {
  out << "variant " << cv.variant << ", " << cv.folds.size() << " folds\n\n";
  out << "fold,train_examples,test_examples,macro_f1,micro_f1,hamming,ece\n";
  for (const auto& f : cv.folds)
    out << f.fold << ',' << f.train_examples << ',' << f.test_examples << ','
        << format_fixed(f.report.classification.macro_f1, 4) << ',' << format_fixed(f.report.classification.micro_f1, 4)
        << ',' << format_fixed(f.report.classification.hamming, 4) << ',' << format_fixed(f.report.calibration.ece, 4)
        << '\n';
  out << "\nmetric,mean,std\n";
  for (const auto& s : overall_series(cv)) {
    const auto [m, sd] = mean_std(s.values);
    out << s.name << ',' << format_fixed(m, 4) << ',' << format_fixed(sd, 4) << '\n';
  }
  out << "\nclass,f1_mean,f1_std,precision_mean,recall_mean,support\n";
  for (int c = 0; c < kNumMoves; ++c) {
    std::vector<double> f1, pr, rc;
    long support = 0;
    for (const auto& f : cv.folds) {
      const auto& cl = f.report.classification;
      for (std::size_t i = 0; i < cl.classes.size(); ++i) {
        if (cl.classes[i] != c) continue;
        f1.push_back(cl.per_class[i].f1);
        pr.push_back(cl.per_class[i].precision);
        rc.push_back(cl.per_class[i].recall);
        support += cl.per_class[i].support();
      }
    }
    const auto [fm, fs] = mean_std(f1);
    out << move_name(move_from_index(c)) << ',' << format_fixed(fm, 4) << ',' << format_fixed(fs, 4) << ','
        << format_fixed(mean_std(pr).first, 4) << ',' << format_fixed(mean_std(rc).first, 4) << ',' << support << '\n';
  }
}

const std::vector<std::string>& ablation_variants() {
  static const std::vector<std::string> v = {"full",
                                             "no_thresholds",
                                             "raw_joints",
                                             "augment_none",
                                             "augment_noise_only",
                                             "augment_temporal_only",
                                             "augment_feature_specific_only",
                                             "no_temperature",
                                             "equal_loss_weights"};
  return v;
}

EngineConfig apply_variant(EngineConfig config, const std::string& variant) {
  if (variant == "full") return config;
  if (variant == "no_thresholds") {
    config.calib.per_class_thresholds = false;
  } else if (variant == "raw_joints") {
    config.subset = FeatureSubset::RawJoints;
  } else if (variant == "no_temperature") {
    config.calib.temperature_scaling = false;
  } else if (variant == "equal_loss_weights") {
    config.train.equal_loss_weights = true;
  } else if (variant.starts_with("augment_")) {
    config.augment.mode = mdt::parse_augment_mode(std::string_view(variant).substr(8));
  } else {
    std::string all;
    for (const auto& v : ablation_variants()) all += (all.empty() ? "" : ", ") + v;
    throw ValidationError("unknown ablation variant \"" + variant + "\" (expected one of " + all + ")");
  }
  return config;
}

void write_ablation_csv(std::ostream& out, const std::vector<CrossValidation>& runs) {
  out << "variant,metric,mean,std\n";
  for (const auto& cv : runs)
    for (const auto& s : overall_series(cv)) {
      const auto [m, sd] = mean_std(s.values);
      out << cv.variant << ',' << s.name << ',' << format_fixed(m, 4) << ',' << format_fixed(sd, 4) << '\n';
    }
}

ActionTimeline detect_actions(const FeatureSequence& seq, const mdt::ModelWeights& weights,
                              const calib::Calibration& calibration, const EngineConfig& config, ScanStats* stats) {
  ModelClassifier classifier(weights, calibration.temperatures, config.subset);
  auto actions = scan(seq, classifier, calibration.thresholds, config.window, stats);
  return merge_nms(std::move(actions), config.window.nms_iou, seq.clip_id, seq.side);
}

std::vector<ActionTimeline> read_timeline_csv(std::istream& in, const std::string& source_name) {
  std::map<std::pair<std::string, Side>, ActionTimeline> by_key;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto t = trim(text);
    if (t.empty()) continue;
    const auto f = split_csv(t);
    if (line == 1 && f[0] == "clip_id") continue;
    if (f.size() != 7) throw ParseError(source_name, line, "row", "expected 7 fields, got " + std::to_string(f.size()));
    DetectedAction a;
    const Side side = field_value([&] { return parse_side(f[1]); }, source_name, line, "side");
    a.start_frame = field_number<std::int64_t>(f[2], source_name, line, "start");
    a.end_frame = field_number<std::int64_t>(f[3], source_name, line, "end");
    if (a.end_frame < a.start_frame) throw ParseError(source_name, line, "end", "end precedes start");
    if (f[4] != "none") a.moves = field_value([&] { return parse_moves(f[4]); }, source_name, line, "moves");
    a.blade = field_value([&] { return parse_blade(f[5]); }, source_name, line, "blade");
    const double conf = field_number<double>(f[6], source_name, line, "confidence");
    for (auto m : a.moves.labels()) a.move_confidence[static_cast<std::size_t>(move_index(m))] = conf;
    auto& tl = by_key[{std::string(f[0]), side}];
    tl.clip_id = std::string(f[0]);
    tl.side = side;
    tl.actions.push_back(a);
  }
  std::vector<ActionTimeline> out;
  for (auto& [k, tl] : by_key) {
    std::stable_sort(tl.actions.begin(), tl.actions.end(),
                     [](const DetectedAction& a, const DetectedAction& b) { return a.start_frame < b.start_frame; });
    out.push_back(std::move(tl));
  }
  return out;
}

AnnotatedSequence timeline_to_sequence(const ActionTimeline& timeline) {
  AnnotatedSequence s;
  s.clip_id = timeline.clip_id;
  s.side = timeline.side;
  for (const auto& a : timeline.actions) {
    if (a.moves.empty()) continue;
    const AnnotationSegment seg{static_cast<int>(a.start_frame), static_cast<int>(a.end_frame), a.moves, a.blade};
    if (!s.segments.empty() && s.segments.back().start_frame == seg.start_frame) {
      auto& prev = s.segments.back();
      prev.moves = prev.moves.united(seg.moves);
      if (seg.length() > prev.length()) {
        prev.end_frame = seg.end_frame;
        prev.blade = seg.blade;
      }
      continue;
    }
    s.segments.push_back(seg);
  }
  return s;
}

std::vector<ExchangeTranscript> transcripts_from(const std::vector<AnnotatedSequence>& sequences) {
  std::map<std::string, std::array<AnnotatedSequence, 2>> by_clip;
  for (const auto& s : sequences) {
    auto& pair = by_clip[s.clip_id];
    pair[0].clip_id = pair[1].clip_id = s.clip_id;
    pair[0].side = Side::Left;
    pair[1].side = Side::Right;
    auto& slot = pair[static_cast<std::size_t>(s.side)];
    slot.segments.insert(slot.segments.end(), s.segments.begin(), s.segments.end());
  }
  std::vector<ExchangeTranscript> out;
  for (const auto& [clip, pair] : by_clip) out.push_back(align_pair(pair[0], pair[1]));
  return out;
}

void write_predictions_csv(std::ostream& out, const std::vector<SegmentPrediction>& predictions) {
  out << "clip_id,side,start,end,moves,blade";
  for (int c = 0; c < kNumMoves; ++c) out << ",p_" << move_name(move_from_index(c));
  for (int b = 0; b < kNumBlades; ++b) out << ",p_blade_" << blade_name(blade_from_index(b));
  out << '\n';
  for (const auto& p : predictions) {
    out << p.clip_id << ',' << side_name(p.side) << ',' << p.start_frame << ',' << p.end_frame << ','
        << (p.moves.empty() ? std::string("none") : format_moves(p.moves)) << ',' << blade_name(p.blade);
    for (double v : p.move_probs) out << ',' << format_double(v);
    for (double v : p.blade_probs) out << ',' << format_double(v);
    out << '\n';
  }
}

std::vector<SegmentPrediction> read_predictions_csv(std::istream& in, const std::string& source_name) {
  std::vector<SegmentPrediction> out;
  std::string text;
  std::size_t line = 0;
  constexpr std::size_t kFields = 6 + kNumMoves + kNumBlades;
  while (std::getline(in, text)) {
    ++line;
    const auto t = trim(text);
    if (t.empty()) continue;
    const auto f = split_csv(t);
    if (line == 1 && f[0] == "clip_id") continue;
    if (f.size() != kFields)
      throw ParseError(source_name, line, "row",
                       "expected " + std::to_string(kFields) + " fields, got " + std::to_string(f.size()));
    SegmentPrediction p;
    p.clip_id = std::string(f[0]);
    p.side = field_value([&] { return parse_side(f[1]); }, source_name, line, "side");
    p.start_frame = field_number<int>(f[2], source_name, line, "start");
    p.end_frame = field_number<int>(f[3], source_name, line, "end");
    if (f[4] != "none") p.moves = field_value([&] { return parse_moves(f[4]); }, source_name, line, "moves");
    p.blade = field_value([&] { return parse_blade(f[5]); }, source_name, line, "blade");
    for (int c = 0; c < kNumMoves; ++c) {
      const double v = field_number<double>(f[6 + static_cast<std::size_t>(c)], source_name, line, "p_move");
      if (!(v >= 0.0 && v <= 1.0)) throw ParseError(source_name, line, "p_move", "probability outside [0,1]");
      p.move_probs[static_cast<std::size_t>(c)] = v;
    }
    for (int b = 0; b < kNumBlades; ++b) {
      const double v =
          field_number<double>(f[6 + kNumMoves + static_cast<std::size_t>(b)], source_name, line, "p_blade");
      if (!(v >= 0.0 && v <= 1.0)) throw ParseError(source_name, line, "p_blade", "probability outside [0,1]");
      p.blade_probs[static_cast<std::size_t>(b)] = v;
    }
    out.push_back(p);
  }
  return out;
}

calib::MetricsReport score_predictions(const std::vector<SegmentPrediction>& predictions,
                                       const std::vector<AnnotatedSequence>& annotations, int bins) {
  std::map<std::tuple<std::string, Side, int>, const AnnotationSegment*> index;
  for (const auto& a : annotations)
    for (const auto& s : a.segments) index[{a.clip_id, a.side, s.start_frame}] = &s;
  std::vector<mdt::Prediction> preds;
  std::vector<MoveSet> decided, truth;
  std::vector<BladeLine> blades;
  for (const auto& p : predictions) {
    const auto it = index.find({p.clip_id, p.side, p.start_frame});
    if (it == index.end())
      throw ValidationError("prediction for " + p.clip_id + " " + std::string(side_name(p.side)) + " frame " +
                            std::to_string(p.start_frame) + " has no matching annotation");
    mdt::Prediction mp;
    mp.move_probs.assign(p.move_probs.begin(), p.move_probs.end());
    mp.blade_probs.assign(p.blade_probs.begin(), p.blade_probs.end());
    preds.push_back(std::move(mp));
    decided.push_back(p.moves);
    truth.push_back(it->second->moves);
    blades.push_back(it->second->blade);
  }
  if (preds.empty()) throw ValidationError("no predictions to score");
  return calib::build_report(preds, decided, truth, blades, bins);
}

}  // namespace fera::pipeline
