// SPDX-License-Identifier: Apache-2.0
#include "fera/calib/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "fera/error.hpp"
#include "fera/text.hpp"

namespace fera::calib {

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

std::vector<int> all_move_classes() {
  std::vector<int> c(kNumMoves);
  std::iota(c.begin(), c.end(), 0);
  return c;
}

ClassificationMetrics compute_classification(std::span<const MoveSet> predicted, std::span<const MoveSet> truth,
                                             std::span<const int> classes) {
  if (predicted.size() != truth.size()) throw ValidationError("prediction and target counts differ");
  if (predicted.empty()) throw ValidationError("cannot score an empty prediction set");
  if (classes.empty()) throw ValidationError("no classes to score");

  ClassificationMetrics m;
  m.classes.assign(classes.begin(), classes.end());
  long tp = 0, fp = 0, fn = 0, mismatches = 0, support = 0;
  double weighted = 0.0, macro = 0.0;
  for (int c : classes) {
    if (c < 0 || c >= kNumMoves) throw ValidationError("class index " + std::to_string(c) + " out of range");
    const auto label = move_from_index(c);
    ClassScores s;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool p = predicted[i].contains(label), t = truth[i].contains(label);
      s.tp += p && t;
      s.fp += p && !t;
      s.fn += !p && t;
    }
    s.precision = ratio(static_cast<double>(s.tp), static_cast<double>(s.tp + s.fp));
    s.recall = ratio(static_cast<double>(s.tp), static_cast<double>(s.tp + s.fn));
    s.f1 = ratio(2.0 * static_cast<double>(s.tp), static_cast<double>(2 * s.tp + s.fp + s.fn));
    tp += s.tp;
    fp += s.fp;
    fn += s.fn;
    mismatches += s.fp + s.fn;
    support += s.support();
    macro += s.f1;
    weighted += s.f1 * static_cast<double>(s.support());
    m.per_class.push_back(s);
  }
  m.macro_f1 = macro / static_cast<double>(classes.size());
  m.micro_f1 = ratio(2.0 * static_cast<double>(tp), static_cast<double>(2 * tp + fp + fn));
  m.weighted_f1 = ratio(weighted, static_cast<double>(support));
  m.hamming = static_cast<double>(mismatches) / static_cast<double>(truth.size() * classes.size());
  return m;
}

ClassificationMetrics compute_classification(std::span<const MoveSet> predicted, std::span<const MoveSet> truth) {
  const auto c = all_move_classes();
  return compute_classification(predicted, truth, c);
}

CalibrationMetrics compute_calibration(std::span<const double> probs, std::span<const double> outcomes, int bins) {
  if (probs.size() != outcomes.size()) throw ValidationError("probability and outcome counts differ");
  if (bins < 1) throw ValidationError("calibration needs at least one bin");
  CalibrationMetrics m;
  m.bins.assign(static_cast<std::size_t>(bins), BinStats{});
  if (probs.empty()) return m;
  std::vector<double> conf_sum(m.bins.size(), 0.0), acc_sum(m.bins.size(), 0.0);
  double sq = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("probability outside [0, 1]");
    const auto b = static_cast<std::size_t>(std::min(static_cast<int>(std::floor(p * bins)), bins - 1));
    ++m.bins[b].count;
    conf_sum[b] += p;
    acc_sum[b] += outcomes[i];
    sq += (p - outcomes[i]) * (p - outcomes[i]);
  }
  const auto n = static_cast<double>(probs.size());
  for (std::size_t b = 0; b < m.bins.size(); ++b) {
    auto& bin = m.bins[b];
    if (bin.count == 0) continue;
    bin.confidence = conf_sum[b] / static_cast<double>(bin.count);
    bin.accuracy = acc_sum[b] / static_cast<double>(bin.count);
    const double gap = std::abs(bin.accuracy - bin.confidence);
    m.ece += static_cast<double>(bin.count) / n * gap;
    m.mce = std::max(m.mce, gap);
  }
  m.brier = sq / n;
  return m;
}

void flatten_moves(std::span<const mdt::Prediction> predictions, std::span<const MoveSet> truth,
                   std::span<const int> classes, std::vector<double>& probs, std::vector<double>& outcomes) {
  if (predictions.size() != truth.size()) throw ValidationError("prediction and target counts differ");
  probs.clear();
  outcomes.clear();
  for (std::size_t i = 0; i < predictions.size(); ++i)
    for (int c : classes) {
      probs.push_back(predictions[i].move_probs.at(static_cast<std::size_t>(c)));
      outcomes.push_back(truth[i].contains(move_from_index(c)) ? 1.0 : 0.0);
    }
}

CooccurrenceMatrix cooccurrence(std::span<const MoveSet> label_sets) {
  CooccurrenceMatrix m{};
  for (const auto& s : label_sets) {
    const auto labels = s.labels();
    for (auto a : labels)
      for (auto b : labels) ++m[static_cast<std::size_t>(move_index(a))][static_cast<std::size_t>(move_index(b))];
  }
  return m;
}

void write_cooccurrence_csv(std::ostream& out, const CooccurrenceMatrix& m) {
  out << "move";
  for (int j = 0; j < kNumMoves; ++j) out << ',' << move_name(move_from_index(j));
  out << '\n';
  for (int i = 0; i < kNumMoves; ++i) {
    out << move_name(move_from_index(i));
    for (int j = 0; j < kNumMoves; ++j) out << ',' << m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    out << '\n';
  }
}

MetricsReport build_report(std::span<const mdt::Prediction> predictions, std::span<const MoveSet> predicted,
                           std::span<const MoveSet> truth, std::span<const BladeLine> blade_truth, int bins) {
  if (predictions.size() != truth.size() || blade_truth.size() != truth.size())
    throw ValidationError("report inputs have different lengths");
  MetricsReport r;
  r.samples = static_cast<long>(truth.size());
  r.classification = compute_classification(predicted, truth);
  std::vector<double> probs, outcomes;
  const auto classes = all_move_classes();
  flatten_moves(predictions, truth, classes, probs, outcomes);
  r.calibration = compute_calibration(probs, outcomes, bins);
  long correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& bp = predictions[i].blade_probs;
    const auto arg = std::max_element(bp.begin(), bp.end()) - bp.begin();
    correct += arg == blade_index(blade_truth[i]);
  }
  r.blade_accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  return r;
}

void write_report_text(std::ostream& out, const MetricsReport& r) {
  const auto& c = r.classification;
  out << "samples        " << r.samples << '\n'
      << "macro_f1       " << format_fixed(c.macro_f1, 4) << '\n'
      << "micro_f1       " << format_fixed(c.micro_f1, 4) << '\n'
      << "weighted_f1    " << format_fixed(c.weighted_f1, 4) << '\n'
      << "hamming        " << format_fixed(c.hamming, 4) << '\n'
      << "ece            " << format_fixed(r.calibration.ece, 4) << '\n'
      << "mce            " << format_fixed(r.calibration.mce, 4) << '\n'
      << "brier          " << format_fixed(r.calibration.brier, 4) << '\n'
      << "blade_accuracy " << format_fixed(r.blade_accuracy, 4) << "\n\n";
  out << "class                 precision  recall     f1  support\n";
  for (std::size_t i = 0; i < c.classes.size(); ++i) {
    const auto& s = c.per_class[i];
    std::string name(move_name(move_from_index(c.classes[i])));
    name.resize(20, ' ');
    out << name << "  " << format_fixed(s.precision, 4) << "     " << format_fixed(s.recall, 4) << "  "
        << format_fixed(s.f1, 4) << "  " << s.support() << '\n';
  }
}

void write_report_csv(std::ostream& out, const MetricsReport& r) {
  const auto& c = r.classification;
  out << "metric,class,value\n";
  auto row = [&](std::string_view metric, std::string_view cls, double v) {
    out << metric << ',' << cls << ',' << format_double(v) << '\n';
  };
  row("samples", "", static_cast<double>(r.samples));
  row("macro_f1", "", c.macro_f1);
  row("micro_f1", "", c.micro_f1);
  row("weighted_f1", "", c.weighted_f1);
  row("hamming", "", c.hamming);
  row("ece", "", r.calibration.ece);
  row("mce", "", r.calibration.mce);
  row("brier", "", r.calibration.brier);
  row("blade_accuracy", "", r.blade_accuracy);
  for (std::size_t i = 0; i < c.classes.size(); ++i) {
    const auto name = move_name(move_from_index(c.classes[i]));
    row("precision", name, c.per_class[i].precision);
    row("recall", name, c.per_class[i].recall);
    row("f1", name, c.per_class[i].f1);
    row("support", name, static_cast<double>(c.per_class[i].support()));
  }
}

}  // namespace fera::calib
