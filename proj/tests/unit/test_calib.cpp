// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fera/calib/calibration.hpp"
#include "fera/calib/kfold.hpp"
#include "fera/calib/metrics.hpp"
#include "fera/calib/temperature.hpp"
#include "fera/calib/thresholds.hpp"
#include "fera/error.hpp"
#include "metric_oracles.hpp"

using namespace fera;
using namespace fera::calib;

namespace {

mdt::Prediction prediction_with_probs(const std::vector<double>& move_probs) {
  std::vector<double> logits;
  for (double p : move_probs) logits.push_back(std::log(p / (1.0 - p)));
  return mdt::make_prediction(logits, std::vector<double>(5, 0.0));
}

}  // namespace

TEST_CASE("classification metrics") {
  SUBCASE("perfect predictions") {
    Rng rng(1);
    std::vector<MoveSet> t;
    for (int i = 0; i < 30; ++i) t.push_back(test::random_moves(rng, 0.4));
    t.push_back(MoveSet{(1u << kNumMoves) - 1});  // every class present
    const auto m = compute_classification(t, t);
    CHECK(m.macro_f1 == 1.0);
    CHECK(m.micro_f1 == 1.0);
    CHECK(m.weighted_f1 == 1.0);
    CHECK(m.hamming == 0.0);
  }
  SUBCASE("one class: TP 1, FP 1, FN 0") {
    const std::vector<MoveSet> pred{{MoveLabel::Lunge}, {MoveLabel::Lunge}};
    const std::vector<MoveSet> truth{{MoveLabel::Lunge}, {}};
    const std::vector<int> classes{move_index(MoveLabel::Lunge)};
    const auto m = compute_classification(pred, truth, classes);
    CHECK(m.per_class[0].precision == 0.5);
    CHECK(m.per_class[0].recall == 1.0);
    CHECK(m.per_class[0].f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("absent classes count as zero in the macro average") {
    const std::vector<MoveSet> s{{MoveLabel::Wait}};
    const auto m = compute_classification(s, s);
    CHECK(m.macro_f1 == doctest::Approx(1.0 / 12.0));
    CHECK(m.micro_f1 == 1.0);
  }
  SUBCASE("weighted equals macro when supports are equal") {
    std::vector<MoveSet> truth, pred;
    Rng rng(2);
    for (int i = 0; i < kNumMoves; ++i) {
      truth.push_back({move_from_index(i)});
      pred.push_back(rng.bernoulli(0.5) ? MoveSet{move_from_index(i)} : MoveSet{move_from_index((i + 1) % 12)});
    }
    const auto m = compute_classification(pred, truth);
    CHECK(m.weighted_f1 == doctest::Approx(m.macro_f1).epsilon(1e-12));
  }
  SUBCASE("brute-force oracle on random instances") {
    Rng rng(3);
    for (int k = 0; k < 100; ++k) {
      std::vector<MoveSet> pred, truth;
      for (int i = 0; i < 50; ++i) {
        pred.push_back(test::random_moves(rng, 0.2));
        truth.push_back(test::random_moves(rng, 0.2));
      }
      const auto got = compute_classification(pred, truth);
      const auto want = test::oracle_classification(pred, truth);
      CHECK(std::abs(got.macro_f1 - want.macro) <= 1e-9);
      CHECK(std::abs(got.micro_f1 - want.micro) <= 1e-9);
      CHECK(std::abs(got.weighted_f1 - want.weighted) <= 1e-9);
      CHECK(std::abs(got.hamming - want.hamming) <= 1e-9);
    }
  }
  SUBCASE("hamming is zero exactly on identical sets") {
    Rng rng(4);
    for (int k = 0; k < 300; ++k) {
      const std::vector<MoveSet> a{test::random_moves(rng, 0.3)};
      const std::vector<MoveSet> b{rng.bernoulli(0.5) ? a[0] : test::random_moves(rng, 0.3)};
      CHECK((compute_classification(a, b).hamming == 0.0) == (a[0] == b[0]));
    }
  }
  SUBCASE("class relabeling permutes per-class scores") {
    Rng rng(5);
    std::vector<MoveSet> pred, truth;
    for (int i = 0; i < 40; ++i) {
      pred.push_back(test::random_moves(rng, 0.3));
      truth.push_back(test::random_moves(rng, 0.3));
    }
    auto rotate = [](MoveSet s) {
      MoveSet r;
      for (auto m : s.labels()) r.insert(move_from_index((move_index(m) + 5) % kNumMoves));
      return r;
    };
    std::vector<MoveSet> rp, rt;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      rp.push_back(rotate(pred[i]));
      rt.push_back(rotate(truth[i]));
    }
    const auto a = compute_classification(pred, truth), b = compute_classification(rp, rt);
    CHECK(a.macro_f1 == doctest::Approx(b.macro_f1).epsilon(1e-14));
    for (int c = 0; c < kNumMoves; ++c) CHECK(a.per_class[c].f1 == b.per_class[(c + 5) % kNumMoves].f1);
  }
  SUBCASE("errors") {
    const std::vector<MoveSet> none;
    CHECK_THROWS_AS(compute_classification(none, none), ValidationError);
  }
}

TEST_CASE("calibration metrics") {
  SUBCASE("hard correct predictions") {
    const std::vector<double> p{1, 0, 1, 0}, y{1, 0, 1, 0};
    const auto m = compute_calibration(p, y);
    CHECK(m.ece == 0.0);
    CHECK(m.mce == 0.0);
    CHECK(m.brier == 0.0);
  }
  SUBCASE("four samples") {
    const std::vector<double> p{0.9, 0.9, 0.6, 0.6}, y{1, 1, 1, 0};
    const auto m = compute_calibration(p, y, 10);
    CHECK(m.ece == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(m.mce == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("brute-force oracle") {
    Rng rng(6);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> p, y;
      for (int i = 0; i < 50 * kNumMoves; ++i) {
        p.push_back(rng.uniform());
        y.push_back(rng.bernoulli(p.back()) ? 1.0 : 0.0);
      }
      for (int bins : {10, 15}) {
        const auto got = compute_calibration(p, y, bins);
        const auto want = test::oracle_calibration(p, y, bins);
        CHECK(std::abs(got.ece - want.ece) <= 1e-9);
        CHECK(std::abs(got.mce - want.mce) <= 1e-9);
        CHECK(std::abs(got.brier - want.brier) <= 1e-9);
        CHECK(got.ece <= got.mce + 1e-15);
        CHECK(got.brier >= 0.0);
        CHECK(got.brier <= 1.0);
      }
    }
  }
  SUBCASE("probability one goes in the last bin") {
    const std::vector<double> p{1.0}, y{1.0};
    CHECK(compute_calibration(p, y, 15).bins.back().count == 1);
  }
}

TEST_CASE("co-occurrence") {
  const std::vector<MoveSet> one{{MoveLabel::StepForward, MoveLabel::Beat}};
  const auto m = cooccurrence(one);
  const auto sf = static_cast<std::size_t>(move_index(MoveLabel::StepForward));
  const auto bt = static_cast<std::size_t>(move_index(MoveLabel::Beat));
  CHECK(m[sf][bt] == 1);
  CHECK(m[bt][sf] == 1);
  CHECK(m[sf][sf] == 1);
  CHECK(m[bt][bt] == 1);

  const std::vector<MoveSet> singles{{MoveLabel::Wait}, {MoveLabel::Lunge}, {MoveLabel::Wait}};
  const auto s = cooccurrence(singles);
  for (std::size_t i = 0; i < kNumMoves; ++i)
    for (std::size_t j = 0; j < kNumMoves; ++j)
      if (i != j) CHECK(s[i][j] == 0);
  CHECK(s[static_cast<std::size_t>(move_index(MoveLabel::Wait))][static_cast<std::size_t>(move_index(MoveLabel::Wait))] == 2);

  Rng rng(7);
  std::vector<MoveSet> r;
  for (int i = 0; i < 100; ++i) r.push_back(test::random_moves(rng, 0.3));
  const auto rm = cooccurrence(r);
  for (std::size_t i = 0; i < kNumMoves; ++i)
    for (std::size_t j = 0; j < kNumMoves; ++j) CHECK(rm[i][j] == rm[j][i]);

  std::ostringstream csv;
  write_cooccurrence_csv(csv, m);
  CHECK(csv.str().rfind("move,step_forward,", 0) == 0);
}

TEST_CASE("threshold tuning") {
  SUBCASE("grid") {
    const auto g = threshold_grid();
    REQUIRE(g.size() == 91);
    CHECK(g.front() == 0.05);
    CHECK(g.back() == 0.95);
    CHECK(g[6] == 0.11);
  }
  SUBCASE("separated classes pick the smallest optimal threshold") {
    const std::vector<double> p{0.95, 0.9, 0.92, 0.1, 0.05, 0.02};
    const std::vector<std::uint8_t> y{1, 1, 1, 0, 0, 0};
    CHECK(best_threshold(p, y) == 0.11);
  }
  SUBCASE("no positives falls back to 0.5 with a warning") {
    std::vector<mdt::Prediction> preds;
    std::vector<MoveSet> truth;
    for (int i = 0; i < 10; ++i) {
      preds.push_back(prediction_with_probs(std::vector<double>(12, 0.3 + 0.01 * i)));
      truth.push_back({MoveLabel::StepForward});
    }
    const auto t = tune_thresholds(preds, truth);
    CHECK(t.thresholds.tau[move_index(MoveLabel::Lunge)] == 0.5);
    CHECK(t.warnings.size() == 11);
    CHECK_FALSE(best_threshold(std::vector<double>{0.2}, std::vector<std::uint8_t>{0}).has_value());
  }
  SUBCASE("matches exhaustive search") {
    Rng rng(8);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> p;
      std::vector<std::uint8_t> y;
      for (int i = 0; i < 50; ++i) {
        y.push_back(rng.bernoulli(0.3) ? 1 : 0);
        p.push_back(std::clamp(rng.normal(y.back() ? 0.6 : 0.4, 0.2), 0.0, 1.0));
      }
      if (std::count(y.begin(), y.end(), 1) == 0) continue;
      CHECK(*best_threshold(p, y) == doctest::Approx(test::oracle_threshold(p, y)).epsilon(1e-12));
    }
  }
  SUBCASE("decisions use p >= tau") {
    auto pred = prediction_with_probs(std::vector<double>(12, 0.2));
    pred.move_probs[0] = 0.5;
    pred.move_probs[3] = 0.7;
    CHECK(decide_moves(pred, ThresholdSet{}) == MoveSet{MoveLabel::StepForward, MoveLabel::HalfStepBackward});
    ThresholdSet bad = ThresholdSet::uniform(1.0);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
  }
}

TEST_CASE("temperature scaling") {
  SUBCASE("golden section finds a parabola minimum") {
    const auto r = golden_section([](double x) { return (x - 3.3) * (x - 3.3); }, 0.05, 20, 1e-9, 200);
    CHECK(r.converged);
    CHECK(r.x == doctest::Approx(3.3).epsilon(1e-6));
    const auto capped = golden_section([](double x) { return (x - 3.3) * (x - 3.3); }, 0.05, 20, 1e-30, 5);
    CHECK_FALSE(capped.converged);
  }
  SUBCASE("calibrated logits give T near 1") {
    Rng rng(9);
    std::vector<double> z, y;
    for (int i = 0; i < 20000; ++i) {
      z.push_back(rng.normal(0.0, 2.0));
      y.push_back(rng.bernoulli(1.0 / (1.0 + std::exp(-z.back()))) ? 1.0 : 0.0);
    }
    const double t = fit_sigmoid_temperature(z, y);
    CHECK(std::abs(t - 1.0) <= 0.05);
    // Coarse scan of the NLL curve agrees.
    double best = 0, best_nll = 1e300;
    for (double c = 0.5; c <= 2.0; c += 0.01) {
      const double v = sigmoid_nll(z, y, c);
      if (v < best_nll) {
        best_nll = v;
        best = c;
      }
    }
    CHECK(std::abs(t - best) <= 0.011);
  }
  SUBCASE("overconfident logits are cooled") {
    Rng rng(10);
    std::vector<double> z, y;
    for (int i = 0; i < 5000; ++i) {
      const double true_z = rng.normal(0.0, 1.5);
      z.push_back(3.0 * true_z);
      y.push_back(rng.bernoulli(1.0 / (1.0 + std::exp(-true_z))) ? 1.0 : 0.0);
    }
    CHECK(fit_sigmoid_temperature(z, y) == doctest::Approx(3.0).epsilon(0.1));
  }
  SUBCASE("softmax temperature recovery") {
    Rng rng(11);
    std::vector<std::vector<double>> logits;
    std::vector<int> classes;
    for (int i = 0; i < 4000; ++i) {
      std::vector<double> z(5);
      for (auto& v : z) v = rng.normal(0.0, 1.5);
      double sum = 0;
      for (double v : z) sum += std::exp(v);
      double u = rng.uniform() * sum;
      int c = 0;
      while (c < 4 && (u -= std::exp(z[static_cast<std::size_t>(c)])) > 0) ++c;
      for (auto& v : z) v *= 0.5;  // underconfident by 2
      logits.push_back(z);
      classes.push_back(c);
    }
    CHECK(fit_softmax_temperature(logits, classes) == doctest::Approx(0.5).epsilon(0.1));
  }
  SUBCASE("large temperature flattens, ordering is kept") {
    const auto p = mdt::make_prediction({4.0, -2.0, 0.5, 1, 1, 1, 1, 1, 1, 1, 1, 1}, {1, 2, 3, 4, 5});
    TemperatureSet t;
    t.t.fill(1e9);
    const auto flat = apply_temperatures(p, t);
    for (double v : flat.move_probs) CHECK(v == doctest::Approx(0.5));
    TemperatureSet t2;
    t2.t[0] = 3.0;
    const auto a = mdt::make_prediction({4.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0});
    const auto b = mdt::make_prediction({-1.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0});
    CHECK(apply_temperatures(a, t2).move_probs[0] > apply_temperatures(b, t2).move_probs[0]);
  }
  SUBCASE("scaled thresholds reproduce the decision set") {
    Rng rng(12);
    const double T = 2.5, tau = 0.37;
    const double tau_scaled = 1.0 / (1.0 + std::exp(-std::log(tau / (1.0 - tau)) / T));
    TemperatureSet ts;
    ts.t[2] = T;
    for (int i = 0; i < 200; ++i) {
      std::vector<double> z(12);
      for (auto& v : z) v = rng.normal(0, 3);
      const auto p = mdt::make_prediction(z, std::vector<double>(5, 0.0));
      const auto q = apply_temperatures(p, ts);
      CHECK((p.move_probs[2] >= tau) == (q.move_probs[2] >= tau_scaled));
    }
  }
}

TEST_CASE("calibration files") {
  Calibration c;
  for (int i = 0; i < kNumMoves; ++i) {
    c.thresholds.tau[static_cast<std::size_t>(i)] = 0.05 + 0.07 * i;
    c.temperatures.t[static_cast<std::size_t>(i)] = 0.5 + 0.3 * i;
  }
  for (int b = 0; b < kNumBlades; ++b) c.temperatures.t[static_cast<std::size_t>(kNumMoves + b)] = 1.7;
  std::stringstream ss;
  write_calibration_stream(ss, c);
  CHECK(read_calibration_stream(ss, "rt") == c);

  std::istringstream bad("kind,name,threshold,temperature\nmove,jump,0.5,1\n");
  CHECK_THROWS_AS(read_calibration_stream(bad, "bad"), ValidationError);
}

TEST_CASE("k-fold splits") {
  std::vector<std::string> clips;
  for (int i = 0; i < 100; ++i) clips.push_back("clip" + std::to_string(i));
  const auto folds = kfold_split(clips, 42);
  REQUIRE(folds.size() == 5);
  std::set<std::string> tests;
  for (const auto& f : folds) {
    CHECK(f.train.size() == 80);
    CHECK(f.val.size() == 10);
    CHECK(f.test.size() == 10);
    std::set<std::string> all(f.train.begin(), f.train.end());
    all.insert(f.val.begin(), f.val.end());
    all.insert(f.test.begin(), f.test.end());
    CHECK(all.size() == 100);
    for (const auto& t : f.test) CHECK(tests.insert(t).second);
  }
  CHECK(tests.size() == 50);

  const auto again = kfold_split(clips, 42);
  for (std::size_t i = 0; i < folds.size(); ++i) CHECK(folds[i].test == again[i].test);
  CHECK(kfold_split(clips, 43)[0].test != folds[0].test);

  std::vector<std::string> few(9, "x");
  for (int i = 0; i < 9; ++i) few[static_cast<std::size_t>(i)] += std::to_string(i);
  CHECK_THROWS_AS(kfold_split(few, 1), ValidationError);
}
