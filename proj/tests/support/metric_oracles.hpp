// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fera/labels.hpp"
#include "fera/rng.hpp"

// Deliberately naive re-implementations used as references.
namespace fera::test {

struct OracleClassification {
  double macro = 0.0, micro = 0.0, weighted = 0.0, hamming = 0.0;
  std::vector<double> f1;
};

inline double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

inline OracleClassification oracle_classification(const std::vector<MoveSet>& pred, const std::vector<MoveSet>& truth) {
  OracleClassification o;
  const std::size_t n = pred.size();
  double all_tp = 0, all_pred = 0, all_true = 0, wsum = 0, support_sum = 0, wrong = 0;
  for (int c = 0; c < kNumMoves; ++c) {
    double tp = 0, npred = 0, ntrue = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto bits_p = pred[i].indicators(), bits_t = truth[i].indicators();
      const bool p = bits_p[static_cast<std::size_t>(c)], t = bits_t[static_cast<std::size_t>(c)];
      if (p) ++npred;
      if (t) ++ntrue;
      if (p && t) ++tp;
      if (p != t) ++wrong;
    }
    const double precision = npred > 0 ? tp / npred : 0.0;
    const double recall = ntrue > 0 ? tp / ntrue : 0.0;
    const double f1 = harmonic(precision, recall);
    o.f1.push_back(f1);
    o.macro += f1 / kNumMoves;
    wsum += f1 * ntrue;
    support_sum += ntrue;
    all_tp += tp;
    all_pred += npred;
    all_true += ntrue;
  }
  o.micro = harmonic(all_pred > 0 ? all_tp / all_pred : 0.0, all_true > 0 ? all_tp / all_true : 0.0);
  o.weighted = support_sum > 0 ? wsum / support_sum : 0.0;
  o.hamming = wrong / static_cast<double>(n * kNumMoves);
  return o;
}

struct OracleCalibration {
  double ece = 0.0, mce = 0.0, brier = 0.0;
};

/// probs and outcomes are N x C, flattened sample-major.
inline OracleCalibration oracle_calibration(const std::vector<double>& probs, const std::vector<double>& outcomes,
                                            int bins) {
  OracleCalibration o;
  const double n = static_cast<double>(probs.size());
  for (int m = 0; m < bins; ++m) {
    const double lo = static_cast<double>(m) / bins, hi = static_cast<double>(m + 1) / bins;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const bool last = m == bins - 1;
      if (probs[i] >= lo && (probs[i] < hi || (last && probs[i] <= 1.0))) members.push_back(i);
    }
    if (members.empty()) continue;
    double conf = 0, acc = 0;
    for (auto i : members) {
      conf += probs[i];
      acc += outcomes[i];
    }
    conf /= static_cast<double>(members.size());
    acc /= static_cast<double>(members.size());
    o.ece += static_cast<double>(members.size()) / n * std::abs(acc - conf);
    o.mce = std::max(o.mce, std::abs(acc - conf));
  }
  for (std::size_t i = 0; i < probs.size(); ++i) o.brier += std::pow(probs[i] - outcomes[i], 2) / n;
  return o;
}

/// Best grid threshold by exhaustive F1 evaluation, smallest on ties.
inline double oracle_threshold(const std::vector<double>& probs, const std::vector<std::uint8_t>& targets) {
  double best_tau = 0.0, best_f1 = -1.0;
  for (int k = 5; k <= 95; ++k) {
    const double tau = k / 100.0;
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const bool p = probs[i] >= tau;
      tp += p && targets[i];
      fp += p && !targets[i];
      fn += !p && targets[i];
    }
    const double f1 = harmonic(tp + fp > 0 ? tp / (tp + fp) : 0.0, tp + fn > 0 ? tp / (tp + fn) : 0.0);
    if (f1 > best_f1 + 1e-15) {
      best_f1 = f1;
      best_tau = tau;
    }
  }
  return best_tau;
}

inline MoveSet random_moves(Rng& rng, double p) {
  MoveSet s;
  for (int c = 0; c < kNumMoves; ++c)
    if (rng.bernoulli(p)) s.insert(move_from_index(c));
  return s;
}

}  // namespace fera::test
