// SPDX-License-Identifier: Apache-2.0
#include "fera/calib/temperature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "fera/error.hpp"

namespace fera::calib {

namespace {

constexpr double kSearchTolerance = 1e-6;

double log_sigmoid(double z) { return -(std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z)))); }

std::optional<double> try_fit(const std::function<double(double)>& nll) {
  const auto r = golden_section(nll, kTemperatureMin, kTemperatureMax, kSearchTolerance, kTemperatureMaxIterations);
  if (!r.converged || !std::isfinite(nll(r.x))) return std::nullopt;
  return r.x;
}

std::optional<double> try_fit_sigmoid(std::span<const double> logits, std::span<const double> targets) {
  return try_fit([&](double t) { return sigmoid_nll(logits, targets, t); });
}

}  // namespace

void TemperatureSet::validate() const {
  for (double v : t)
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("temperatures must be positive and finite");
}

GoldenResult golden_section(const std::function<double(double)>& f, double lo, double hi, double tolerance,
                            int max_iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  GoldenResult r;
  for (r.iterations = 0; r.iterations < max_iterations; ++r.iterations) {
    if (!std::isfinite(fc) || !std::isfinite(fd)) return r;
    if (b - a <= tolerance) {
      r.converged = true;
      break;
    }
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  r.x = 0.5 * (a + b);
  return r;
}

double sigmoid_nll(std::span<const double> logits, std::span<const double> targets, double temperature) {
  if (logits.size() != targets.size()) throw ValidationError("logit and target counts differ");
  if (logits.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = logits[i] / temperature;
    sum -= targets[i] * log_sigmoid(z) + (1.0 - targets[i]) * log_sigmoid(-z);
  }
  return sum / static_cast<double>(logits.size());
}

double softmax_nll(std::span<const std::vector<double>> logits, std::span<const int> classes, double temperature) {
  if (logits.size() != classes.size()) throw ValidationError("logit and class counts differ");
  if (logits.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const auto& z = logits[i];
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : z) mx = std::max(mx, v / temperature);
    double s = 0.0;
    for (double v : z) s += std::exp(v / temperature - mx);
    sum += mx + std::log(s) - z.at(static_cast<std::size_t>(classes[i])) / temperature;
  }
  return sum / static_cast<double>(logits.size());
}

double fit_sigmoid_temperature(std::span<const double> logits, std::span<const double> targets) {
  if (logits.empty()) return 1.0;
  return try_fit_sigmoid(logits, targets).value_or(1.0);
}

double fit_softmax_temperature(std::span<const std::vector<double>> logits, std::span<const int> classes) {
  if (logits.empty()) return 1.0;
  return try_fit([&](double t) { return softmax_nll(logits, classes, t); }).value_or(1.0);
}

TemperatureFit scale_temperatures(std::span<const mdt::Prediction> predictions, std::span<const MoveSet> truth,
                                  std::span<const BladeLine> blades) {
  if (predictions.size() != truth.size() || predictions.size() != blades.size())
    throw ValidationError("temperature scaling inputs have different lengths");
  TemperatureFit out;
  if (predictions.empty()) {
    out.warnings.push_back("empty validation set; temperatures left at 1");
    return out;
  }
  std::vector<double> z(predictions.size()), y(predictions.size());
  for (int c = 0; c < kNumMoves; ++c) {
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      z[i] = predictions[i].move_logits.at(static_cast<std::size_t>(c));
      y[i] = truth[i].contains(move_from_index(c)) ? 1.0 : 0.0;
    }
    const auto t = try_fit_sigmoid(z, y);
    out.temperatures.t[static_cast<std::size_t>(c)] = t.value_or(1.0);
    if (!t)
      out.warnings.push_back("temperature search for " + std::string(move_name(move_from_index(c))) +
                             " did not settle; using 1");
  }
  std::vector<std::vector<double>> bz;
  std::vector<int> bc;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    bz.push_back(predictions[i].blade_logits);
    bc.push_back(blade_index(blades[i]));
  }
  const double tb = fit_softmax_temperature(bz, bc);
  for (int b = 0; b < kNumBlades; ++b) out.temperatures.t[static_cast<std::size_t>(kNumMoves + b)] = tb;
  return out;
}

mdt::Prediction apply_temperatures(const mdt::Prediction& prediction, const TemperatureSet& temperatures) {
  return mdt::make_prediction(prediction.move_logits, prediction.blade_logits, temperatures.values());
}

}  // namespace fera::calib
