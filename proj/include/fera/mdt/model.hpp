// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fera/mdt/config.hpp"
#include "fera/rng.hpp"

namespace fera::mdt {

using Mat = Eigen::MatrixXd;  // row = time step; biases and norm parameters are 1×n
using Vec = Eigen::VectorXd;

struct LayerWeights {
  Mat wq, bq, wk, bk, wv, bv, wo, bo;
  Mat ln1_gamma, ln1_beta;
  Mat ff1_w, ff1_b, ff2_w, ff2_b;
  Mat ln2_gamma, ln2_beta;
};

/// All trainable tensors. Projections are stored in×out so a layer is X·W + b.
struct ModelWeights {
  ModelConfig config;
  Mat input_w, input_b;
  std::vector<LayerWeights> layers;
  Mat head_w, head_b;

  /// Zero tensors shaped for `config`.
  static ModelWeights zeros(const ModelConfig& config);

  /// Visits every tensor in archive order as f(name, tensor).
  template <typename F>
  void for_each(F&& f) {
    visit_impl(*this, f);
  }
  template <typename F>
  void for_each(F&& f) const {
    visit_impl(*this, f);
  }

  std::size_t parameter_count() const;
  void set_zero();

private:
  template <typename Self, typename F>
  static void visit_impl(Self& self, F& f) {
    f(std::string("input.weight"), self.input_w);
    f(std::string("input.bias"), self.input_b);
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      auto& L = self.layers[l];
      const std::string p = "layers." + std::to_string(l) + ".";
      f(p + "attn.q.weight", L.wq);
      f(p + "attn.q.bias", L.bq);
      f(p + "attn.k.weight", L.wk);
      f(p + "attn.k.bias", L.bk);
      f(p + "attn.v.weight", L.wv);
      f(p + "attn.v.bias", L.bv);
      f(p + "attn.out.weight", L.wo);
      f(p + "attn.out.bias", L.bo);
      f(p + "norm1.gamma", L.ln1_gamma);
      f(p + "norm1.beta", L.ln1_beta);
      f(p + "ff1.weight", L.ff1_w);
      f(p + "ff1.bias", L.ff1_b);
      f(p + "ff2.weight", L.ff2_w);
      f(p + "ff2.bias", L.ff2_b);
      f(p + "norm2.gamma", L.ln2_gamma);
      f(p + "norm2.beta", L.ln2_beta);
    }
    f(std::string("head.weight"), self.head_w);
    f(std::string("head.bias"), self.head_b);
  }
};

/// Xavier-uniform projections, zero biases, unit norm gains.
ModelWeights init_weights(const ModelConfig& config, Rng& rng);

/// Throws ValidationError when a tensor is non-finite or mis-shaped.
void check_weights(const ModelWeights& weights);

/// length×dim matrix; dim must be even.
Mat sinusoidal_pe(int length, int dim);

struct Prediction {
  std::vector<double> move_logits;  // 12
  std::vector<double> blade_logits; // 5
  std::vector<double> move_probs;   // independent sigmoids
  std::vector<double> blade_probs;  // softmax
};

/// Recomputes probabilities from logits divided by per-output temperatures
/// (one per move, one per blade class). Empty `temperatures` means T = 1.
Prediction make_prediction(std::vector<double> move_logits, std::vector<double> blade_logits,
                           std::span<const double> temperatures = {});

struct LayerCache {
  Mat x_in;
  Mat q, k, v;
  std::vector<Mat> probs;  // per head, T×T
  Mat context;             // concatenated head outputs
  Mat drop1;               // scaled dropout mask (empty when inactive)
  Mat ln1_xhat;
  Vec ln1_inv_std;
  Mat y1;
  Mat ff_pre;
  Mat ff_act;
  Mat drop2;
  Mat ln2_xhat;
  Vec ln2_inv_std;
};

struct ForwardCache {
  Mat input;
  std::vector<int> valid;  // indices of unmasked positions
  std::vector<LayerCache> layers;
  Mat output;  // final encoder output
  Eigen::RowVectorXd pooled;
};

struct ForwardOptions {
  bool train = false;        // enables dropout (needs rng)
  Rng* rng = nullptr;
  ForwardCache* cache = nullptr;
};

/// features: T×input_dim; mask[t] != 0 marks a valid step. Throws
/// ValidationError("empty sequence") when no step is valid.
Prediction forward(const ModelWeights& weights, const Mat& features, std::span<const std::uint8_t> mask,
                   const ForwardOptions& options = {});

/// Adds d(loss)/d(weights) into `grads` given d(loss)/d(logits) (moves then
/// blades) and the cache of the matching forward call.
void backward(const ModelWeights& weights, const ForwardCache& cache, const Vec& dlogits, ModelWeights& grads);

}  // namespace fera::mdt
