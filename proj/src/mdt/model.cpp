// SPDX-License-Identifier: Apache-2.0
#include "fera/mdt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fera/error.hpp"

namespace fera::mdt {

namespace {

constexpr double kLayerNormEps = 1e-5;

Mat zeros(int r, int c) { return Mat::Zero(r, c); }

void layer_norm(const Mat& x, const Mat& gamma, const Mat& beta, Mat& xhat, Vec& inv_std, Mat& y) {
  const auto n = static_cast<double>(x.cols());
  xhat.resize(x.rows(), x.cols());
  inv_std.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / n;
    const double var = (x.row(r).array() - mean).square().sum() / n;
    inv_std(r) = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(r) = (x.row(r).array() - mean) * inv_std(r);
  }
  y = (xhat.array().rowwise() * gamma.row(0).array()).rowwise() + beta.row(0).array();
}

Mat layer_norm_backward(const Mat& dy, const Mat& xhat, const Vec& inv_std, const Mat& gamma, Mat& dgamma,
                        Mat& dbeta) {
  dgamma.row(0) += (dy.array() * xhat.array()).colwise().sum().matrix();
  dbeta.row(0) += dy.colwise().sum();
  const Mat dxhat = dy.array().rowwise() * gamma.row(0).array();
  const auto n = static_cast<double>(dy.cols());
  Mat dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double m1 = dxhat.row(r).sum() / n;
    const double m2 = dxhat.row(r).dot(xhat.row(r)) / n;
    dx.row(r) = inv_std(r) * (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2);
  }
  return dx;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_grad(double x) {
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2)) + x * pdf;
}

Mat dropout_mask(int rows, int cols, double p, Rng& rng) {
  Mat m(rows, cols);
  const double keep = 1.0 - p;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  return m;
}

Mat add_bias(Mat x, const Mat& b) {
  x.rowwise() += b.row(0);
  return x;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void ModelConfig::validate() const {
  if (input_dim <= 0 || embed_dim <= 0 || layers <= 0 || heads <= 0 || ff_dim <= 0)
    throw ValidationError("model dimensions must be positive");
  if (embed_dim % heads != 0) throw ValidationError("embed_dim must be divisible by heads");
  if (embed_dim % 2 != 0) throw ValidationError("embed_dim must be even for positional encoding");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("dropout must be in [0, 1)");
  if (num_moves <= 0 || num_blades <= 0) throw ValidationError("output sizes must be positive");
}

ModelWeights ModelWeights::zeros(const ModelConfig& c) {
  c.validate();
  ModelWeights w;
  w.config = c;
  w.input_w = mdt::zeros(c.input_dim, c.embed_dim);
  w.input_b = mdt::zeros(1, c.embed_dim);
  w.layers.resize(static_cast<std::size_t>(c.layers));
  for (auto& L : w.layers) {
    for (Mat* m : {&L.wq, &L.wk, &L.wv, &L.wo}) *m = mdt::zeros(c.embed_dim, c.embed_dim);
    for (Mat* m : {&L.bq, &L.bk, &L.bv, &L.bo, &L.ln1_gamma, &L.ln1_beta, &L.ln2_gamma, &L.ln2_beta, &L.ff2_b})
      *m = mdt::zeros(1, c.embed_dim);
    L.ff1_w = mdt::zeros(c.embed_dim, c.ff_dim);
    L.ff1_b = mdt::zeros(1, c.ff_dim);
    L.ff2_w = mdt::zeros(c.ff_dim, c.embed_dim);
  }
  w.head_w = mdt::zeros(c.embed_dim, c.output_dim());
  w.head_b = mdt::zeros(1, c.output_dim());
  return w;
}

std::size_t ModelWeights::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const std::string&, const Mat& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

void ModelWeights::set_zero() {
  for_each([](const std::string&, Mat& m) { m.setZero(); });
}

ModelWeights init_weights(const ModelConfig& config, Rng& rng) {
  auto w = ModelWeights::zeros(config);
  w.for_each([&](const std::string& name, Mat& m) {
    if (name.ends_with(".gamma")) {
      m.setOnes();
    } else if (name.ends_with(".weight")) {
      const double a = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-a, a);
    }
  });
  return w;
}

void check_weights(const ModelWeights& weights) {
  const auto ref = ModelWeights::zeros(weights.config);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  ref.for_each([&](const std::string&, const Mat& m) { shapes.emplace_back(m.rows(), m.cols()); });
  std::size_t i = 0;
  if (weights.layers.size() != ref.layers.size())
    throw ValidationError("weights have " + std::to_string(weights.layers.size()) + " layers, config says " +
                                       std::to_string(ref.layers.size()));
  weights.for_each([&](const std::string& name, const Mat& m) {
    if (m.rows() != shapes[i].first || m.cols() != shapes[i].second)
      throw ValidationError("tensor " + name + " has shape " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected " + std::to_string(shapes[i].first) + "x" +
                            std::to_string(shapes[i].second));
    if (!m.allFinite()) throw ValidationError("tensor " + name + " is not finite");
    ++i;
  });
}

Mat sinusoidal_pe(int length, int dim) {
  if (dim <= 0 || dim % 2 != 0) throw ValidationError("positional encoding dimension must be even");
  if (length < 0) throw ValidationError("positional encoding length must be non-negative");
  Mat pe(length, dim);
  for (int pos = 0; pos < length; ++pos)
    for (int i = 0; i < dim / 2; ++i) {
      const double angle = pos / std::pow(10000.0, 2.0 * i / dim);
      pe(pos, 2 * i) = std::sin(angle);
      pe(pos, 2 * i + 1) = std::cos(angle);
    }
  return pe;
}

Prediction make_prediction(std::vector<double> move_logits, std::vector<double> blade_logits,
                           std::span<const double> temperatures) {
  const auto nm = move_logits.size(), nb = blade_logits.size();
  if (!temperatures.empty() && temperatures.size() != nm + nb)
    throw ValidationError("expected " + std::to_string(nm + nb) + " temperatures, got " +
                          std::to_string(temperatures.size()));
  auto temp = [&](std::size_t i) { return temperatures.empty() ? 1.0 : temperatures[i]; };
  Prediction p;
  p.move_probs.resize(nm);
  for (std::size_t i = 0; i < nm; ++i) p.move_probs[i] = sigmoid(move_logits[i] / temp(i));
  p.blade_probs.resize(nb);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nb; ++i) mx = std::max(mx, blade_logits[i] / temp(nm + i));
  double sum = 0.0;
  for (std::size_t i = 0; i < nb; ++i) sum += p.blade_probs[i] = std::exp(blade_logits[i] / temp(nm + i) - mx);
  for (auto& v : p.blade_probs) v /= sum;
  p.move_logits = std::move(move_logits);
  p.blade_logits = std::move(blade_logits);
  return p;
}

Prediction forward(const ModelWeights& w, const Mat& features, std::span<const std::uint8_t> mask,
                   const ForwardOptions& options) {
  const auto& c = w.config;
  const int T = static_cast<int>(features.rows());
  if (features.cols() != c.input_dim)
    throw ValidationError("features have " + std::to_string(features.cols()) + " columns, model expects " +
                          std::to_string(c.input_dim));
  if (mask.size() != static_cast<std::size_t>(T)) throw ValidationError("mask length does not match features");
  std::vector<int> valid;
  for (int t = 0; t < T; ++t)
    if (mask[static_cast<std::size_t>(t)]) valid.push_back(t);
  if (valid.empty()) throw ValidationError("empty sequence");
  const bool dropout = options.train && c.dropout > 0.0;
  if (dropout && !options.rng) throw ValidationError("training forward needs a random source");

  std::vector<bool> key_ok(static_cast<std::size_t>(T), false);
  for (int t : valid) key_ok[static_cast<std::size_t>(t)] = true;

  ForwardCache local;
  ForwardCache& cache = options.cache ? *options.cache : local;
  cache.input = features;
  cache.valid = valid;
  cache.layers.assign(w.layers.size(), LayerCache{});

  Mat x = add_bias(features * w.input_w, w.input_b) + sinusoidal_pe(T, c.embed_dim);
  const int dh = c.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    const auto& L = w.layers[l];
    auto& lc = cache.layers[l];
    lc.x_in = x;
    lc.q = add_bias(x * L.wq, L.bq);
    lc.k = add_bias(x * L.wk, L.bk);
    lc.v = add_bias(x * L.wv, L.bv);
    lc.context.resize(T, c.embed_dim);
    lc.probs.resize(static_cast<std::size_t>(c.heads));
    for (int h = 0; h < c.heads; ++h) {
      Mat s = lc.q.middleCols(h * dh, dh) * lc.k.middleCols(h * dh, dh).transpose() * scale;
      Mat& p = lc.probs[static_cast<std::size_t>(h)];
      p.setZero(T, T);
      for (int r = 0; r < T; ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int j : valid) mx = std::max(mx, s(r, j));
        double sum = 0.0;
        for (int j : valid) sum += p(r, j) = std::exp(s(r, j) - mx);
        for (int j : valid) p(r, j) /= sum;
      }
      lc.context.middleCols(h * dh, dh) = p * lc.v.middleCols(h * dh, dh);
    }
    Mat attn = add_bias(lc.context * L.wo, L.bo);
    if (dropout) {
      lc.drop1 = dropout_mask(T, c.embed_dim, c.dropout, *options.rng);
      attn = attn.cwiseProduct(lc.drop1);
    } else {
      lc.drop1.resize(0, 0);
    }
    layer_norm(x + attn, L.ln1_gamma, L.ln1_beta, lc.ln1_xhat, lc.ln1_inv_std, lc.y1);

    lc.ff_pre = add_bias(lc.y1 * L.ff1_w, L.ff1_b);
    lc.ff_act = lc.ff_pre.unaryExpr([](double v) { return gelu(v); });
    Mat act = lc.ff_act;
    if (dropout) {
      lc.drop2 = dropout_mask(T, c.ff_dim, c.dropout, *options.rng);
      act = act.cwiseProduct(lc.drop2);
    } else {
      lc.drop2.resize(0, 0);
    }
    const Mat ff = add_bias(act * L.ff2_w, L.ff2_b);
    Mat out;
    layer_norm(lc.y1 + ff, L.ln2_gamma, L.ln2_beta, lc.ln2_xhat, lc.ln2_inv_std, out);
    x = std::move(out);
  }

  Eigen::RowVectorXd pooled = Eigen::RowVectorXd::Zero(c.embed_dim);
  for (int t : valid) pooled += x.row(t);
  pooled /= static_cast<double>(valid.size());
  cache.output = x;
  cache.pooled = pooled;

  const Eigen::RowVectorXd logits = pooled * w.head_w + w.head_b.row(0);
  std::vector<double> ml(logits.data(), logits.data() + c.num_moves);
  std::vector<double> bl(logits.data() + c.num_moves, logits.data() + c.output_dim());
  return make_prediction(std::move(ml), std::move(bl));
}

void backward(const ModelWeights& w, const ForwardCache& cache, const Vec& dlogits, ModelWeights& g) {
  const auto& c = w.config;
  if (dlogits.size() != c.output_dim()) throw ValidationError("dlogits size does not match model outputs");
  if (cache.layers.size() != w.layers.size() || g.layers.size() != w.layers.size())
    throw ValidationError("forward cache does not match the model");
  const int T = static_cast<int>(cache.input.rows());
  const int dh = c.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  g.head_w += cache.pooled.transpose() * dlogits.transpose();
  g.head_b.row(0) += dlogits.transpose();
  const Eigen::RowVectorXd dpooled = (w.head_w * dlogits).transpose();

  Mat dx = Mat::Zero(T, c.embed_dim);
  const double inv_n = 1.0 / static_cast<double>(cache.valid.size());
  for (int t : cache.valid) dx.row(t) = dpooled * inv_n;

  for (std::size_t li = w.layers.size(); li-- > 0;) {
    const auto& L = w.layers[li];
    auto& G = g.layers[li];
    const auto& lc = cache.layers[li];

    // Second sublayer: out = LN(y1 + FF(y1)).
    const Mat dr2 = layer_norm_backward(dx, lc.ln2_xhat, lc.ln2_inv_std, L.ln2_gamma, G.ln2_gamma, G.ln2_beta);
    const Mat act = lc.drop2.size() ? Mat(lc.ff_act.cwiseProduct(lc.drop2)) : lc.ff_act;
    G.ff2_w += act.transpose() * dr2;
    G.ff2_b.row(0) += dr2.colwise().sum();
    Mat dact = dr2 * L.ff2_w.transpose();
    if (lc.drop2.size()) dact = dact.cwiseProduct(lc.drop2);
    const Mat dpre = dact.cwiseProduct(lc.ff_pre.unaryExpr([](double v) { return gelu_grad(v); }));
    G.ff1_w += lc.y1.transpose() * dpre;
    G.ff1_b.row(0) += dpre.colwise().sum();
    const Mat dy1 = dr2 + dpre * L.ff1_w.transpose();

    // First sublayer: y1 = LN(x + Attn(x)).
    const Mat dr1 = layer_norm_backward(dy1, lc.ln1_xhat, lc.ln1_inv_std, L.ln1_gamma, G.ln1_gamma, G.ln1_beta);
    Mat dattn = dr1;
    if (lc.drop1.size()) dattn = dattn.cwiseProduct(lc.drop1);
    G.wo += lc.context.transpose() * dattn;
    G.bo.row(0) += dattn.colwise().sum();
    const Mat dcontext = dattn * L.wo.transpose();

    Mat dq(T, c.embed_dim), dk(T, c.embed_dim), dv(T, c.embed_dim);
    for (int h = 0; h < c.heads; ++h) {
      const Mat& p = lc.probs[static_cast<std::size_t>(h)];
      const auto dctx = dcontext.middleCols(h * dh, dh);
      const Mat dp = dctx * lc.v.middleCols(h * dh, dh).transpose();
      dv.middleCols(h * dh, dh) = p.transpose() * dctx;
      const Vec row_dot = dp.cwiseProduct(p).rowwise().sum();
      const Mat ds = (p.array() * (dp.colwise() - row_dot).array()).matrix() * scale;
      dq.middleCols(h * dh, dh) = ds * lc.k.middleCols(h * dh, dh);
      dk.middleCols(h * dh, dh) = ds.transpose() * lc.q.middleCols(h * dh, dh);
    }
    G.wq += lc.x_in.transpose() * dq;
    G.bq.row(0) += dq.colwise().sum();
    G.wk += lc.x_in.transpose() * dk;
    G.bk.row(0) += dk.colwise().sum();
    G.wv += lc.x_in.transpose() * dv;
    G.bv.row(0) += dv.colwise().sum();
    dx = dr1 + dq * L.wq.transpose() + dk * L.wk.transpose() + dv * L.wv.transpose();
  }

  g.input_w += cache.input.transpose() * dx;
  g.input_b.row(0) += dx.colwise().sum();
}

}  // namespace fera::mdt
