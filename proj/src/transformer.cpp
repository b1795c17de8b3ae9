// Copyright 2026 The attnspot authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "attnspot/transformer.h"

#include <cmath>

#include "attnspot/common.h"
#include "attnspot/vocabulary.h"

namespace attnspot {

namespace {
constexpr double kMaskValue = -1e30;
}

void ModelConfig::validate() const {
  if (d_model < 1 || n_heads < 1 || n_layers < 1 || feedforward_dim < 1)
    throw ConfigError("model dimensions must be positive");
  if (d_model % n_heads != 0) throw ConfigError("d_model must be divisible by n_heads");
  if (dropout_prob < 0.0 || dropout_prob >= 1.0)
    throw ConfigError("dropout_prob must lie in [0, 1)");
  if (max_enc_len < 1 || max_dec_len < 0) throw ConfigError("invalid sequence length limits");
  if (vocab_size < 2) throw ConfigError("vocab_size must be >= 2");
  if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
}

void ParamStore::add(const std::string& name, Mat value) {
  if (tensors_.count(name)) throw ContractViolation("duplicate parameter name: " + name);
  names_.push_back(name);
  tensors_.emplace(name, std::move(value));
}

Mat& ParamStore::at(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ContractViolation("unknown parameter: " + name);
  return it->second;
}

const Mat& ParamStore::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ContractViolation("unknown parameter: " + name);
  return it->second;
}

bool ParamStore::all_finite() const {
  for (const auto& name : names_)
    if (!tensors_.at(name).allFinite()) return false;
  return true;
}

const Mat& AttentionRecord::at(int layer, int head) const {
  return probs[static_cast<std::size_t>(layer) * n_heads + head];
}

AttentionRecord AttentionRecord::take_steps(int n) const {
  AttentionRecord out;
  out.n_layers = n_layers;
  out.n_heads = n_heads;
  out.probs.reserve(probs.size());
  for (const auto& p : probs) out.probs.push_back(p.topRows(n));
  return out;
}

Mat AttentionRecord::head_mean(int layer) const {
  if (layer < 0 || layer >= n_layers) throw ContractViolation("attention layer out of range");
  Mat m = at(layer, 0);
  for (int h = 1; h < n_heads; ++h) m += at(layer, h);
  return m / n_heads;
}

Mat AttentionRecord::mean_all() const {
  Mat m = head_mean(0);
  for (int l = 1; l < n_layers; ++l) m += head_mean(l);
  return m / n_layers;
}

double AttentionRecord::max_row_sum_deviation() const {
  double worst = 0.0;
  for (const auto& p : probs)
    for (int r = 0; r < p.rows(); ++r)
      worst = std::max(worst, std::abs(p.row(r).sum() - 1.0));
  return worst;
}

Mat sinusoidal_positions(int len, int d_model) {
  Mat pe(len, d_model);
  for (int pos = 0; pos < len; ++pos) {
    for (int i = 0; i < d_model; i += 2) {
      const double angle = pos / std::pow(10000.0, static_cast<double>(i) / d_model);
      pe(pos, i) = std::sin(angle);
      if (i + 1 < d_model) pe(pos, i + 1) = std::cos(angle);
    }
  }
  return pe;
}

namespace {

Mat glorot(int rows, int cols, RngStream& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = (rng.uniform() * 2.0 - 1.0) * limit;
  return m;
}

void add_attention_params(ParamStore& p, const std::string& prefix, const ModelConfig& cfg,
                          RngStream& rng) {
  const int dk = cfg.d_model / cfg.n_heads;
  for (int h = 0; h < cfg.n_heads; ++h) {
    p.add(prefix + ".q.h" + std::to_string(h), glorot(cfg.d_model, dk, rng));
    p.add(prefix + ".k.h" + std::to_string(h), glorot(cfg.d_model, dk, rng));
    p.add(prefix + ".v.h" + std::to_string(h), glorot(cfg.d_model, dk, rng));
  }
  p.add(prefix + ".out", glorot(cfg.d_model, cfg.d_model, rng));
  p.add(prefix + ".out_b", Mat::Zero(1, cfg.d_model));
}

void add_layernorm_params(ParamStore& p, const std::string& prefix, int d) {
  p.add(prefix + ".g", Mat::Ones(1, d));
  p.add(prefix + ".b", Mat::Zero(1, d));
}

void add_ffn_params(ParamStore& p, const std::string& prefix, const ModelConfig& cfg,
                    RngStream& rng) {
  p.add(prefix + ".w1", glorot(cfg.d_model, cfg.feedforward_dim, rng));
  p.add(prefix + ".b1", Mat::Zero(1, cfg.feedforward_dim));
  p.add(prefix + ".w2", glorot(cfg.feedforward_dim, cfg.d_model, rng));
  p.add(prefix + ".b2", Mat::Zero(1, cfg.d_model));
}

}  // namespace

ParamStore init_transformer_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  RngStream rng(seed, 0x7a11);
  ParamStore p;
  p.add("input_proj.w", glorot(cfg.feature_dim, cfg.d_model, rng));
  p.add("input_proj.b", Mat::Zero(1, cfg.d_model));
  {
    Mat emb(cfg.vocab_size, cfg.d_model);
    const double std = 1.0 / std::sqrt(static_cast<double>(cfg.d_model));
    for (int r = 0; r < emb.rows(); ++r)
      for (int c = 0; c < emb.cols(); ++c) emb(r, c) = rng.normal(0.0, std);
    p.add("tok_embed", std::move(emb));
  }
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string e = "enc.l" + std::to_string(l);
    add_attention_params(p, e + ".self", cfg, rng);
    add_layernorm_params(p, e + ".ln1", cfg.d_model);
    add_ffn_params(p, e + ".ffn", cfg, rng);
    add_layernorm_params(p, e + ".ln2", cfg.d_model);
  }
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string d = "dec.l" + std::to_string(l);
    add_attention_params(p, d + ".self", cfg, rng);
    add_layernorm_params(p, d + ".ln1", cfg.d_model);
    add_attention_params(p, d + ".cross", cfg, rng);
    add_layernorm_params(p, d + ".ln2", cfg.d_model);
    add_ffn_params(p, d + ".ffn", cfg, rng);
    add_layernorm_params(p, d + ".ln3", cfg.d_model);
  }
  p.add("out_proj.w", glorot(cfg.d_model, cfg.vocab_size, rng));
  p.add("out_proj.b", Mat::Zero(1, cfg.vocab_size));
  return p;
}

Transformer::Transformer(ModelConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

namespace {

struct Ctx {
  Graph* g;
  const std::unordered_map<std::string, Var>* params;
  const ModelConfig* cfg;
  bool train = false;
  RngStream* rng = nullptr;

  Var at(const std::string& name) const {
    auto it = params->find(name);
    if (it == params->end()) throw ContractViolation("missing parameter var: " + name);
    return it->second;
  }

  Var drop(Var x) const {
    if (!train || cfg->dropout_prob <= 0.0) return x;
    return g->dropout(x, cfg->dropout_prob, *rng);
  }
};

// Multi-head attention; when `record` is non-null the per-head pre-dropout
// probability matrices are appended to it.
Var attention_block(const Ctx& c, const std::string& prefix, Var queries_in, Var keys_in,
                    const Mat& additive_mask, std::vector<Var>* record) {
  Graph& g = *c.g;
  const int dk = c.cfg->d_model / c.cfg->n_heads;
  std::vector<Var> heads;
  heads.reserve(static_cast<std::size_t>(c.cfg->n_heads));
  for (int h = 0; h < c.cfg->n_heads; ++h) {
    const std::string hs = ".h" + std::to_string(h);
    Var q = g.matmul(queries_in, c.at(prefix + ".q" + hs));
    Var k = g.matmul(keys_in, c.at(prefix + ".k" + hs));
    Var v = g.matmul(keys_in, c.at(prefix + ".v" + hs));
    Var scores = g.scale(g.matmul(q, g.transpose(k)), 1.0 / std::sqrt(static_cast<double>(dk)));
    Var probs = g.softmax_rows(scores, additive_mask);
    if (record) record->push_back(probs);
    Var used = c.drop(probs);
    heads.push_back(g.matmul(used, v));
  }
  Var concat = c.cfg->n_heads == 1 ? heads.front() : g.concat_cols(heads);
  return g.add_row_broadcast(g.matmul(concat, c.at(prefix + ".out")), c.at(prefix + ".out_b"));
}

Var ffn_block(const Ctx& c, const std::string& prefix, Var x) {
  Graph& g = *c.g;
  Var h = g.relu(g.add_row_broadcast(g.matmul(x, c.at(prefix + ".w1")), c.at(prefix + ".b1")));
  return g.add_row_broadcast(g.matmul(h, c.at(prefix + ".w2")), c.at(prefix + ".b2"));
}

Var residual_norm(const Ctx& c, const std::string& ln_prefix, Var x, Var sub) {
  Graph& g = *c.g;
  return g.layer_norm_rows(g.add(x, c.drop(sub)), c.at(ln_prefix + ".g"), c.at(ln_prefix + ".b"));
}

Mat causal_mask(int n) {
  Mat m = Mat::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int col = r + 1; col < n; ++col) m(r, col) = kMaskValue;
  return m;
}

Mat padding_mask(int rows, int t_enc, int valid) {
  if (valid >= t_enc) return Mat();
  Mat m = Mat::Zero(rows, t_enc);
  for (int r = 0; r < rows; ++r)
    for (int col = valid; col < t_enc; ++col) m(r, col) = kMaskValue;
  return m;
}

}  // namespace

Transformer::GraphOutputs Transformer::build(Graph& g,
                                             const std::unordered_map<std::string, Var>& params,
                                             const Mat& features, int enc_valid_len,
                                             const std::vector<int>& decoder_input,
                                             bool train_mode, RngStream* dropout_rng) const {
  const int t_enc = static_cast<int>(features.rows());
  const int t_dec = static_cast<int>(decoder_input.size());
  if (t_enc < 1 || t_enc > cfg_.max_enc_len)
    throw ContractViolation("encoder length out of range: " + std::to_string(t_enc));
  if (enc_valid_len < 1 || enc_valid_len > t_enc)
    throw ContractViolation("enc_valid_len out of range");
  if (features.cols() != cfg_.feature_dim)
    throw ContractViolation("feature dimension mismatch");
  if (t_dec < 1 || t_dec > cfg_.max_dec_len + 1)
    throw ContractViolation("decoder length out of range: " + std::to_string(t_dec));
  if (decoder_input.front() != Vocabulary::kBos)
    throw ContractViolation("decoder input must start with BOS");
  if (train_mode && cfg_.dropout_prob > 0.0 && dropout_rng == nullptr)
    throw ContractViolation("training forward needs a dropout rng");

  Ctx c{&g, &params, &cfg_, train_mode, dropout_rng};

  // Encoder: projected features plus positions.
  Var x = g.input(features);
  Var enc = g.add_row_broadcast(g.matmul(x, c.at("input_proj.w")), c.at("input_proj.b"));
  enc = g.add(enc, g.input(sinusoidal_positions(t_enc, cfg_.d_model)));
  enc = c.drop(enc);
  const Mat enc_mask = padding_mask(t_enc, t_enc, enc_valid_len);
  for (int l = 0; l < cfg_.n_layers; ++l) {
    const std::string pre = "enc.l" + std::to_string(l);
    Var sa = attention_block(c, pre + ".self", enc, enc, enc_mask, nullptr);
    enc = residual_norm(c, pre + ".ln1", enc, sa);
    Var ff = ffn_block(c, pre + ".ffn", enc);
    enc = residual_norm(c, pre + ".ln2", enc, ff);
  }

  // Decoder: scaled token embeddings plus positions, causal self-attention,
  // recorded cross-attention.
  Var emb = g.embedding_rows(c.at("tok_embed"), decoder_input);
  Var dec = g.scale(emb, std::sqrt(static_cast<double>(cfg_.d_model)));
  dec = g.add(dec, g.input(sinusoidal_positions(t_dec, cfg_.d_model)));
  dec = c.drop(dec);
  const Mat self_mask = causal_mask(t_dec);
  const Mat cross_mask = padding_mask(t_dec, t_enc, enc_valid_len);

  GraphOutputs out;
  out.cross_attention.resize(static_cast<std::size_t>(cfg_.n_layers));
  for (int l = 0; l < cfg_.n_layers; ++l) {
    const std::string pre = "dec.l" + std::to_string(l);
    Var sa = attention_block(c, pre + ".self", dec, dec, self_mask, nullptr);
    dec = residual_norm(c, pre + ".ln1", dec, sa);
    Var ca = attention_block(c, pre + ".cross", dec, enc, cross_mask,
                             &out.cross_attention[static_cast<std::size_t>(l)]);
    dec = residual_norm(c, pre + ".ln2", dec, ca);
    Var ff = ffn_block(c, pre + ".ffn", dec);
    dec = residual_norm(c, pre + ".ln3", dec, ff);
  }

  out.logits = g.add_row_broadcast(g.matmul(dec, c.at("out_proj.w")), c.at("out_proj.b"));
  return out;
}

ForwardResult Transformer::forward(const ParamStore& params, const Mat& features,
                                   const std::vector<int>& decoder_input) const {
  return forward(params, features, static_cast<int>(features.rows()), decoder_input);
}

ForwardResult Transformer::forward(const ParamStore& params, const Mat& features,
                                   int enc_valid_len,
                                   const std::vector<int>& decoder_input) const {
  Graph g;
  auto vars = register_params(g, params, /*trainable=*/false);
  auto outs = build(g, vars, features, enc_valid_len, decoder_input, /*train_mode=*/false, nullptr);
  ForwardResult result;
  result.logits = outs.logits.value();
  result.attention.n_layers = cfg_.n_layers;
  result.attention.n_heads = cfg_.n_heads;
  for (const auto& layer : outs.cross_attention)
    for (const auto& head : layer) result.attention.probs.push_back(head.value());
  return result;
}

std::unordered_map<std::string, Var> register_params(Graph& g, const ParamStore& store,
                                                     bool trainable) {
  std::unordered_map<std::string, Var> vars;
  vars.reserve(store.names().size());
  for (const auto& name : store.names())
    vars.emplace(name, trainable ? g.param(store.at(name)) : g.input(store.at(name)));
  return vars;
}

}  // namespace attnspot
