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

#ifndef ATTNSPOT_TRANSFORMER_H_
#define ATTNSPOT_TRANSFORMER_H_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "attnspot/graph.h"

namespace attnspot {

struct ModelConfig {
  int d_model = 512;
  int n_heads = 2;
  int n_layers = 2;  // same count for encoder and decoder
  int feedforward_dim = 2048;
  double dropout_prob = 0.1;
  int max_enc_len = 512;
  int max_dec_len = 32;
  int vocab_size = 0;   // total ids including PAD/BOS/EOS
  int feature_dim = 0;  // input feature dimension D

  void validate() const;
};

// Named tensors with deterministic iteration order.
class ParamStore {
 public:
  void add(const std::string& name, Mat value);
  Mat& at(const std::string& name);
  const Mat& at(const std::string& name) const;
  bool has(const std::string& name) const { return tensors_.count(name) > 0; }
  const std::vector<std::string>& names() const { return names_; }
  bool all_finite() const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Mat> tensors_;
};

// Encoder-decoder attention probabilities for one decoded sequence:
// layers x heads matrices of shape T_dec x T_enc.
struct AttentionRecord {
  int n_layers = 0;
  int n_heads = 0;
  std::vector<Mat> probs;  // index layer * n_heads + head

  int t_dec() const { return probs.empty() ? 0 : static_cast<int>(probs.front().rows()); }
  int t_enc() const { return probs.empty() ? 0 : static_cast<int>(probs.front().cols()); }
  const Mat& at(int layer, int head) const;
  double value(int step, int layer, int head, int enc_index) const {
    return at(layer, head)(step, enc_index);
  }
  // Keeps the first n decoder steps of every matrix.
  AttentionRecord take_steps(int n) const;
  // Mean over heads at one layer; rows remain distributions.
  Mat head_mean(int layer) const;
  // Mean over layers of the head means.
  Mat mean_all() const;
  // Largest |row sum - 1| over all (step, layer, head) rows.
  double max_row_sum_deviation() const;
};

struct ForwardResult {
  Mat logits;  // T_dec x vocab_size
  AttentionRecord attention;
};

Mat sinusoidal_positions(int len, int d_model);

ParamStore init_transformer_params(const ModelConfig& cfg, std::uint64_t seed);

// Encoder-decoder Transformer over continuous feature inputs. Stateless apart
// from its config; parameters are passed explicitly, so frozen-parameter
// forwards may run concurrently.
class Transformer {
 public:
  explicit Transformer(ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }

  struct GraphOutputs {
    Var logits;
    std::vector<std::vector<Var>> cross_attention;  // [layer][head], pre-dropout probs
  };

  // Builds the forward graph. `params` maps tensor names to graph vars (leaf
  // params for training, inputs for inference). decoder_input must start with
  // BOS. Rows of `features` beyond enc_valid_len are masked out everywhere.
  GraphOutputs build(Graph& g, const std::unordered_map<std::string, Var>& params,
                     const Mat& features, int enc_valid_len, const std::vector<int>& decoder_input,
                     bool train_mode, RngStream* dropout_rng) const;

  // Inference forward: no dropout, attention recorded.
  ForwardResult forward(const ParamStore& params, const Mat& features,
                        const std::vector<int>& decoder_input) const;
  ForwardResult forward(const ParamStore& params, const Mat& features, int enc_valid_len,
                        const std::vector<int>& decoder_input) const;

 private:
  ModelConfig cfg_;
};

// Registers every tensor of `store` on the graph; differentiable when
// `trainable`, constant otherwise.
std::unordered_map<std::string, Var> register_params(Graph& g, const ParamStore& store,
                                                     bool trainable);

}  // namespace attnspot

#endif  // ATTNSPOT_TRANSFORMER_H_
