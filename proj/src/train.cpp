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

#include "attnspot/train.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "attnspot/common.h"
#include "attnspot/vocabulary.h"

namespace attnspot {

double LrSchedule::at_epoch(int epoch) const {
  double lr = base;
  for (int at : decay_epochs)
    if (epoch >= at) lr *= factor;
  return lr;
}

void TrainConfig::validate() const {
  if (lr.base <= 0.0) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (align_loss_weight < 0.0) throw ConfigError("align_loss_weight must be >= 0");
  if (align_sigma <= 0.0) throw ConfigError("align_sigma must be positive");
  if (curriculum_stage_epochs.size() > 3)
    throw ConfigError("curriculum supports at most stages k=1,2,3");
  for (int e : curriculum_stage_epochs)
    if (e < 0) throw ConfigError("curriculum stage lengths must be >= 0");
}

void AdamOptimizer::step(ParamStore& params, const std::unordered_map<std::string, Mat>& grads,
                         double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (const auto& name : params.names()) {
    auto git = grads.find(name);
    if (git == grads.end()) continue;
    const Mat& g = git->second;
    Mat& value = params.at(name);
    Mat& m = m_.try_emplace(name, Mat::Zero(value.rows(), value.cols())).first->second;
    Mat& v = v_.try_emplace(name, Mat::Zero(value.rows(), value.cols())).first->second;
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    const Mat mhat = m / bc1;
    const Mat vhat = v / bc2;
    value.array() -= lr * mhat.array() / (vhat.array().sqrt() + eps_);
  }
}

std::vector<StepAnnotation> annotation_steps(const std::vector<int>& target_tokens,
                                             const FeatureSequence& window,
                                             const std::vector<SparseAnnotation>& annotations,
                                             int* unmatched) {
  std::vector<StepAnnotation> out;
  std::vector<bool> used(target_tokens.size(), false);
  for (const auto& ann : annotations) {
    if (ann.frame_time < window.origin_frame || ann.frame_time >= window.end_frame()) {
      if (unmatched) ++*unmatched;
      continue;
    }
    int step = -1;
    for (std::size_t i = 0; i < target_tokens.size(); ++i) {
      if (!used[i] && target_tokens[i] == ann.token_id) {
        step = static_cast<int>(i);
        break;
      }
    }
    if (step < 0) {
      if (unmatched) ++*unmatched;
      continue;
    }
    used[static_cast<std::size_t>(step)] = true;
    out.push_back(StepAnnotation{step, window.index_of_frame(ann.frame_time)});
  }
  return out;
}

namespace {

struct Example {
  std::string clip_id;
  Mat features;  // window rows x D, double
  std::vector<int> decoder_input;
  std::vector<int> targets;
  std::vector<StepAnnotation> align;
};

// Builds a training example from a clip whose subtitle window is non-empty
// and fits the model limits.
bool make_example(const SubtitledClip& clip, const ModelConfig& cfg, Example* out,
                  int* skipped_annotations) {
  if (clip.subtitle.empty()) return false;
  const FeatureSequence window = subtitle_window_features(clip);
  if (window.t_enc() < 1 || window.t_enc() > cfg.max_enc_len) return false;
  if (static_cast<int>(clip.subtitle.size()) > cfg.max_dec_len) return false;

  out->clip_id = clip.id;
  out->features = window.features.cast<double>();
  std::vector<int> tokens;
  tokens.reserve(clip.subtitle.size());
  for (const auto& tok : clip.subtitle) tokens.push_back(tok.token_id);
  out->decoder_input.assign(1, Vocabulary::kBos);
  out->decoder_input.insert(out->decoder_input.end(), tokens.begin(), tokens.end());
  out->targets = tokens;
  out->targets.push_back(Vocabulary::kEos);
  out->align = annotation_steps(tokens, window, clip.annotations, skipped_annotations);
  return true;
}

// Stage for a 1-based epoch: 1..3 for curriculum stages, 0 for full windows.
int stage_of_epoch(const TrainConfig& cfg, int epoch) {
  int boundary = 0;
  for (std::size_t s = 0; s < cfg.curriculum_stage_epochs.size(); ++s) {
    boundary += cfg.curriculum_stage_epochs[s];
    if (epoch <= boundary) return static_cast<int>(s) + 1;
  }
  return 0;
}

std::vector<Example> stage_examples(const Corpus& corpus, const ModelConfig& cfg,
                                    const TrainConfig& tcfg, int stage,
                                    int* skipped_annotations) {
  std::vector<Example> out;
  for (const auto& clip : corpus.clips) {
    Example ex;
    if (stage == 0) {
      if (make_example(clip, cfg, &ex, skipped_annotations)) out.push_back(std::move(ex));
    } else {
      auto trimmed = trim_to_annotations(clip, stage, tcfg.trim_margin_frames);
      if (!trimmed) continue;
      if (make_example(*trimmed, cfg, &ex, skipped_annotations)) out.push_back(std::move(ex));
    }
  }
  return out;
}

}  // namespace

TrainResult train_transformer(const Transformer& model, const Corpus& corpus,
                              const TrainConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const ModelConfig& mcfg = model.config();

  TrainResult result;
  result.params = init_transformer_params(mcfg, seed);
  AdamOptimizer adam(cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);

  // Stage example sets are built once and reused across epochs.
  std::unordered_map<int, std::vector<Example>> stage_cache;
  int skipped_annotations = 0;
  auto examples_for = [&](int stage) -> std::vector<Example>& {
    auto it = stage_cache.find(stage);
    if (it == stage_cache.end())
      it = stage_cache.emplace(stage, stage_examples(corpus, mcfg, cfg, stage, &skipped_annotations))
               .first;
    return it->second;
  };

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const int stage = stage_of_epoch(cfg, epoch);
    auto& examples = examples_for(stage);
    if (examples.empty()) {
      result.log.push_back({epoch, 0.0, 0.0, 0.0, 0, skipped_annotations});
      continue;
    }

    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    RngStream shuffle_rng(seed, 0x5000 + static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);
    RngStream dropout_rng(seed, 0x9000 + static_cast<std::uint64_t>(epoch));

    const double lr = cfg.lr.at_epoch(epoch);
    double epoch_nll = 0.0, epoch_align = 0.0;

    std::size_t at = 0;
    while (at < order.size()) {
      const std::size_t batch_end =
          std::min(order.size(), at + static_cast<std::size_t>(cfg.batch_size));
      const double inv_batch = 1.0 / static_cast<double>(batch_end - at);
      std::unordered_map<std::string, Mat> grads;

      for (std::size_t b = at; b < batch_end; ++b) {
        const Example& ex = examples[order[b]];
        Graph g;
        auto vars = register_params(g, result.params, /*trainable=*/true);
        auto outs = model.build(g, vars, ex.features, static_cast<int>(ex.features.rows()),
                                ex.decoder_input, /*train_mode=*/true, &dropout_rng);
        Var loss = g.mean_nll(outs.logits, ex.targets, Vocabulary::kPad);
        const double nll_value = loss.value()(0, 0);
        double align_value = 0.0;

        if (cfg.align_loss_weight > 0.0 && !ex.align.empty()) {
          // Head-averaged, layer-selected attention rows against Gaussian targets.
          std::vector<Var> layer_means;
          for (int l = 0; l < mcfg.n_layers; ++l) {
            if (!cfg.align_layer.average_layers && cfg.align_layer.layer != l) continue;
            Var sum = outs.cross_attention[static_cast<std::size_t>(l)][0];
            for (int h = 1; h < mcfg.n_heads; ++h)
              sum = g.add(sum, outs.cross_attention[static_cast<std::size_t>(l)][h]);
            layer_means.push_back(g.scale(sum, 1.0 / mcfg.n_heads));
          }
          Var agg = layer_means.front();
          for (std::size_t i = 1; i < layer_means.size(); ++i) agg = g.add(agg, layer_means[i]);
          if (layer_means.size() > 1) agg = g.scale(agg, 1.0 / static_cast<double>(layer_means.size()));

          const int t_enc = static_cast<int>(ex.features.rows());
          Mat targets = Mat::Zero(ex.decoder_input.size(), t_enc);
          std::vector<double> weights(ex.decoder_input.size(), 0.0);
          for (const auto& ann : ex.align) {
            targets.row(ann.dec_step) = gaussian_target(t_enc, ann.enc_index, cfg.align_sigma);
            weights[static_cast<std::size_t>(ann.dec_step)] = 1.0;
          }
          Var align = g.weighted_row_sqdist(agg, targets, weights);
          align_value = align.value()(0, 0);
          loss = g.add(loss, g.scale(align, cfg.align_loss_weight));
        }

        const double total_value = loss.value()(0, 0);
        if (!std::isfinite(total_value)) {
          nlohmann::json snapshot{{"epoch", epoch},
                                  {"clip_id", ex.clip_id},
                                  {"nll", nll_value},
                                  {"align", align_value},
                                  {"stage", stage}};
          throw TrainAbort("non-finite training loss on clip " + ex.clip_id, snapshot);
        }
        epoch_nll += nll_value;
        epoch_align += align_value;

        g.backward(loss);
        for (const auto& name : result.params.names()) {
          const Mat& grad = vars.at(name).grad();
          auto [it, inserted] = grads.try_emplace(name, grad * inv_batch);
          if (!inserted) it->second.noalias() += grad * inv_batch;
        }
      }

      if (cfg.grad_clip_norm > 0.0) {
        double sq = 0.0;
        for (const auto& [name, g_] : grads) sq += g_.squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm > cfg.grad_clip_norm) {
          const double s = cfg.grad_clip_norm / norm;
          for (auto& [name, g_] : grads) g_ *= s;
        }
      }

      adam.step(result.params, grads, lr);
      at = batch_end;
    }

    const auto n = static_cast<double>(examples.size());
    EpochStats stats;
    stats.epoch = epoch;
    stats.nll = epoch_nll / n;
    stats.align = epoch_align / n;
    stats.total = stats.nll + cfg.align_loss_weight * stats.align;
    stats.clips = static_cast<int>(examples.size());
    stats.skipped_annotations = skipped_annotations;
    result.log.push_back(stats);
  }
  return result;
}

void write_train_log(const std::vector<EpochStats>& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open train log for writing: " + path);
  out << "epoch,nll,align_loss,total\n";
  for (const auto& row : log) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g\n", row.epoch, row.nll, row.align,
                  row.total);
    out << buf;
  }
}

double gradient_check(const ParamStore& params, const LossBuilder& build_loss,
                      const GradCheckConfig& cfg) {
  std::unordered_map<std::string, Mat> analytic;
  {
    Graph g;
    auto vars = register_params(g, params, /*trainable=*/true);
    Var loss = build_loss(g, vars);
    g.backward(loss);
    for (const auto& name : params.names()) analytic.emplace(name, vars.at(name).grad());
  }

  auto loss_value = [&](const ParamStore& p) {
    Graph g;
    auto vars = register_params(g, p, /*trainable=*/false);
    return build_loss(g, vars).value()(0, 0);
  };

  RngStream rng(cfg.seed, 0xc0de);
  double worst = 0.0;
  for (const auto& name : params.names()) {
    const Mat& tensor = params.at(name);
    for (int s = 0; s < cfg.samples_per_tensor; ++s) {
      const int r = static_cast<int>(rng.uniform_int(0, tensor.rows() - 1));
      const int col = static_cast<int>(rng.uniform_int(0, tensor.cols() - 1));
      ParamStore perturbed = params;
      perturbed.at(name)(r, col) += cfg.epsilon;
      const double plus = loss_value(perturbed);
      perturbed.at(name)(r, col) -= 2.0 * cfg.epsilon;
      const double minus = loss_value(perturbed);
      const double numeric = (plus - minus) / (2.0 * cfg.epsilon);
      const double a = analytic.at(name)(r, col);
      const double rel = std::abs(a - numeric) / std::max(1e-6, std::abs(a) + std::abs(numeric));
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

namespace {

std::string encode_f32(const Mat& m) {
  std::vector<float> buf(static_cast<std::size_t>(m.size()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      buf[static_cast<std::size_t>(r) * m.cols() + c] = static_cast<float>(m(r, c));
  return base64_encode(reinterpret_cast<const std::uint8_t*>(buf.data()),
                       buf.size() * sizeof(float));
}

Mat decode_f32(const std::string& b64, int rows, int cols) {
  const auto bytes = base64_decode(b64);
  if (bytes.size() != static_cast<std::size_t>(rows) * cols * sizeof(float))
    throw DataError("checkpoint tensor size mismatch");
  Mat m(rows, cols);
  const float* p = reinterpret_cast<const float*>(bytes.data());
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m(r, c) = static_cast<double>(p[static_cast<std::size_t>(r) * cols + c]);
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::string& kind,
                     const nlohmann::json& config, const ParamStore& params) {
  nlohmann::json j;
  j["kind"] = kind;
  j["config"] = config;
  nlohmann::json tensors;
  for (const auto& name : params.names()) {
    const Mat& m = params.at(name);
    tensors[name] = {{"rows", m.rows()}, {"cols", m.cols()}, {"data", encode_f32(m)}};
  }
  j["tensors"] = std::move(tensors);
  j["tensor_order"] = params.names();
  std::ofstream out(path);
  if (!out) throw DataError("cannot open checkpoint for writing: " + path);
  out << j.dump() << '\n';
  if (!out) throw DataError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  Checkpoint ck;
  ck.kind = j.at("kind").get<std::string>();
  ck.config = j.at("config");
  const auto order = j.at("tensor_order").get<std::vector<std::string>>();
  const auto& tensors = j.at("tensors");
  for (const auto& name : order) {
    const auto& t = tensors.at(name);
    ck.params.add(name, decode_f32(t.at("data").get<std::string>(), t.at("rows").get<int>(),
                                   t.at("cols").get<int>()));
  }
  return ck;
}

nlohmann::json model_config_to_json(const ModelConfig& cfg) {
  return {{"d_model", cfg.d_model},
          {"n_heads", cfg.n_heads},
          {"n_layers", cfg.n_layers},
          {"feedforward_dim", cfg.feedforward_dim},
          {"dropout_prob", cfg.dropout_prob},
          {"max_enc_len", cfg.max_enc_len},
          {"max_dec_len", cfg.max_dec_len},
          {"vocab_size", cfg.vocab_size},
          {"feature_dim", cfg.feature_dim}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.d_model = j.at("d_model").get<int>();
  cfg.n_heads = j.at("n_heads").get<int>();
  cfg.n_layers = j.at("n_layers").get<int>();
  cfg.feedforward_dim = j.at("feedforward_dim").get<int>();
  cfg.dropout_prob = j.at("dropout_prob").get<double>();
  cfg.max_enc_len = j.at("max_enc_len").get<int>();
  cfg.max_dec_len = j.at("max_dec_len").get<int>();
  cfg.vocab_size = j.at("vocab_size").get<int>();
  cfg.feature_dim = j.at("feature_dim").get<int>();
  return cfg;
}

}  // namespace attnspot
