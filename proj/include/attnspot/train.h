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

#ifndef ATTNSPOT_TRAIN_H_
#define ATTNSPOT_TRAIN_H_

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "attnspot/corpus.h"
#include "attnspot/corpus_transforms.h"
#include "attnspot/losses.h"
#include "attnspot/transformer.h"

namespace attnspot {

struct LrSchedule {
  double base = 1e-4;
  std::vector<int> decay_epochs;  // 1-based epochs at which lr is multiplied by factor
  double factor = 0.1;

  double at_epoch(int epoch) const;
};

struct TrainConfig {
  LrSchedule lr;
  int batch_size = 32;
  int epochs = 30;
  double align_loss_weight = 0.0;  // lambda; 0 disables the alignment term
  AlignLayerSel align_layer;
  double align_sigma = 1.0;
  // Epochs spent at curriculum stages k=1,2,3 before switching to full
  // subtitle windows; empty disables the curriculum.
  std::vector<int> curriculum_stage_epochs;
  int trim_margin_frames = kDefaultTrimMarginFrames;
  double grad_clip_norm = 0.0;  // 0 disables clipping
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double nll = 0.0;
  double align = 0.0;
  double total = 0.0;
  int clips = 0;
  int skipped_annotations = 0;
};

struct TrainResult {
  ParamStore params;
  std::vector<EpochStats> log;
};

// Raised when training hits a non-finite loss; carries a diagnostic snapshot.
class TrainAbort : public std::runtime_error {
 public:
  TrainAbort(const std::string& msg, nlohmann::json snapshot)
      : std::runtime_error(msg), snapshot(std::move(snapshot)) {}
  nlohmann::json snapshot;
};

// Adam with bias correction; state is keyed by tensor name.
class AdamOptimizer {
 public:
  AdamOptimizer(double beta1, double beta2, double eps)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParamStore& params, const std::unordered_map<std::string, Mat>& grads, double lr);

 private:
  double beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::unordered_map<std::string, Mat> m_, v_;
};

// Maps clip annotations onto (decoder step, encoder index) pairs. Each target
// step is consumed by at most one annotation; annotations whose token is
// absent from the targets or whose time falls outside the window are counted
// in *unmatched.
std::vector<StepAnnotation> annotation_steps(const std::vector<int>& target_tokens,
                                             const FeatureSequence& window,
                                             const std::vector<SparseAnnotation>& annotations,
                                             int* unmatched = nullptr);

// Teacher-forced training with optional alignment loss and curriculum.
// Deterministic for a fixed seed; single-threaded.
TrainResult train_transformer(const Transformer& model, const Corpus& encoded_corpus,
                              const TrainConfig& cfg, std::uint64_t seed);

void write_train_log(const std::vector<EpochStats>& log, const std::string& path);

// --- verification -----------------------------------------------------------

struct GradCheckConfig {
  double epsilon = 1e-4;
  int samples_per_tensor = 3;
  std::uint64_t seed = 7;
};

using LossBuilder = std::function<Var(Graph&, const std::unordered_map<std::string, Var>&)>;

// Max relative error between analytic gradients and central finite
// differences over sampled coordinates of every tensor.
double gradient_check(const ParamStore& params, const LossBuilder& build_loss,
                      const GradCheckConfig& cfg);

// --- checkpoints -------------------------------------------------------------

struct Checkpoint {
  std::string kind;
  nlohmann::json config;
  ParamStore params;
};

// Self-describing JSON container; tensor data is little-endian float32.
void save_checkpoint(const std::string& path, const std::string& kind,
                     const nlohmann::json& config, const ParamStore& params);
Checkpoint load_checkpoint(const std::string& path);

nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace attnspot

#endif  // ATTNSPOT_TRAIN_H_
