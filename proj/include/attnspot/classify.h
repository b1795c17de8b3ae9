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

#ifndef ATTNSPOT_CLASSIFY_H_
#define ATTNSPOT_CLASSIFY_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "attnspot/corpus_io.h"
#include "attnspot/eval.h"
#include "attnspot/train.h"
#include "attnspot/vocabulary.h"

namespace attnspot {

// Classifier classes are a sub-vocabulary of content stems.
struct ClassSet {
  std::vector<int> token_ids;  // class index -> vocabulary token id
  std::unordered_map<int, int> token_to_class;

  static ClassSet from_vocabulary(const Vocabulary& vocab);
  static ClassSet from_token_ids(std::vector<int> ids);
  int size() const { return static_cast<int>(token_ids.size()); }
  int class_of(int token_id) const;
};

struct TrimmedInstance {
  Eigen::VectorXd features;  // temporal mean over the window
  int label = -1;            // class index
  std::string clip_id;
};

struct ExtractStats {
  int instances = 0;
  int skipped_unknown_clip = 0;
  int skipped_out_of_class = 0;
};

// One instance per store row: features mean-pooled over window_frames video
// frames centred on the row's frame_time, clipped to the clip bounds. Rows
// naming unknown clips or out-of-class tokens are skipped and counted.
std::vector<TrimmedInstance> extract_instances(const Corpus& corpus, const AnnotationStore& store,
                                               const Vocabulary& vocab, const ClassSet& classes,
                                               int window_frames, ExtractStats* stats = nullptr);

// Instances built from synthetic ground truth, used as a recognition test set.
std::vector<TrimmedInstance> extract_truth_instances(const Corpus& corpus,
                                                     const ClassSet& classes, int window_frames);

struct MlpConfig {
  std::vector<int> hidden{512, 256};
  bool residual = true;
  int epochs = 30;
  LrSchedule lr{1e-2, {20, 25}, 0.1};
  double momentum = 0.9;
  int batch_size = 256;

  void validate() const;
};

struct MlpEpochStats {
  int epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
};

struct MlpTrainResult {
  ParamStore params;
  std::vector<MlpEpochStats> log;
};

ParamStore init_mlp_params(int input_dim, int n_classes, const MlpConfig& cfg,
                           std::uint64_t seed);

// SGD with momentum on softmax cross-entropy. Deterministic for a fixed seed.
// Throws ConfigError when fewer than two classes are present.
MlpTrainResult train_mlp(const std::vector<TrimmedInstance>& instances, int n_classes,
                         const MlpConfig& cfg, std::uint64_t seed);

// Raw logits per instance.
std::vector<Eigen::VectorXd> mlp_scores(const ParamStore& params, const MlpConfig& cfg,
                                        const std::vector<TrimmedInstance>& instances);

RecReport evaluate_classifier(const ParamStore& params, const MlpConfig& cfg,
                              const std::vector<TrimmedInstance>& test_instances);

struct RecReportStats {
  RecReport mean;
  RecReport stddev;
  int n_runs = 0;
};

// Repeats training with each seed and reports mean and standard deviation.
RecReportStats train_eval_repeated(const std::vector<TrimmedInstance>& train_instances,
                                   const std::vector<TrimmedInstance>& test_instances,
                                   int n_classes, const MlpConfig& cfg,
                                   const std::vector<std::uint64_t>& seeds);

nlohmann::json rec_report_stats_to_json(const RecReportStats& stats);

}  // namespace attnspot

#endif  // ATTNSPOT_CLASSIFY_H_
