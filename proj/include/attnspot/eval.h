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

#ifndef ATTNSPOT_EVAL_H_
#define ATTNSPOT_EVAL_H_

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "attnspot/spot.h"

namespace attnspot {

// Sequence-averaged localisation metrics.
struct LocReport {
  double recall = 0.0;
  double precision = 0.0;
  double loc_acc = 0.0;
  int n_sequences = 0;      // clips entering the recall/precision means
  int n_scored_tokens = 0;  // correct-and-timed tokens entering loc_acc
  int n_loc_sequences = 0;  // clips entering the loc_acc mean
};

struct ClipEvalInput {
  std::vector<int> reference;                // token ids after preprocessing
  std::vector<Spotting> predictions;         // mined spottings for this clip
  std::vector<std::pair<int, int>> timed;    // ground truth (token_id, enc_index)
};

// recall = |correct| / |reference|, precision = |correct| / |predictions|
// (0 with no predictions); loc_acc is computed only over correct predictions
// that match a timed token, correct iff |pred - annot| <= tolerance feature
// frames. All three are averaged over clips; clips without scored tokens are
// excluded from the loc_acc mean only.
LocReport eval_localisation(const std::vector<ClipEvalInput>& clips,
                            int tolerance_feature_frames);

nlohmann::json loc_report_to_json(const LocReport& report);

// Recognition metrics with and without class balancing.
struct RecReport {
  double top1_instance = 0.0;
  double top5_instance = 0.0;
  double top1_class = 0.0;
  double top5_class = 0.0;
};

// Per-instance: fraction of instances whose label ranks in the top k.
// Per-class: unweighted mean over classes present in `labels`. Ties rank by
// ascending class index.
RecReport topk_recognition(const std::vector<Eigen::VectorXd>& scores,
                           const std::vector<int>& labels);

nlohmann::json rec_report_to_json(const RecReport& report);

// Dotted-path flattening of numeric/string leaves, used for CSV report rows.
std::vector<std::pair<std::string, std::string>> flatten_json(const nlohmann::json& j);

}  // namespace attnspot

#endif  // ATTNSPOT_EVAL_H_
