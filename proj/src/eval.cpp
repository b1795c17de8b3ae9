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

#include "attnspot/eval.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "attnspot/common.h"

namespace attnspot {

LocReport eval_localisation(const std::vector<ClipEvalInput>& clips,
                            int tolerance_feature_frames) {
  if (tolerance_feature_frames < 0) throw ConfigError("localisation tolerance must be >= 0");

  LocReport report;
  double recall_sum = 0.0, precision_sum = 0.0, loc_sum = 0.0;

  for (const auto& clip : clips) {
    if (clip.reference.empty()) continue;  // nothing to score on this sequence

    std::map<int, int> remaining;
    for (int t : clip.reference) ++remaining[t];
    std::vector<const Spotting*> correct;
    for (const auto& pred : clip.predictions) {
      auto it = remaining.find(pred.token_id);
      if (it == remaining.end() || it->second == 0) continue;
      --it->second;
      correct.push_back(&pred);
    }

    recall_sum += static_cast<double>(correct.size()) / clip.reference.size();
    precision_sum += clip.predictions.empty()
                         ? 0.0
                         : static_cast<double>(correct.size()) / clip.predictions.size();
    ++report.n_sequences;

    // Pair each correct prediction with the nearest unused timed token.
    std::vector<bool> used(clip.timed.size(), false);
    int scored = 0, hits = 0;
    for (const Spotting* pred : correct) {
      int best = -1;
      int best_dist = 0;
      for (std::size_t i = 0; i < clip.timed.size(); ++i) {
        if (used[i] || clip.timed[i].first != pred->token_id) continue;
        const int dist = std::abs(clip.timed[i].second - pred->enc_index);
        if (best < 0 || dist < best_dist) {
          best = static_cast<int>(i);
          best_dist = dist;
        }
      }
      if (best < 0) continue;
      used[static_cast<std::size_t>(best)] = true;
      ++scored;
      if (best_dist <= tolerance_feature_frames) ++hits;
    }
    if (scored > 0) {
      loc_sum += static_cast<double>(hits) / scored;
      ++report.n_loc_sequences;
      report.n_scored_tokens += scored;
    }
  }

  if (report.n_sequences > 0) {
    report.recall = recall_sum / report.n_sequences;
    report.precision = precision_sum / report.n_sequences;
  }
  if (report.n_loc_sequences > 0) report.loc_acc = loc_sum / report.n_loc_sequences;
  return report;
}

nlohmann::json loc_report_to_json(const LocReport& r) {
  return {{"recall", r.recall},
          {"precision", r.precision},
          {"loc_acc", r.loc_acc},
          {"n_sequences", r.n_sequences},
          {"n_scored_tokens", r.n_scored_tokens},
          {"n_loc_sequences", r.n_loc_sequences}};
}

namespace {

bool in_top_k(const Eigen::VectorXd& scores, int label, int k) {
  const double s = scores(label);
  int better = 0;
  for (int c = 0; c < scores.size(); ++c) {
    if (scores(c) > s || (scores(c) == s && c < label)) ++better;
    if (better >= k) return false;
  }
  return true;
}

}  // namespace

RecReport topk_recognition(const std::vector<Eigen::VectorXd>& scores,
                           const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw ContractViolation("topk_recognition: scores/labels size mismatch");
  if (scores.empty()) throw ContractViolation("topk_recognition: empty input");

  struct ClassTally {
    int n = 0;
    int top1 = 0;
    int top5 = 0;
  };
  std::map<int, ClassTally> per_class;
  int top1 = 0, top5 = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int label = labels[i];
    if (label < 0 || label >= scores[i].size())
      throw ContractViolation("topk_recognition: label outside score dimension");
    const bool hit1 = in_top_k(scores[i], label, 1);
    const bool hit5 = in_top_k(scores[i], label, 5);
    top1 += hit1;
    top5 += hit5;
    auto& tally = per_class[label];
    ++tally.n;
    tally.top1 += hit1;
    tally.top5 += hit5;
  }

  RecReport report;
  report.top1_instance = static_cast<double>(top1) / scores.size();
  report.top5_instance = static_cast<double>(top5) / scores.size();
  double c1 = 0.0, c5 = 0.0;
  for (const auto& [label, tally] : per_class) {
    c1 += static_cast<double>(tally.top1) / tally.n;
    c5 += static_cast<double>(tally.top5) / tally.n;
  }
  report.top1_class = c1 / static_cast<double>(per_class.size());
  report.top5_class = c5 / static_cast<double>(per_class.size());
  return report;
}

nlohmann::json rec_report_to_json(const RecReport& r) {
  return {{"top1_per_instance", r.top1_instance},
          {"top5_per_instance", r.top5_instance},
          {"top1_per_class", r.top1_class},
          {"top5_per_class", r.top5_class}};
}

namespace {

void flatten_into(const nlohmann::json& j, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>* out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten_into(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten_into(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_string()) {
    out->emplace_back(prefix, j.get<std::string>());
  } else {
    out->emplace_back(prefix, j.dump());
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> flatten_json(const nlohmann::json& j) {
  std::vector<std::pair<std::string, std::string>> out;
  flatten_into(j, "", &out);
  return out;
}

}  // namespace attnspot
