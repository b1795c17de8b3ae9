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

#include "attnspot/losses.h"

#include <cmath>

#include "attnspot/common.h"

namespace attnspot {

Eigen::RowVectorXd log_softmax_row(const Eigen::RowVectorXd& logits) {
  const double mx = logits.maxCoeff();
  const double lse = mx + std::log((logits.array() - mx).exp().sum());
  return logits.array() - lse;
}

double sequence_nll(const Mat& logits, const std::vector<int>& target, int pad_id) {
  if (static_cast<int>(target.size()) != logits.rows())
    throw ContractViolation("sequence_nll: target length must match logit rows");
  double loss = 0.0;
  int counted = 0;
  for (int r = 0; r < logits.rows(); ++r) {
    const int t = target[static_cast<std::size_t>(r)];
    if (t == pad_id) continue;
    if (t < 0 || t >= logits.cols())
      throw ContractViolation("sequence_nll: target id out of range");
    loss += -log_softmax_row(logits.row(r))(t);
    ++counted;
  }
  return counted == 0 ? 0.0 : loss / counted;
}

Eigen::RowVectorXd gaussian_target(int t_enc, int center, double sigma) {
  if (sigma <= 0.0) throw ContractViolation("gaussian_target: sigma must be positive");
  Eigen::RowVectorXd g(t_enc);
  for (int j = 0; j < t_enc; ++j) {
    const double d = j - center;
    g(j) = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  return g / g.sum();
}

AlignmentLossValue alignment_loss(const AttentionRecord& attn,
                                  const std::vector<StepAnnotation>& annotations, double sigma,
                                  const AlignLayerSel& sel) {
  AlignmentLossValue out;
  if (annotations.empty() || attn.probs.empty()) return out;
  const Mat agg = sel.average_layers ? attn.mean_all() : attn.head_mean(sel.layer);
  for (const auto& ann : annotations) {
    if (ann.enc_index < 0 || ann.enc_index >= attn.t_enc() || ann.dec_step < 0 ||
        ann.dec_step >= attn.t_dec()) {
      ++out.skipped;
      continue;
    }
    const auto target = gaussian_target(attn.t_enc(), ann.enc_index, sigma);
    out.loss += (agg.row(ann.dec_step) - target).squaredNorm();
    ++out.used;
  }
  return out;
}

}  // namespace attnspot
