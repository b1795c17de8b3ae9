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

#ifndef ATTNSPOT_LOSSES_H_
#define ATTNSPOT_LOSSES_H_

#include <vector>

#include "attnspot/transformer.h"

namespace attnspot {

Eigen::RowVectorXd log_softmax_row(const Eigen::RowVectorXd& logits);

// Mean over steps with target != pad_id of -log p(target token | logits row).
double sequence_nll(const Mat& logits, const std::vector<int>& target,
                    int pad_id = 0);

// Discrete Gaussian over encoder positions, normalised to sum 1.
Eigen::RowVectorXd gaussian_target(int t_enc, int center, double sigma);

// Which attention matrix the alignment loss (and localisation) reads.
struct AlignLayerSel {
  bool average_layers = true;
  int layer = 0;  // used when average_layers is false
};

struct StepAnnotation {
  int dec_step;
  int enc_index;
};

struct AlignmentLossValue {
  double loss = 0.0;
  int used = 0;
  int skipped = 0;  // annotations whose enc_index fell outside the window
};

// Sum over annotated steps of the squared L2 distance between the selected
// head-averaged attention row and a Gaussian centred at the annotation.
AlignmentLossValue alignment_loss(const AttentionRecord& attn,
                                  const std::vector<StepAnnotation>& annotations, double sigma,
                                  const AlignLayerSel& sel);

}  // namespace attnspot

#endif  // ATTNSPOT_LOSSES_H_
