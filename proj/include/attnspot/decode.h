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

#ifndef ATTNSPOT_DECODE_H_
#define ATTNSPOT_DECODE_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "attnspot/transformer.h"
#include "attnspot/vocabulary.h"

namespace attnspot {

// Head attention is always averaged; layers are either one index or the mean
// over all layers.
struct AttnAggregation {
  enum class Layers { kSingle, kMeanAll };
  Layers layers = Layers::kMeanAll;
  int layer = 0;
};

struct DecodeResult {
  std::vector<int> hypothesis;  // content token ids; BOS/EOS never appear
  bool eos_terminated = false;
  double score = 0.0;  // sum of chosen-token log-probs, incl. the terminating EOS
  AttentionRecord attention;  // one decoder step per hypothesis token
  // Teacher-forced decoding only: the model's argmax at every reference step.
  std::vector<int> predictions;
};

// Argmax decoding; ties break toward the lowest token id. Stops at EOS or
// after max_dec_len tokens.
DecodeResult greedy_decode(const Transformer& model, const ParamStore& params,
                           const Mat& features);

// Left-to-right beam search without length normalisation. EOS-terminated
// candidates must rank inside the beam to survive, so width 1 reproduces
// greedy decoding exactly. Results are sorted by score descending.
std::vector<DecodeResult> beam_decode(const Transformer& model, const ParamStore& params,
                                      const Mat& features, int width);

// Feeds the reference as decoder input. The result's hypothesis holds the
// reference (attention rows align with it); `predictions` holds the argmax
// at each step. References longer than max_dec_len are truncated with a
// warning on stderr.
DecodeResult teacher_forced_decode(const Transformer& model, const ParamStore& params,
                                   const Mat& features, const std::vector<int>& reference);

// Head-averaged, layer-selected attention as a T_dec x T_enc matrix whose
// rows remain distributions.
Mat aggregate_attention(const AttentionRecord& record, const AttnAggregation& agg);

// First index holding the row maximum (ties toward the lowest index).
int argmax_index(const Eigen::RowVectorXd& row);

// Debug dump line: hypothesis stems, score, per-step argmax encoder index.
void append_decode_dump(std::ostream& out, const std::string& clip_id, const DecodeResult& result,
                        const Vocabulary& vocab, const AttnAggregation& agg);

}  // namespace attnspot

#endif  // ATTNSPOT_DECODE_H_
