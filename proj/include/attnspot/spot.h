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

#ifndef ATTNSPOT_SPOT_H_
#define ATTNSPOT_SPOT_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "attnspot/corpus_io.h"
#include "attnspot/decode.h"

namespace attnspot {

// One localised token instance mined from attention.
struct Spotting {
  std::string clip_id;
  int token_id = -1;
  std::string token;  // stem surface form
  int enc_index = 0;
  FrameIndex frame_time = 0;
  double confidence = 0.0;  // aggregated-attention peak value

  bool operator==(const Spotting&) const = default;
};

struct MiningStrategy {
  enum class Kind {
    kGreedyFiltered,
    kGreedyUnfiltered,
    kBeamAll,
    kBeamBestRecall,
    kTfThreshold,
    kTfPrediction,
  };

  Kind kind = Kind::kGreedyFiltered;
  int beam_width = 10;
  double tf_threshold = 0.1;  // must lie in (0, 1)

  void validate() const;
};

const char* to_string(MiningStrategy::Kind kind);
MiningStrategy::Kind mining_kind_from_string(const std::string& name);

// Frame arithmetic for spottings produced on a feature window.
struct SpotContext {
  std::string clip_id;
  FrameIndex window_origin = 0;
  int stride = 4;
};

// Emits one spotting per hypothesis step that survives the reference filter
// (multiset matching: each reference token is consumable once). Unfiltered
// mode keeps every step. Location is the aggregated-attention argmax.
std::vector<Spotting> spot_from_decode(const DecodeResult& result,
                                       const std::vector<int>& reference,
                                       const AttnAggregation& agg, bool filter_against_reference,
                                       const SpotContext& ctx, const Vocabulary& vocab);

// Teacher-forced spotting: one spotting per reference step whose attention
// peak is strictly above tau.
std::vector<Spotting> spot_teacher_forced(const DecodeResult& result, double tau,
                                          const AttnAggregation& agg, const SpotContext& ctx,
                                          const Vocabulary& vocab);

// Yield accounting mirrored by the mining report.
struct YieldStats {
  std::int64_t clips = 0;
  std::int64_t subtitles_newly_annotated = 0;
  std::int64_t ann_full_vocab = 0;
  std::int64_t ann_eval_vocab = 0;

  YieldStats& merge(const YieldStats& o);
};

nlohmann::json yield_stats_to_json(const YieldStats& stats);

struct MineResult {
  AnnotationStore store;
  YieldStats stats;
  // Spottings grouped per clip, in corpus order (used by evaluation).
  std::vector<std::vector<Spotting>> per_clip;
};

// Applies the strategy's per-clip spotter over the whole corpus. eval_vocab
// restricts the ann_eval_vocab column; empty means the full vocabulary.
// Deterministic regardless of `workers`.
MineResult mine_corpus(const Transformer& model, const ParamStore& params, const Corpus& corpus,
                       const MiningStrategy& strategy, const AttnAggregation& agg,
                       const Vocabulary& vocab, const std::set<int>& eval_vocab_ids,
                       int workers = 1);

}  // namespace attnspot

#endif  // ATTNSPOT_SPOT_H_
