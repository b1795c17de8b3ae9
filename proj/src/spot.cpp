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

#include "attnspot/spot.h"

#include <algorithm>
#include <map>
#include <thread>

#include "attnspot/common.h"

namespace attnspot {

void MiningStrategy::validate() const {
  if (beam_width < 1) throw ConfigError("beam width must be >= 1");
  if (tf_threshold <= 0.0 || tf_threshold >= 1.0)
    throw ConfigError("tf_threshold must lie in (0, 1)");
}

const char* to_string(MiningStrategy::Kind kind) {
  switch (kind) {
    case MiningStrategy::Kind::kGreedyFiltered:
      return "gd";
    case MiningStrategy::Kind::kGreedyUnfiltered:
      return "gd-unfiltered";
    case MiningStrategy::Kind::kBeamAll:
      return "bs-all";
    case MiningStrategy::Kind::kBeamBestRecall:
      return "bs-best-recall";
    case MiningStrategy::Kind::kTfThreshold:
      return "tf";
    case MiningStrategy::Kind::kTfPrediction:
      return "tf-prediction";
  }
  return "gd";
}

MiningStrategy::Kind mining_kind_from_string(const std::string& name) {
  if (name == "gd") return MiningStrategy::Kind::kGreedyFiltered;
  if (name == "gd-unfiltered") return MiningStrategy::Kind::kGreedyUnfiltered;
  if (name == "bs-all") return MiningStrategy::Kind::kBeamAll;
  if (name == "bs-best-recall") return MiningStrategy::Kind::kBeamBestRecall;
  if (name == "tf") return MiningStrategy::Kind::kTfThreshold;
  if (name == "tf-prediction") return MiningStrategy::Kind::kTfPrediction;
  throw ConfigError("unknown mining strategy: " + name);
}

namespace {

Spotting make_spotting(const SpotContext& ctx, const Vocabulary& vocab, int token_id,
                       int enc_index, double confidence) {
  Spotting s;
  s.clip_id = ctx.clip_id;
  s.token_id = token_id;
  s.token = vocab.stem_of(token_id);
  s.enc_index = enc_index;
  s.frame_time = ctx.window_origin + static_cast<FrameIndex>(enc_index) * ctx.stride;
  s.confidence = confidence;
  return s;
}

std::map<int, int> token_counts(const std::vector<int>& tokens) {
  std::map<int, int> counts;
  for (int t : tokens) ++counts[t];
  return counts;
}

}  // namespace

std::vector<Spotting> spot_from_decode(const DecodeResult& result,
                                       const std::vector<int>& reference,
                                       const AttnAggregation& agg, bool filter_against_reference,
                                       const SpotContext& ctx, const Vocabulary& vocab) {
  std::vector<Spotting> out;
  if (result.hypothesis.empty()) return out;
  const Mat att = aggregate_attention(result.attention, agg);
  auto remaining = token_counts(reference);
  for (std::size_t step = 0; step < result.hypothesis.size(); ++step) {
    const int token = result.hypothesis[step];
    if (filter_against_reference) {
      auto it = remaining.find(token);
      if (it == remaining.end() || it->second == 0) continue;
      --it->second;
    }
    const int enc = argmax_index(att.row(static_cast<int>(step)));
    out.push_back(make_spotting(ctx, vocab, token, enc, att(static_cast<int>(step), enc)));
  }
  return out;
}

std::vector<Spotting> spot_teacher_forced(const DecodeResult& result, double tau,
                                          const AttnAggregation& agg, const SpotContext& ctx,
                                          const Vocabulary& vocab) {
  std::vector<Spotting> out;
  if (result.hypothesis.empty()) return out;
  const Mat att = aggregate_attention(result.attention, agg);
  for (std::size_t step = 0; step < result.hypothesis.size(); ++step) {
    const int enc = argmax_index(att.row(static_cast<int>(step)));
    const double peak = att(static_cast<int>(step), enc);
    if (peak > tau)
      out.push_back(make_spotting(ctx, vocab, result.hypothesis[step], enc, peak));
  }
  return out;
}

YieldStats& YieldStats::merge(const YieldStats& o) {
  clips += o.clips;
  subtitles_newly_annotated += o.subtitles_newly_annotated;
  ann_full_vocab += o.ann_full_vocab;
  ann_eval_vocab += o.ann_eval_vocab;
  return *this;
}

nlohmann::json yield_stats_to_json(const YieldStats& stats) {
  return {{"clips", stats.clips},
          {"subtitles_newly_annotated", stats.subtitles_newly_annotated},
          {"ann_full_vocab", stats.ann_full_vocab},
          {"ann_eval_vocab", stats.ann_eval_vocab}};
}

namespace {

std::vector<Spotting> spot_clip(const Transformer& model, const ParamStore& params,
                                const SubtitledClip& clip, const MiningStrategy& strategy,
                                const AttnAggregation& agg, const Vocabulary& vocab) {
  if (clip.subtitle.empty()) return {};
  const FeatureSequence window = subtitle_window_features(clip);
  if (window.t_enc() < 1 || window.t_enc() > model.config().max_enc_len) return {};
  const Mat feats = window.features.cast<double>();
  std::vector<int> reference;
  reference.reserve(clip.subtitle.size());
  for (const auto& tok : clip.subtitle) reference.push_back(tok.token_id);

  const SpotContext ctx{clip.id, window.origin_frame, window.stride};
  using Kind = MiningStrategy::Kind;
  switch (strategy.kind) {
    case Kind::kGreedyFiltered:
    case Kind::kGreedyUnfiltered: {
      const auto result = greedy_decode(model, params, feats);
      const bool filter = strategy.kind == Kind::kGreedyFiltered;
      return spot_from_decode(result, reference, agg, filter, ctx, vocab);
    }
    case Kind::kBeamAll: {
      const auto beams = beam_decode(model, params, feats, strategy.beam_width);
      // Best-scoring beams come first; identical (token, enc_index) pairs
      // keep the first (best) confidence.
      std::vector<Spotting> merged;
      std::set<std::pair<int, int>> seen;
      for (const auto& beam : beams) {
        for (auto& s : spot_from_decode(beam, reference, agg, true, ctx, vocab))
          if (seen.insert({s.token_id, s.enc_index}).second) merged.push_back(std::move(s));
      }
      return merged;
    }
    case Kind::kBeamBestRecall: {
      const auto beams = beam_decode(model, params, feats, strategy.beam_width);
      if (beams.empty()) return {};
      std::size_t best = 0;
      int best_matched = -1;
      for (std::size_t i = 0; i < beams.size(); ++i) {
        auto remaining = token_counts(reference);
        int matched = 0;
        for (int t : beams[i].hypothesis) {
          auto it = remaining.find(t);
          if (it != remaining.end() && it->second > 0) {
            --it->second;
            ++matched;
          }
        }
        if (matched > best_matched) {
          best_matched = matched;
          best = i;
        }
      }
      return spot_from_decode(beams[best], reference, agg, true, ctx, vocab);
    }
    case Kind::kTfThreshold: {
      const auto result = teacher_forced_decode(model, params, feats, reference);
      return spot_teacher_forced(result, strategy.tf_threshold, agg, ctx, vocab);
    }
    case Kind::kTfPrediction: {
      auto result = teacher_forced_decode(model, params, feats, reference);
      result.hypothesis = result.predictions;  // model tokens, reference-step attention
      return spot_from_decode(result, reference, agg, true, ctx, vocab);
    }
  }
  return {};
}

}  // namespace

MineResult mine_corpus(const Transformer& model, const ParamStore& params, const Corpus& corpus,
                       const MiningStrategy& strategy, const AttnAggregation& agg,
                       const Vocabulary& vocab, const std::set<int>& eval_vocab_ids,
                       int workers) {
  strategy.validate();
  MineResult result;
  result.per_clip.resize(corpus.clips.size());

  const int n_workers = std::max(1, workers);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      result.per_clip[i] = spot_clip(model, params, corpus.clips[i], strategy, agg, vocab);
  };
  if (n_workers == 1) {
    run(0, corpus.clips.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t per = (corpus.clips.size() + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
      const std::size_t begin = std::min(corpus.clips.size(), per * static_cast<std::size_t>(w));
      const std::size_t end = std::min(corpus.clips.size(), begin + per);
      if (begin < end) threads.emplace_back(run, begin, end);
    }
    for (auto& t : threads) t.join();
  }

  for (std::size_t i = 0; i < corpus.clips.size(); ++i) {
    const auto& spots = result.per_clip[i];
    ++result.stats.clips;
    if (corpus.clips[i].annotations.empty() && !spots.empty())
      ++result.stats.subtitles_newly_annotated;
    for (const auto& s : spots) {
      result.stats.ann_full_vocab += 1;
      if (eval_vocab_ids.empty() || eval_vocab_ids.count(s.token_id))
        result.stats.ann_eval_vocab += 1;
      result.store.rows.push_back(
          AnnotationRow{s.clip_id, s.token, s.frame_time, s.confidence,
                        AnnotationSource::kAttention});
    }
  }
  return result;
}

}  // namespace attnspot
