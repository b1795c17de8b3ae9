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

#include "attnspot/decode.h"

#include <algorithm>
#include <iostream>
#include <limits>

#include <json.hpp>

#include "attnspot/common.h"
#include "attnspot/losses.h"

namespace attnspot {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

AttentionRecord empty_record(const ModelConfig& cfg, int t_enc) {
  AttentionRecord rec;
  rec.n_layers = cfg.n_layers;
  rec.n_heads = cfg.n_heads;
  rec.probs.assign(static_cast<std::size_t>(cfg.n_layers) * cfg.n_heads, Mat::Zero(0, t_enc));
  return rec;
}

Eigen::RowVectorXd step_log_probs(const Mat& logits) {
  Eigen::RowVectorXd lp = log_softmax_row(logits.row(logits.rows() - 1));
  lp(Vocabulary::kPad) = kNegInf;
  lp(Vocabulary::kBos) = kNegInf;
  return lp;
}

std::vector<int> with_bos(const std::vector<int>& tokens, std::size_t n) {
  std::vector<int> input;
  input.reserve(n + 1);
  input.push_back(Vocabulary::kBos);
  input.insert(input.end(), tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(n));
  return input;
}

// Attention rows for the first n hypothesis tokens come from a forward pass
// whose decoder input is [BOS, t1..t_{n-1}]; causal masking makes those rows
// identical to the ones seen while decoding step by step.
AttentionRecord materialize_attention(const Transformer& model, const ParamStore& params,
                                      const Mat& features, const std::vector<int>& tokens) {
  if (tokens.empty()) return empty_record(model.config(), static_cast<int>(features.rows()));
  auto fwd = model.forward(params, features, with_bos(tokens, tokens.size() - 1));
  return fwd.attention;
}

}  // namespace

int argmax_index(const Eigen::RowVectorXd& row) {
  int best = 0;
  for (int i = 1; i < row.size(); ++i)
    if (row(i) > row(best)) best = i;
  return best;
}

DecodeResult greedy_decode(const Transformer& model, const ParamStore& params,
                           const Mat& features) {
  const ModelConfig& cfg = model.config();
  DecodeResult result;
  std::vector<int> prefix{Vocabulary::kBos};
  for (int step = 0; step < cfg.max_dec_len; ++step) {
    auto fwd = model.forward(params, features, prefix);
    const Eigen::RowVectorXd lp = step_log_probs(fwd.logits);
    const int best = argmax_index(lp);
    result.score += lp(best);
    if (best == Vocabulary::kEos) {
      result.eos_terminated = true;
      break;
    }
    result.hypothesis.push_back(best);
    prefix.push_back(best);
  }
  result.attention = materialize_attention(model, params, features, result.hypothesis);
  return result;
}

namespace {

struct BeamCandidate {
  std::vector<int> tokens;
  double score = 0.0;
  bool finished = false;
};

bool beam_less(const BeamCandidate& a, const BeamCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.tokens < b.tokens;
}

}  // namespace

std::vector<DecodeResult> beam_decode(const Transformer& model, const ParamStore& params,
                                      const Mat& features, int width) {
  if (width < 1) throw ConfigError("beam width must be >= 1");
  const ModelConfig& cfg = model.config();

  std::vector<BeamCandidate> live{BeamCandidate{}};
  std::vector<BeamCandidate> finished;

  for (int step = 0; step < cfg.max_dec_len && !live.empty(); ++step) {
    std::vector<BeamCandidate> candidates;
    candidates.reserve(live.size() * static_cast<std::size_t>(cfg.vocab_size));
    for (const auto& beam : live) {
      auto fwd = model.forward(params, features, with_bos(beam.tokens, beam.tokens.size()));
      const Eigen::RowVectorXd lp = step_log_probs(fwd.logits);
      for (int v = 0; v < cfg.vocab_size; ++v) {
        if (v == Vocabulary::kPad || v == Vocabulary::kBos) continue;
        BeamCandidate c;
        c.tokens = beam.tokens;
        c.score = beam.score + lp(v);
        if (v == Vocabulary::kEos) {
          c.finished = true;
        } else {
          c.tokens.push_back(v);
        }
        candidates.push_back(std::move(c));
      }
    }
    std::sort(candidates.begin(), candidates.end(), beam_less);
    if (static_cast<int>(candidates.size()) > width)
      candidates.resize(static_cast<std::size_t>(width));

    live.clear();
    for (auto& c : candidates) {
      if (c.finished)
        finished.push_back(std::move(c));
      else
        live.push_back(std::move(c));
    }
  }

  for (auto& beam : live) finished.push_back(std::move(beam));  // max-length truncations
  std::sort(finished.begin(), finished.end(), beam_less);
  if (static_cast<int>(finished.size()) > width) finished.resize(static_cast<std::size_t>(width));

  std::vector<DecodeResult> results;
  results.reserve(finished.size());
  for (const auto& beam : finished) {
    DecodeResult r;
    r.hypothesis = beam.tokens;
    r.score = beam.score;
    r.eos_terminated = beam.finished;
    r.attention = materialize_attention(model, params, features, r.hypothesis);
    results.push_back(std::move(r));
  }
  return results;
}

DecodeResult teacher_forced_decode(const Transformer& model, const ParamStore& params,
                                   const Mat& features, const std::vector<int>& reference) {
  if (reference.empty()) throw ContractViolation("teacher forcing needs a non-empty reference");
  const ModelConfig& cfg = model.config();
  std::vector<int> ref = reference;
  if (static_cast<int>(ref.size()) > cfg.max_dec_len) {
    std::cerr << "warning: reference truncated from " << ref.size() << " to " << cfg.max_dec_len
              << " tokens\n";
    ref.resize(static_cast<std::size_t>(cfg.max_dec_len));
  }

  auto fwd = model.forward(params, features, with_bos(ref, ref.size() - 1));
  DecodeResult result;
  result.hypothesis = ref;
  result.attention = std::move(fwd.attention);
  result.predictions.reserve(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    Eigen::RowVectorXd lp = log_softmax_row(fwd.logits.row(static_cast<int>(i)));
    lp(Vocabulary::kPad) = kNegInf;
    lp(Vocabulary::kBos) = kNegInf;
    result.predictions.push_back(argmax_index(lp));
    result.score += lp(ref[i]);
  }
  return result;
}

Mat aggregate_attention(const AttentionRecord& record, const AttnAggregation& agg) {
  if (agg.layers == AttnAggregation::Layers::kSingle) {
    if (agg.layer < 0 || agg.layer >= record.n_layers)
      throw ContractViolation("aggregation layer out of range");
    return record.head_mean(agg.layer);
  }
  return record.mean_all();
}

void append_decode_dump(std::ostream& out, const std::string& clip_id, const DecodeResult& result,
                        const Vocabulary& vocab, const AttnAggregation& agg) {
  nlohmann::json j;
  j["clip_id"] = clip_id;
  std::vector<std::string> stems;
  stems.reserve(result.hypothesis.size());
  for (int id : result.hypothesis) stems.push_back(vocab.stem_of(id));
  j["hypothesis"] = std::move(stems);
  j["score"] = result.score;
  j["eos"] = result.eos_terminated;
  if (!result.hypothesis.empty()) {
    const Mat att = aggregate_attention(result.attention, agg);
    std::vector<int> peaks;
    peaks.reserve(static_cast<std::size_t>(att.rows()));
    for (int r = 0; r < att.rows(); ++r) peaks.push_back(argmax_index(att.row(r)));
    j["attention_argmax"] = std::move(peaks);
  } else {
    j["attention_argmax"] = nlohmann::json::array();
  }
  out << j.dump() << '\n';
}

}  // namespace attnspot
