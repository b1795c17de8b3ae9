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

#ifndef ATTNSPOT_RUN_CONFIG_H_
#define ATTNSPOT_RUN_CONFIG_H_

#include <string>
#include <vector>

#include <json.hpp>

#include "attnspot/classify.h"
#include "attnspot/corpus_gen.h"
#include "attnspot/corpus_transforms.h"
#include "attnspot/decode.h"
#include "attnspot/spot.h"
#include "attnspot/train.h"
#include "attnspot/vocabulary.h"

namespace attnspot {

// Attention aggregation resolved per decoding mode: "auto" follows the
// defaults (mean over layers for greedy/beam, first layer for teacher
// forcing); "mean" and "layerN" force a choice.
struct AggregationChoice {
  bool automatic = true;
  AttnAggregation explicit_agg;

  AttnAggregation resolve(bool teacher_forced, int n_layers) const;
};

AggregationChoice parse_aggregation(const std::string& text);

struct RunConfig {
  std::uint64_t seed = 1;

  CorpusGenConfig corpus;
  int corpus_holdout_clips = 0;
  double corpus_min_conf = 0.7;
  RealignMode realign = RealignMode::kNone;
  double realign_pad_seconds = 2.0;

  PreprocessConfig text;
  std::string stop_words_file;

  ModelConfig model;  // vocab_size/feature_dim are filled from data at run time
  TrainConfig train;

  std::string decode_strategy = "greedy";
  int decode_beam_width = 10;
  AggregationChoice decode_agg;

  MiningStrategy mining;
  AggregationChoice mining_agg;
  std::string mining_eval_vocab_file;
  int mining_workers = 1;

  int eval_tolerance_feature_frames = 2;
  double eval_min_conf = 0.9;

  MlpConfig classify;
  int classify_window_frames = 16;
  std::vector<std::uint64_t> classify_seeds{1, 2, 3};

  // Canonical merged document (defaults + user file + overrides).
  nlohmann::json canonical;
};

nlohmann::json default_run_config_json();

// Loads and validates a config file; unknown keys are rejected. `overrides`
// holds dotted-path assignments like "train.epochs=5".
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides);
RunConfig run_config_from_json(const nlohmann::json& user);

std::string config_hash(const nlohmann::json& canonical);

// Run manifest written next to each subcommand's primary output.
void write_manifest(const std::string& output_path, const std::string& subcommand,
                    const RunConfig& cfg, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, double wall_seconds);

}  // namespace attnspot

#endif  // ATTNSPOT_RUN_CONFIG_H_
