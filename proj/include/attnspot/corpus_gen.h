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

#ifndef ATTNSPOT_CORPUS_GEN_H_
#define ATTNSPOT_CORPUS_GEN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "attnspot/corpus.h"

namespace attnspot {

// Weak-alignment noise model: subtitles may claim tokens with no realised
// sign (drop), signing may contain tokens absent from the subtitle (insert),
// sign order may differ from subtitle order (reorder), and the subtitle span
// is shifted against the signing (offset).
struct NoiseConfig {
  double drop_prob = 0.0;
  double insert_prob = 0.0;
  bool reorder = false;
  double offset_std_frames = 0.0;
  std::uint64_t seed = 0;  // carried in configs; the generate_corpus seed argument wins
};

struct CorpusGenConfig {
  int n_clips = 100;
  int vocab_size = 50;
  int feature_dim = 64;
  NoiseConfig noise;

  int tokens_per_clip_min = 4;
  int tokens_per_clip_max = 8;
  double reveal_fraction = 0.3;   // fraction of truth signs surfaced as annotations
  double stop_word_prob = 0.25;   // chance of a stop word between subtitle tokens
  double emission_noise_std = 1.0;
  int clips_per_programme = 1;
  int stride = 4;
  int fps = 25;
  int min_sign_frames = 7;
  int max_sign_frames = 13;
  int workers = 1;
};

// Synthetic token surface forms; deterministic, Porter-stable, pairwise
// distinct. Independent of any seed so corpora over the same vocab size share
// a token universe.
std::vector<std::string> synthetic_token_words(int vocab_size);

// The generator's stop set, written into corpus metadata.
std::vector<std::string> synthetic_stop_words();

// Deterministic for a fixed (cfg, seed) regardless of cfg.workers. Every clip
// carries ground truth; per-token Gaussian feature emissions make the
// token-to-feature mapping learnable.
Corpus generate_corpus(const CorpusGenConfig& cfg, std::uint64_t seed);

Corpus generate_corpus(int n_clips, int vocab_size, int feature_dim, const NoiseConfig& noise,
                       std::uint64_t seed);

}  // namespace attnspot

#endif  // ATTNSPOT_CORPUS_GEN_H_
