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

#include "attnspot/corpus_gen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "attnspot/common.h"
#include "attnspot/rng.h"

namespace attnspot {
namespace {

constexpr char kConsonants[] = "bdgklmnprstv";
constexpr char kVowels[] = "aiou";
constexpr int kSyllables = 48;  // 12 consonants x 4 vowels

// Stream ids: 0 is reserved for world-level draws, clip i uses i + 1.
constexpr std::uint64_t kWorldStream = 0;

struct World {
  std::vector<std::string> words;       // token id -> surface form
  std::vector<Eigen::VectorXf> means;   // token id -> emission mean
};

World build_world(const CorpusGenConfig& cfg, std::uint64_t seed) {
  World w;
  w.words = synthetic_token_words(cfg.vocab_size);
  RngStream rng(seed, kWorldStream);
  w.means.resize(cfg.vocab_size);
  for (int v = 0; v < cfg.vocab_size; ++v) {
    Eigen::VectorXf mu(cfg.feature_dim);
    for (int d = 0; d < cfg.feature_dim; ++d) mu[d] = static_cast<float>(rng.normal());
    w.means[v] = std::move(mu);
  }
  return w;
}

void validate(const CorpusGenConfig& cfg) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(cfg.noise.drop_prob) || !prob(cfg.noise.insert_prob) || !prob(cfg.reveal_fraction) ||
      !prob(cfg.stop_word_prob))
    throw ConfigError("corpus generation probabilities must lie in [0, 1]");
  if (cfg.noise.offset_std_frames < 0.0) throw ConfigError("offset_std_frames must be >= 0");
  if (cfg.n_clips < 1) throw ConfigError("n_clips must be >= 1");
  if (cfg.vocab_size < 2) throw ConfigError("vocab_size must be >= 2");
  if (cfg.feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
  if (cfg.tokens_per_clip_min < 1 || cfg.tokens_per_clip_max < cfg.tokens_per_clip_min)
    throw ConfigError("invalid tokens_per_clip range");
  if (cfg.min_sign_frames < 1 || cfg.max_sign_frames < cfg.min_sign_frames)
    throw ConfigError("invalid sign duration range");
  if (cfg.clips_per_programme < 1) throw ConfigError("clips_per_programme must be >= 1");
}

// Generates one clip in window-local coordinates (window starts at frame 0).
SubtitledClip generate_clip(const CorpusGenConfig& cfg, const World& world, std::uint64_t seed,
                            std::size_t clip_index) {
  RngStream rng(seed, clip_index + 1);

  const int n_tokens =
      static_cast<int>(rng.uniform_int(cfg.tokens_per_clip_min, cfg.tokens_per_clip_max));

  // Distinct subtitle tokens, sampled without replacement.
  std::vector<int> pool(cfg.vocab_size);
  for (int v = 0; v < cfg.vocab_size; ++v) pool[v] = v;
  rng.shuffle(pool);
  std::vector<int> subtitle_tokens(pool.begin(), pool.begin() + std::min(n_tokens, cfg.vocab_size));

  // Realised signs: subtitle order unless reordered, minus drops, plus inserts.
  std::vector<int> signed_tokens;
  for (int tok : subtitle_tokens)
    if (!rng.bernoulli(cfg.noise.drop_prob)) signed_tokens.push_back(tok);
  if (cfg.noise.insert_prob > 0.0) {
    std::vector<int> outside(pool.begin() + subtitle_tokens.size(), pool.end());
    std::size_t next_outside = 0;
    std::vector<int> with_inserts;
    for (std::size_t slot = 0; slot <= signed_tokens.size(); ++slot) {
      if (next_outside < outside.size() && rng.bernoulli(cfg.noise.insert_prob))
        with_inserts.push_back(outside[next_outside++]);
      if (slot < signed_tokens.size()) with_inserts.push_back(signed_tokens[slot]);
    }
    signed_tokens = std::move(with_inserts);
  }
  if (cfg.noise.reorder) rng.shuffle(signed_tokens);

  // Lay signs on the local timeline.
  std::vector<GroundTruthSign> truth;
  FrameIndex cursor = rng.uniform_int(2, 6);
  for (int tok : signed_tokens) {
    GroundTruthSign sign;
    sign.token_id = tok;
    sign.raw = world.words[tok];
    sign.onset_frame = cursor;
    sign.duration_frames =
        static_cast<int>(rng.uniform_int(cfg.min_sign_frames, cfg.max_sign_frames));
    cursor = sign.onset_frame + sign.duration_frames + rng.uniform_int(2, 6);
    truth.push_back(std::move(sign));
  }

  FrameIndex signing_start = 0, signing_end = 0;
  if (!truth.empty()) {
    signing_start = truth.front().onset_frame;
    signing_end = truth.back().onset_frame + truth.back().duration_frames;
  } else {
    signing_end = static_cast<FrameIndex>(n_tokens) * 10 + 10;
  }

  const FrameIndex offset = std::llround(rng.normal(0.0, cfg.noise.offset_std_frames));
  FrameIndex sub_start = signing_start + offset;
  FrameIndex sub_end = signing_end + offset;
  if (sub_end <= sub_start) sub_end = sub_start + 1;

  // Feature window covers both spans with random padding, then everything is
  // shifted so the window starts at local frame 0.
  const FrameIndex pad_left = rng.uniform_int(4, 12);
  const FrameIndex pad_right = rng.uniform_int(4, 12);
  const FrameIndex win_start = std::min(signing_start, sub_start) - pad_left;
  FrameIndex win_end = std::max(signing_end, sub_end) + pad_right;
  const int t_enc = static_cast<int>((win_end - win_start + cfg.stride - 1) / cfg.stride);
  win_end = win_start + static_cast<FrameIndex>(t_enc) * cfg.stride;

  SubtitledClip clip;
  clip.features.stride = cfg.stride;
  clip.features.origin_frame = 0;
  clip.sub_span = {sub_start - win_start, sub_end - win_start};
  for (auto& sign : truth) sign.onset_frame -= win_start;
  signing_start -= win_start;
  signing_end -= win_start;

  // Token-conditioned emissions; background frames draw around zero.
  Eigen::MatrixXf feats(t_enc, cfg.feature_dim);
  for (int j = 0; j < t_enc; ++j) {
    const FrameIndex mid = static_cast<FrameIndex>(j) * cfg.stride + cfg.stride / 2;
    const Eigen::VectorXf* mean = nullptr;
    for (const auto& sign : truth) {
      if (mid >= sign.onset_frame && mid < sign.onset_frame + sign.duration_frames) {
        mean = &world.means[sign.token_id];
        break;
      }
    }
    for (int d = 0; d < cfg.feature_dim; ++d) {
      const double base = mean ? (*mean)[d] : 0.0;
      feats(j, d) = static_cast<float>(base + rng.normal(0.0, cfg.emission_noise_std));
    }
  }
  clip.features.features = std::move(feats);

  // Subtitle surface forms with interspersed stop words.
  const auto stops = synthetic_stop_words();
  for (std::size_t i = 0; i < subtitle_tokens.size(); ++i) {
    if (rng.bernoulli(cfg.stop_word_prob)) {
      const auto& s = stops[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(stops.size()) - 1))];
      clip.subtitle.push_back(TokenRef{-1, s});
    }
    clip.subtitle.push_back(TokenRef{subtitle_tokens[i], world.words[subtitle_tokens[i]]});
  }

  const FrameIndex window_frames = static_cast<FrameIndex>(t_enc) * cfg.stride;
  clip.activity_mask.assign(static_cast<std::size_t>(window_frames), 0);
  for (FrameIndex f = std::max<FrameIndex>(0, signing_start - 2);
       f < std::min(window_frames, signing_end + 2); ++f)
    clip.activity_mask[static_cast<std::size_t>(f)] = 1;

  for (const auto& sign : truth) {
    if (!rng.bernoulli(cfg.reveal_fraction)) continue;
    SparseAnnotation ann;
    ann.token_id = sign.token_id;
    ann.raw = sign.raw;
    ann.frame_time = sign.midpoint_frame();
    ann.confidence = 1.0;
    ann.source = AnnotationSource::kSynthetic;
    clip.annotations.push_back(std::move(ann));
  }

  clip.truth = std::move(truth);
  return clip;
}

}  // namespace

std::vector<std::string> synthetic_token_words(int vocab_size) {
  if (vocab_size > kSyllables * kSyllables * kSyllables)
    throw ConfigError("vocab_size exceeds the synthetic word space");
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(vocab_size));
  for (int id = 0; id < vocab_size; ++id) {
    std::string w;
    int rest = id;
    for (int s = 0; s < 3; ++s) {
      const int syl = rest % kSyllables;
      rest /= kSyllables;
      w += kConsonants[syl % 12];
      w += kVowels[syl / 12];
    }
    words.push_back(std::move(w));
  }
  return words;
}

std::vector<std::string> synthetic_stop_words() { return {"se", "ta", "po", "nu", "ko"}; }

Corpus generate_corpus(const CorpusGenConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  const World world = build_world(cfg, seed);

  Corpus corpus;
  corpus.meta.fps = cfg.fps;
  corpus.meta.stride = cfg.stride;
  corpus.meta.feature_dim = cfg.feature_dim;
  corpus.meta.stop_words = synthetic_stop_words();
  corpus.clips.resize(static_cast<std::size_t>(cfg.n_clips));

  const int workers = std::max(1, cfg.workers);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      corpus.clips[i] = generate_clip(cfg, world, seed, i);
  };
  if (workers == 1) {
    run(0, corpus.clips.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t per = (corpus.clips.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(corpus.clips.size(), per * static_cast<std::size_t>(w));
      const std::size_t end = std::min(corpus.clips.size(), begin + per);
      if (begin < end) threads.emplace_back(run, begin, end);
    }
    for (auto& t : threads) t.join();
  }

  // Place clips on their programme timelines and assign ids.
  FrameIndex origin = 0;
  for (std::size_t i = 0; i < corpus.clips.size(); ++i) {
    auto& clip = corpus.clips[i];
    const std::size_t prog = i / static_cast<std::size_t>(cfg.clips_per_programme);
    const std::size_t within = i % static_cast<std::size_t>(cfg.clips_per_programme);
    if (within == 0) origin = 0;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "p%06zu_c%03zu", prog, within);
    clip.id = buf;
    clip.features.origin_frame = origin;
    clip.sub_span.first += origin;
    clip.sub_span.second += origin;
    for (auto& ann : clip.annotations) ann.frame_time += origin;
    if (clip.truth)
      for (auto& sign : *clip.truth) sign.onset_frame += origin;
    origin = clip.features.end_frame() + 8;  // inter-clip gap on the programme
  }
  return corpus;
}

Corpus generate_corpus(int n_clips, int vocab_size, int feature_dim, const NoiseConfig& noise,
                       std::uint64_t seed) {
  CorpusGenConfig cfg;
  cfg.n_clips = n_clips;
  cfg.vocab_size = vocab_size;
  cfg.feature_dim = feature_dim;
  cfg.noise = noise;
  return generate_corpus(cfg, seed);
}

}  // namespace attnspot
