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

#include "attnspot/vocabulary.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "attnspot/common.h"

namespace attnspot {

namespace {
const std::string kSpecialNames[] = {"<pad>", "<bos>", "<eos>"};
}

Vocabulary::Vocabulary(std::vector<std::pair<std::string, std::int64_t>> ordered,
                       std::set<std::string> stop_words)
    : stop_words_(std::move(stop_words)) {
  stems_.reserve(ordered.size());
  freqs_.reserve(ordered.size());
  for (auto& [stem, freq] : ordered) {
    stem_to_id_.emplace(stem, static_cast<int>(stems_.size()) + kFirstContent);
    stems_.push_back(std::move(stem));
    freqs_.push_back(freq);
  }
}

int Vocabulary::id_of(const std::string& stem) const {
  auto it = stem_to_id_.find(stem);
  return it == stem_to_id_.end() ? -1 : it->second;
}

const std::string& Vocabulary::stem_of(int id) const {
  if (id >= 0 && id < kFirstContent) return kSpecialNames[id];
  const int idx = id - kFirstContent;
  if (idx < 0 || idx >= static_cast<int>(stems_.size()))
    throw ContractViolation("vocabulary id out of range: " + std::to_string(id));
  return stems_[idx];
}

std::int64_t Vocabulary::freq_of(int id) const {
  const int idx = id - kFirstContent;
  if (idx < 0 || idx >= static_cast<int>(freqs_.size())) return 0;
  return freqs_[idx];
}

std::vector<int> Vocabulary::content_ids() const {
  std::vector<int> ids(stems_.size());
  for (std::size_t i = 0; i < stems_.size(); ++i) ids[i] = static_cast<int>(i) + kFirstContent;
  return ids;
}

std::vector<TokenRef> preprocess_subtitle(const std::vector<std::string>& words,
                                          const Vocabulary& vocab, const PreprocessConfig& cfg) {
  const auto stemmer = make_stemmer(cfg.stemming);
  std::vector<TokenRef> out;
  out.reserve(words.size());
  for (const auto& word : words) {
    const std::string lower = to_lower(word);
    if (lower.empty()) continue;
    if (!cfg.keep_stop_words && vocab.stop_words().count(lower)) continue;
    const int id = vocab.id_of(stemmer->stem(lower));
    if (id < 0) continue;
    out.push_back(TokenRef{id, lower});
  }
  return out;
}

Vocabulary build_vocabulary(const Corpus& corpus, const PreprocessConfig& cfg,
                            const std::set<std::string>& stop_words) {
  if (corpus.clips.empty()) throw ConfigError("cannot build a vocabulary from an empty corpus");
  if (cfg.vocab_policy == PreprocessConfig::VocabPolicy::kTopFraction &&
      (cfg.top_fraction <= 0.0 || cfg.top_fraction > 1.0))
    throw ConfigError("top_fraction must lie in (0, 1]");

  const auto stemmer = make_stemmer(cfg.stemming);

  // Stems that any stop word maps to; excluded so no stop word resolves to an id.
  std::set<std::string> stopped_stems;
  if (!cfg.keep_stop_words)
    for (const auto& w : stop_words) stopped_stems.insert(stemmer->stem(w));

  auto admissible = [&](const std::string& raw, const std::string& stem) {
    if (cfg.keep_stop_words) return true;
    return !stop_words.count(raw) && !stopped_stems.count(stem);
  };

  // std::map keeps lexicographic order for deterministic tie-breaking.
  std::map<std::string, std::int64_t> subtitle_freq;
  std::set<std::string> annotated;
  for (const auto& clip : corpus.clips) {
    for (const auto& tok : clip.subtitle) {
      const std::string raw = to_lower(tok.raw);
      const std::string stem = stemmer->stem(raw);
      if (!stem.empty() && admissible(raw, stem)) ++subtitle_freq[stem];
    }
    for (const auto& ann : clip.annotations) {
      const std::string raw = to_lower(ann.raw);
      const std::string stem = stemmer->stem(raw);
      if (!stem.empty() && admissible(raw, stem)) annotated.insert(stem);
    }
  }

  std::vector<std::pair<std::string, std::int64_t>> entries;
  if (cfg.vocab_policy == PreprocessConfig::VocabPolicy::kFromAnnotations) {
    for (const auto& stem : annotated) {
      auto it = subtitle_freq.find(stem);
      entries.emplace_back(stem, it == subtitle_freq.end() ? 0 : it->second);
    }
  } else {
    entries.assign(subtitle_freq.begin(), subtitle_freq.end());
  }

  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  if (cfg.vocab_policy == PreprocessConfig::VocabPolicy::kTopFraction) {
    const auto keep = static_cast<std::size_t>(
        std::floor(cfg.top_fraction * static_cast<double>(entries.size()) + 1e-9));
    if (keep < entries.size()) entries.resize(keep);
  }

  if (entries.empty()) throw ConfigError("vocabulary construction produced no stems");
  return Vocabulary(std::move(entries), stop_words);
}

Corpus encode_corpus(const Corpus& corpus, const Vocabulary& vocab, const PreprocessConfig& cfg) {
  const auto stemmer = make_stemmer(cfg.stemming);
  Corpus out;
  out.meta = corpus.meta;
  out.clips.reserve(corpus.clips.size());
  for (const auto& clip : corpus.clips) {
    SubtitledClip enc = clip;
    std::vector<std::string> words;
    words.reserve(clip.subtitle.size());
    for (const auto& tok : clip.subtitle) words.push_back(tok.raw);
    enc.subtitle = preprocess_subtitle(words, vocab, cfg);

    enc.annotations.clear();
    for (const auto& ann : clip.annotations) {
      const int id = vocab.id_of(stemmer->stem(to_lower(ann.raw)));
      if (id < 0) continue;
      SparseAnnotation a = ann;
      a.token_id = id;
      enc.annotations.push_back(std::move(a));
    }

    if (enc.truth) {
      for (auto& sign : *enc.truth)
        sign.token_id = vocab.id_of(stemmer->stem(to_lower(sign.raw)));
    }
    out.clips.push_back(std::move(enc));
  }
  return out;
}

void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open vocabulary file for writing: " + path);
  for (int id : vocab.content_ids())
    out << vocab.stem_of(id) << '\t' << id << '\t' << vocab.freq_of(id) << '\n';
}

Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file: " + path);
  std::vector<std::pair<std::string, std::int64_t>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string stem;
    int id = 0;
    std::int64_t freq = 0;
    if (!(std::getline(ss, stem, '\t') && ss >> id && ss.ignore(1) && ss >> freq))
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed vocabulary line");
    const int expected = static_cast<int>(entries.size()) + Vocabulary::kFirstContent;
    if (id != expected)
      throw DataError(path + ":" + std::to_string(line_no) + ": non-dense vocabulary id");
    entries.emplace_back(stem, freq);
  }
  return Vocabulary(std::move(entries), {});
}

std::set<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word list: " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) words.insert(to_lower(line));
  }
  return words;
}

void save_stop_words(const std::set<std::string>& words, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open stop-word file for writing: " + path);
  for (const auto& w : words) out << w << '\n';
}

}  // namespace attnspot
