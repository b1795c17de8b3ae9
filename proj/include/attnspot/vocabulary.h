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

#ifndef ATTNSPOT_VOCABULARY_H_
#define ATTNSPOT_VOCABULARY_H_

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "attnspot/corpus.h"
#include "attnspot/stemmer.h"

namespace attnspot {

struct PreprocessConfig {
  enum class VocabPolicy { kFromAnnotations, kTopFraction };

  bool stemming = true;
  bool keep_stop_words = false;
  VocabPolicy vocab_policy = VocabPolicy::kFromAnnotations;
  double top_fraction = 1.0;  // used by kTopFraction; must lie in (0, 1]
};

// Stem <-> dense-id table with PAD/BOS/EOS specials at ids 0..2 and content
// stems from id 3 upward, ordered by frequency desc then stem asc.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kFirstContent = 3;

  Vocabulary() = default;
  // `ordered` must already be sorted; ids are assigned in order.
  Vocabulary(std::vector<std::pair<std::string, std::int64_t>> ordered,
             std::set<std::string> stop_words);

  int id_of(const std::string& stem) const;  // -1 when absent
  const std::string& stem_of(int id) const;
  std::int64_t freq_of(int id) const;

  int size() const { return static_cast<int>(stems_.size()) + kFirstContent; }
  int content_size() const { return static_cast<int>(stems_.size()); }
  bool is_special(int id) const { return id >= 0 && id < kFirstContent; }
  bool contains(const std::string& stem) const { return id_of(stem) >= 0; }

  const std::set<std::string>& stop_words() const { return stop_words_; }

  // All content ids, in id order.
  std::vector<int> content_ids() const;

  bool operator==(const Vocabulary& o) const {
    return stems_ == o.stems_ && freqs_ == o.freqs_ && stop_words_ == o.stop_words_;
  }

 private:
  std::vector<std::string> stems_;       // index = id - kFirstContent
  std::vector<std::int64_t> freqs_;
  std::unordered_map<std::string, int> stem_to_id_;
  std::set<std::string> stop_words_;
};

// Lowercase, stem (per cfg), drop stop words (per cfg), drop stems outside
// the vocabulary. Token order is preserved; raw keeps the lowercased word.
std::vector<TokenRef> preprocess_subtitle(const std::vector<std::string>& words,
                                          const Vocabulary& vocab, const PreprocessConfig& cfg);

// Builds the stem table from a corpus. Frequencies are counted over subtitle
// stems; membership follows cfg.vocab_policy. Stop-word stems are excluded
// unless cfg.keep_stop_words is set.
Vocabulary build_vocabulary(const Corpus& corpus, const PreprocessConfig& cfg,
                            const std::set<std::string>& stop_words);

// Re-encodes every clip against `vocab`: subtitle tokens are preprocessed,
// annotations with out-of-vocabulary stems are dropped, truth entries keep
// their raw form with token_id -1 when out of vocabulary.
Corpus encode_corpus(const Corpus& corpus, const Vocabulary& vocab, const PreprocessConfig& cfg);

void save_vocabulary(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocabulary(const std::string& path);

// One word per line; blank lines ignored.
std::set<std::string> load_word_list(const std::string& path);
inline std::set<std::string> load_stop_words(const std::string& path) {
  return load_word_list(path);
}
void save_stop_words(const std::set<std::string>& words, const std::string& path);

}  // namespace attnspot

#endif  // ATTNSPOT_VOCABULARY_H_
