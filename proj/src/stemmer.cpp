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

#include "attnspot/stemmer.h"

#include <cstring>

namespace attnspot {
namespace {

// 'y' counts as a consonant at position 0 and after a vowel.
bool consonant(const std::string& w, std::size_t i) {
  switch (w[i]) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return false;
    case 'y':
      return i == 0 ? true : !consonant(w, i - 1);
    default:
      return true;
  }
}

// Number of vowel-consonant sequences in w[0, n); the m of [C](VC)^m[V].
int measure(const std::string& w, std::size_t n) {
  int m = 0;
  std::size_t i = 0;
  while (i < n && consonant(w, i)) ++i;
  while (true) {
    while (i < n && !consonant(w, i)) ++i;
    if (i >= n) return m;
    ++m;
    while (i < n && consonant(w, i)) ++i;
    if (i >= n) return m;
  }
}

bool vowel_in(const std::string& w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!consonant(w, i)) return true;
  return false;
}

bool double_consonant_at(const std::string& w, std::size_t i) {
  return i >= 1 && w[i] == w[i - 1] && consonant(w, i);
}

// consonant-vowel-consonant ending at i, last consonant not w/x/y.
bool cvc_at(const std::string& w, std::size_t i) {
  if (i < 2) return false;
  if (!consonant(w, i) || consonant(w, i - 1) || !consonant(w, i - 2)) return false;
  const char c = w[i];
  return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, const char* suffix) {
  const std::size_t n = std::strlen(suffix);
  return w.size() >= n && w.compare(w.size() - n, n, suffix) == 0;
}

struct Rule {
  const char* suffix;
  const char* repl;
};

// First matching suffix ends the step even when the measure condition blocks
// the replacement.
void apply_first(std::string& w, const Rule* rules, std::size_t n_rules, int min_measure) {
  for (std::size_t r = 0; r < n_rules; ++r) {
    if (!ends_with(w, rules[r].suffix)) continue;
    const std::size_t stem = w.size() - std::strlen(rules[r].suffix);
    if (measure(w, stem) > min_measure) w = w.substr(0, stem) + rules[r].repl;
    return;
  }
}

void step1a(std::string& w) {
  if (w.back() != 's') return;
  if (ends_with(w, "sses")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "ies")) {
    w.resize(w.size() - 3);
    w += 'i';
  } else if (!ends_with(w, "ss")) {
    w.resize(w.size() - 1);
  }
}

void step1b(std::string& w) {
  if (ends_with(w, "eed")) {
    if (measure(w, w.size() - 3) > 0) w.resize(w.size() - 1);
    return;
  }
  std::size_t stem = 0;
  if (ends_with(w, "ed") && vowel_in(w, w.size() - 2)) {
    stem = w.size() - 2;
  } else if (ends_with(w, "ing") && vowel_in(w, w.size() - 3)) {
    stem = w.size() - 3;
  } else {
    return;
  }
  w.resize(stem);
  if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
    w += 'e';
  } else if (double_consonant_at(w, w.size() - 1)) {
    const char c = w.back();
    if (c != 'l' && c != 's' && c != 'z') w.resize(w.size() - 1);
  } else if (measure(w, w.size()) == 1 && cvc_at(w, w.size() - 1)) {
    w += 'e';
  }
}

void step1c(std::string& w) {
  if (w.back() == 'y' && vowel_in(w, w.size() - 1)) w.back() = 'i';
}

// Nested suffix families stay longest-first (ational/tional, ization/ation).
const Rule kStep2[] = {
    {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
    {"izer", "ize"},    {"bli", "ble"},     {"alli", "al"},     {"entli", "ent"},
    {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
    {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
    {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
    {"logi", "log"},
};

const Rule kStep3[] = {
    {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
    {"ical", "ic"},  {"ful", ""},   {"ness", ""},
};

const Rule kStep4[] = {
    {"al", ""},  {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},  {"able", ""},
    {"ible", ""}, {"ant", ""}, {"ement", ""}, {"ment", ""}, {"ent", ""}, {"ou", ""},
    {"ism", ""}, {"ate", ""}, {"iti", ""},  {"ous", ""}, {"ive", ""}, {"ize", ""},
};

void step4(std::string& w) {
  // "ion" needs a stem ending in s or t and would otherwise shadow nothing,
  // so it is handled before the plain table.
  if (ends_with(w, "ion")) {
    const std::size_t stem = w.size() - 3;
    if (stem >= 1 && (w[stem - 1] == 's' || w[stem - 1] == 't')) {
      if (measure(w, stem) > 1) w.resize(stem);
      return;
    }
  }
  apply_first(w, kStep4, sizeof(kStep4) / sizeof(kStep4[0]), 1);
}

void step5(std::string& w) {
  if (w.back() == 'e') {
    const int m = measure(w, w.size());
    if (m > 1 || (m == 1 && !cvc_at(w, w.size() - 2))) w.resize(w.size() - 1);
  }
  if (w.back() == 'l' && double_consonant_at(w, w.size() - 1) && measure(w, w.size()) > 1)
    w.resize(w.size() - 1);
}

}  // namespace

std::string PorterStemmer::stem(std::string_view word) const {
  if (word.size() <= 2) return std::string(word);
  for (char c : word)
    if (c < 'a' || c > 'z') return std::string(word);
  std::string w(word);
  step1a(w);
  step1b(w);
  step1c(w);
  apply_first(w, kStep2, sizeof(kStep2) / sizeof(kStep2[0]), 0);
  apply_first(w, kStep3, sizeof(kStep3) / sizeof(kStep3[0]), 0);
  step4(w);
  step5(w);
  return w;
}

std::unique_ptr<Stemmer> make_stemmer(bool stemming_enabled) {
  if (stemming_enabled) return std::make_unique<PorterStemmer>();
  return std::make_unique<IdentityStemmer>();
}

}  // namespace attnspot
