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

#ifndef ATTNSPOT_STEMMER_H_
#define ATTNSPOT_STEMMER_H_

#include <memory>
#include <string>
#include <string_view>

namespace attnspot {

// Maps a lowercase word to its stem. Implementations must be deterministic
// and idempotent (stem(stem(w)) == stem(w)).
class Stemmer {
 public:
  virtual ~Stemmer() = default;
  virtual std::string stem(std::string_view word) const = 0;
};

// Porter's 1980 suffix-stripping algorithm, following the published ANSI C
// reference behaviour (including the step-2 "logi" -> "log" revision).
// Non-alphabetic input is returned unchanged.
class PorterStemmer : public Stemmer {
 public:
  std::string stem(std::string_view word) const override;
};

// Pass-through stemmer for "no stemming" configurations.
class IdentityStemmer : public Stemmer {
 public:
  std::string stem(std::string_view word) const override { return std::string(word); }
};

std::unique_ptr<Stemmer> make_stemmer(bool stemming_enabled);

}  // namespace attnspot

#endif  // ATTNSPOT_STEMMER_H_
