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

#ifndef ATTNSPOT_CORPUS_IO_H_
#define ATTNSPOT_CORPUS_IO_H_

#include <string>
#include <vector>

#include "attnspot/corpus.h"

namespace attnspot {

// JSON-lines container: one metadata header line, then one clip per line.
// Features are base64 little-endian float32; the round trip is exact.
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

// One mined or imported annotation. `token` is the stem surface form so
// stores stay meaningful across vocabulary rebuilds.
struct AnnotationRow {
  std::string clip_id;
  std::string token;
  FrameIndex frame_time = 0;
  double confidence = 0.0;
  AnnotationSource source = AnnotationSource::kAttention;

  bool operator==(const AnnotationRow&) const = default;
};

struct AnnotationStore {
  std::vector<AnnotationRow> rows;

  bool operator==(const AnnotationStore&) const = default;
};

// Canonical form: sorted by (clip_id, frame_time, token) with duplicate
// (clip_id, token, frame_time) rows collapsed keeping the highest confidence.
AnnotationStore canonicalize(const AnnotationStore& store);

// CSV with header `clip_id,token,frame_time,confidence,source`; rows are
// written in canonical form.
void write_annotation_store(const AnnotationStore& store, const std::string& path);
AnnotationStore read_annotation_store(const std::string& path);

}  // namespace attnspot

#endif  // ATTNSPOT_CORPUS_IO_H_
