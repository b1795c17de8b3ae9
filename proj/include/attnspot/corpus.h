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

#ifndef ATTNSPOT_CORPUS_H_
#define ATTNSPOT_CORPUS_H_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace attnspot {

using FrameIndex = std::int64_t;

// Continuous feature stream standing in for sliding-window video features.
// Feature step j covers video frames [origin_frame + j*stride,
// origin_frame + (j+1)*stride).
struct FeatureSequence {
  Eigen::MatrixXf features;  // T_enc x D
  int stride = 4;
  FrameIndex origin_frame = 0;

  int t_enc() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
  FrameIndex frame_time(int j) const { return origin_frame + static_cast<FrameIndex>(j) * stride; }
  // Feature step containing video frame t, clamped to [0, t_enc).
  int index_of_frame(FrameIndex t) const;
  FrameIndex end_frame() const { return origin_frame + static_cast<FrameIndex>(t_enc()) * stride; }

  bool operator==(const FeatureSequence& o) const;
};

struct TokenRef {
  int token_id = -1;
  std::string raw;

  bool operator==(const TokenRef&) const = default;
};

enum class AnnotationSource { kMouthing, kDictionary, kAttention, kSynthetic };

const char* to_string(AnnotationSource s);
AnnotationSource annotation_source_from_string(const std::string& s);

struct SparseAnnotation {
  int token_id = -1;
  std::string raw;
  FrameIndex frame_time = 0;
  double confidence = 1.0;
  AnnotationSource source = AnnotationSource::kSynthetic;

  bool operator==(const SparseAnnotation&) const = default;
};

struct GroundTruthSign {
  int token_id = -1;
  std::string raw;
  FrameIndex onset_frame = 0;
  int duration_frames = 0;

  FrameIndex midpoint_frame() const { return onset_frame + duration_frames / 2; }
  bool operator==(const GroundTruthSign&) const = default;
};

struct SubtitledClip {
  std::string id;
  FeatureSequence features;
  std::vector<TokenRef> subtitle;
  std::pair<FrameIndex, FrameIndex> sub_span{0, 0};
  std::vector<SparseAnnotation> annotations;
  std::vector<std::uint8_t> activity_mask;  // per video frame of the feature window; empty = absent
  std::optional<std::vector<GroundTruthSign>> truth;

  // Programme grouping key; clips generated on a shared timeline share it.
  std::string programme_key() const;

  bool operator==(const SubtitledClip& o) const;
};

struct CorpusMeta {
  int fps = 25;
  int stride = 4;
  int feature_dim = 0;
  std::vector<std::string> stop_words;  // synthetic stop set used by the generator

  bool operator==(const CorpusMeta&) const = default;
};

struct Corpus {
  CorpusMeta meta;
  std::vector<SubtitledClip> clips;

  bool operator==(const Corpus& o) const { return meta == o.meta && clips == o.clips; }
};

// Encoder window covering the clip's sub_span: [first, last] feature steps,
// both clamped into the feature sequence. Returns {0, -1} for an empty span.
std::pair<int, int> subtitle_feature_window(const SubtitledClip& clip);

// Slice of the clip's features covering sub_span, with origin_frame adjusted
// so frame arithmetic stays valid.
FeatureSequence subtitle_window_features(const SubtitledClip& clip);

}  // namespace attnspot

#endif  // ATTNSPOT_CORPUS_H_
