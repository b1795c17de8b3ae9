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

#include "attnspot/corpus.h"

#include <algorithm>

#include "attnspot/common.h"

namespace attnspot {

int FeatureSequence::index_of_frame(FrameIndex t) const {
  FrameIndex j = (t - origin_frame) / stride;
  if (t < origin_frame) j = 0;
  return static_cast<int>(std::clamp<FrameIndex>(j, 0, t_enc() - 1));
}

bool FeatureSequence::operator==(const FeatureSequence& o) const {
  return stride == o.stride && origin_frame == o.origin_frame &&
         features.rows() == o.features.rows() && features.cols() == o.features.cols() &&
         features == o.features;
}

const char* to_string(AnnotationSource s) {
  switch (s) {
    case AnnotationSource::kMouthing:
      return "mouthing";
    case AnnotationSource::kDictionary:
      return "dictionary";
    case AnnotationSource::kAttention:
      return "attention";
    case AnnotationSource::kSynthetic:
      return "synthetic";
  }
  return "synthetic";
}

AnnotationSource annotation_source_from_string(const std::string& s) {
  if (s == "mouthing") return AnnotationSource::kMouthing;
  if (s == "dictionary") return AnnotationSource::kDictionary;
  if (s == "attention") return AnnotationSource::kAttention;
  if (s == "synthetic") return AnnotationSource::kSynthetic;
  throw DataError("unknown annotation source: " + s);
}

std::string SubtitledClip::programme_key() const {
  const auto pos = id.find("_c");
  return pos == std::string::npos ? id : id.substr(0, pos);
}

bool SubtitledClip::operator==(const SubtitledClip& o) const {
  return id == o.id && features == o.features && subtitle == o.subtitle &&
         sub_span == o.sub_span && annotations == o.annotations &&
         activity_mask == o.activity_mask && truth == o.truth;
}

std::pair<int, int> subtitle_feature_window(const SubtitledClip& clip) {
  const auto& fs = clip.features;
  if (clip.sub_span.first >= clip.sub_span.second || fs.t_enc() == 0) return {0, -1};
  const int first = fs.index_of_frame(clip.sub_span.first);
  const int last = fs.index_of_frame(clip.sub_span.second - 1);
  return {first, last};
}

FeatureSequence subtitle_window_features(const SubtitledClip& clip) {
  const auto [first, last] = subtitle_feature_window(clip);
  FeatureSequence out;
  out.stride = clip.features.stride;
  if (last < first) {
    out.features.resize(0, clip.features.dim());
    out.origin_frame = clip.features.origin_frame;
    return out;
  }
  out.features = clip.features.features.middleRows(first, last - first + 1);
  out.origin_frame = clip.features.frame_time(first);
  return out;
}

}  // namespace attnspot
