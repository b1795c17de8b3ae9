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

#ifndef ATTNSPOT_CORPUS_TRANSFORMS_H_
#define ATTNSPOT_CORPUS_TRANSFORMS_H_

#include <optional>
#include <string>
#include <vector>

#include "attnspot/corpus.h"

namespace attnspot {

// Keeps clips with at least one annotation of confidence strictly above
// min_conf; annotations outside the subtitle span are dropped first.
// Idempotent. An empty result is a warning, not an error.
Corpus select_training_subset(const Corpus& corpus, double min_conf);

enum class RealignMode { kNone, kShiftAffine, kPadSeconds };

struct RealignViolation {
  std::string clip_id;
  std::string message;
};

struct RealignResult {
  Corpus corpus;
  std::vector<RealignViolation> violations;
};

// kShiftAffine moves annotated subtitles so their midpoint matches the mean
// annotation time and stretches unannotated neighbours into the gaps between
// them (proportional to their original lengths), trimmed back from inactive
// frames. kPadSeconds widens every span by pad_seconds * fps on both sides,
// clipped to the clip's feature window.
RealignResult realign_subtitles(const Corpus& corpus, RealignMode mode, double pad_seconds = 0.0);

// Curriculum window: the first k annotations by time, padded by margin_frames
// on both sides. The subtitle keeps only tokens matching the chosen
// annotations (each consumed once). Returns nullopt when the clip has fewer
// than k annotations.
std::optional<SubtitledClip> trim_to_annotations(const SubtitledClip& clip, int k,
                                                 int margin_frames);

// Default curriculum margin: the longest sign plus one feature stride.
constexpr int kDefaultTrimMarginFrames = 13 + 4;

}  // namespace attnspot

#endif  // ATTNSPOT_CORPUS_TRANSFORMS_H_
