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

#include "attnspot/corpus_transforms.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <set>

#include "attnspot/common.h"

namespace attnspot {

Corpus select_training_subset(const Corpus& corpus, double min_conf) {
  if (min_conf < 0.0 || min_conf > 1.0)
    throw ConfigError("min_conf must lie in [0, 1]");

  Corpus out;
  out.meta = corpus.meta;
  for (const auto& clip : corpus.clips) {
    std::vector<SparseAnnotation> in_span;
    for (const auto& ann : clip.annotations)
      if (ann.frame_time >= clip.sub_span.first && ann.frame_time <= clip.sub_span.second)
        in_span.push_back(ann);
    const bool keep = std::any_of(in_span.begin(), in_span.end(),
                                  [&](const SparseAnnotation& a) { return a.confidence > min_conf; });
    if (!keep) continue;
    SubtitledClip kept = clip;
    kept.annotations = std::move(in_span);
    out.clips.push_back(std::move(kept));
  }
  if (out.clips.empty())
    std::cerr << "warning: training subset is empty at min_conf=" << min_conf << "\n";
  return out;
}

namespace {

FrameIndex span_len(const std::pair<FrameIndex, FrameIndex>& s) { return s.second - s.first; }

bool has_annotations(const SubtitledClip& c) { return !c.annotations.empty(); }

// Shrink [start, end) until both ends sit on active frames of the clip's
// window; frames outside the window count as inactive.
std::pair<FrameIndex, FrameIndex> trim_to_active(const SubtitledClip& clip, FrameIndex start,
                                                 FrameIndex end) {
  const FrameIndex w0 = clip.features.origin_frame;
  const FrameIndex w1 = clip.features.end_frame();
  start = std::max(start, w0);
  end = std::min(end, w1);
  auto active = [&](FrameIndex f) {
    const auto idx = static_cast<std::size_t>(f - w0);
    return idx < clip.activity_mask.size() && clip.activity_mask[idx] != 0;
  };
  while (start < end && !active(start)) ++start;
  while (end > start && !active(end - 1)) --end;
  return {start, end};
}

void realign_programme(std::vector<SubtitledClip*>& clips, std::vector<RealignViolation>* out) {
  if (std::none_of(clips.begin(), clips.end(),
                   [](const SubtitledClip* c) { return has_annotations(*c); }))
    return;  // nothing to anchor on; spans left untouched

  std::sort(clips.begin(), clips.end(), [](const SubtitledClip* a, const SubtitledClip* b) {
    return a->sub_span.first < b->sub_span.first;
  });

  // Pass 1: shift annotated spans onto their mean annotation time.
  for (SubtitledClip* clip : clips) {
    if (!has_annotations(*clip)) continue;
    double mean = 0.0;
    for (const auto& ann : clip->annotations) mean += static_cast<double>(ann.frame_time);
    mean /= static_cast<double>(clip->annotations.size());
    const double midpoint =
        (static_cast<double>(clip->sub_span.first) + static_cast<double>(clip->sub_span.second)) /
        2.0;
    const FrameIndex shift = std::llround(mean - midpoint);
    clip->sub_span.first += shift;
    clip->sub_span.second += shift;
  }

  // Pass 2: stretch each run of unannotated spans into the gap between its
  // annotated (or programme-boundary) anchors, proportional to span lengths.
  std::size_t i = 0;
  while (i < clips.size()) {
    if (has_annotations(*clips[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < clips.size() && !has_annotations(*clips[j])) ++j;

    const FrameIndex gap_start =
        i == 0 ? clips.front()->features.origin_frame : clips[i - 1]->sub_span.second;
    const FrameIndex gap_end =
        j == clips.size() ? clips.back()->features.end_frame() : clips[j]->sub_span.first;

    FrameIndex total = 0;
    for (std::size_t k = i; k < j; ++k) total += std::max<FrameIndex>(1, span_len(clips[k]->sub_span));
    const double scale =
        total > 0 ? static_cast<double>(std::max<FrameIndex>(0, gap_end - gap_start)) /
                        static_cast<double>(total)
                  : 0.0;

    double cursor = static_cast<double>(gap_start);
    for (std::size_t k = i; k < j; ++k) {
      const auto len = static_cast<double>(std::max<FrameIndex>(1, span_len(clips[k]->sub_span)));
      FrameIndex s = std::llround(cursor);
      cursor += len * scale;
      FrameIndex e = std::llround(cursor);
      if (e <= s) e = s + 1;
      auto trimmed = trim_to_active(*clips[k], s, e);
      if (trimmed.first >= trimmed.second) {
        out->push_back({clips[k]->id, "no active frames available for realigned span"});
        trimmed = {s, e};  // keep the untrimmed placement rather than an empty span
      }
      clips[k]->sub_span = trimmed;
    }
    i = j;
  }

  // Pass 3: overlaps are reported and clamped so neighbours never intersect.
  for (std::size_t k = 1; k < clips.size(); ++k) {
    auto& prev = clips[k - 1]->sub_span;
    auto& cur = clips[k]->sub_span;
    if (cur.first < prev.second) {
      out->push_back({clips[k]->id, "realigned span overlaps its predecessor"});
      cur.first = prev.second;
      if (cur.second <= cur.first) cur.second = cur.first + 1;
    }
  }
}

}  // namespace

RealignResult realign_subtitles(const Corpus& corpus, RealignMode mode, double pad_seconds) {
  RealignResult result;
  result.corpus = corpus;
  if (mode == RealignMode::kNone) return result;

  if (mode == RealignMode::kPadSeconds) {
    const auto pad = static_cast<FrameIndex>(std::llround(pad_seconds * corpus.meta.fps));
    for (auto& clip : result.corpus.clips) {
      clip.sub_span.first = std::max(clip.sub_span.first - pad, clip.features.origin_frame);
      clip.sub_span.second = std::min(clip.sub_span.second + pad, clip.features.end_frame());
    }
    return result;
  }

  for (const auto& clip : result.corpus.clips)
    if (clip.activity_mask.empty())
      throw ConfigError("shift_affine realignment requires an activity mask on every clip");
  if (std::none_of(result.corpus.clips.begin(), result.corpus.clips.end(),
                   [](const SubtitledClip& c) { return has_annotations(c); }))
    throw ConfigError("shift_affine realignment requires annotations");

  std::map<std::string, std::vector<SubtitledClip*>> programmes;
  for (auto& clip : result.corpus.clips) programmes[clip.programme_key()].push_back(&clip);
  for (auto& [key, clips] : programmes) realign_programme(clips, &result.violations);
  return result;
}

std::optional<SubtitledClip> trim_to_annotations(const SubtitledClip& clip, int k,
                                                 int margin_frames) {
  if (k < 1) throw ConfigError("trim_to_annotations needs k >= 1");
  if (static_cast<int>(clip.annotations.size()) < k) return std::nullopt;

  std::vector<SparseAnnotation> chosen = clip.annotations;
  std::stable_sort(chosen.begin(), chosen.end(),
                   [](const SparseAnnotation& a, const SparseAnnotation& b) {
                     return a.frame_time < b.frame_time;
                   });
  chosen.resize(static_cast<std::size_t>(k));

  FrameIndex lo = chosen.front().frame_time, hi = chosen.front().frame_time;
  for (const auto& ann : chosen) {
    lo = std::min(lo, ann.frame_time);
    hi = std::max(hi, ann.frame_time);
  }
  const FrameIndex want_start = lo - margin_frames;
  const FrameIndex want_end = hi + margin_frames;

  const auto& fs = clip.features;
  const int first = fs.index_of_frame(want_start);
  const int last = fs.index_of_frame(want_end - 1);

  SubtitledClip out;
  out.id = clip.id;
  out.features.stride = fs.stride;
  out.features.origin_frame = fs.frame_time(first);
  out.features.features = fs.features.middleRows(first, last - first + 1);
  out.sub_span = {std::max(want_start, fs.origin_frame), std::min(want_end, fs.end_frame())};

  // Subtitle keeps tokens matching the chosen annotations, each consumed once.
  std::multiset<int> wanted;
  for (const auto& ann : chosen) wanted.insert(ann.token_id);
  for (const auto& tok : clip.subtitle) {
    auto it = wanted.find(tok.token_id);
    if (it == wanted.end()) continue;
    wanted.erase(it);
    out.subtitle.push_back(tok);
  }

  out.annotations = std::move(chosen);

  if (!clip.activity_mask.empty()) {
    const auto begin = static_cast<std::size_t>(out.features.origin_frame - fs.origin_frame);
    const auto len = static_cast<std::size_t>(out.features.end_frame() - out.features.origin_frame);
    out.activity_mask.assign(len, 0);
    for (std::size_t f = 0; f < len && begin + f < clip.activity_mask.size(); ++f)
      out.activity_mask[f] = clip.activity_mask[begin + f];
  }

  if (clip.truth) {
    std::vector<GroundTruthSign> kept;
    for (const auto& sign : *clip.truth)
      if (sign.midpoint_frame() >= out.features.origin_frame &&
          sign.midpoint_frame() < out.features.end_frame())
        kept.push_back(sign);
    out.truth = std::move(kept);
  }
  return out;
}

}  // namespace attnspot
