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

#include "attnspot/corpus_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "attnspot/common.h"

namespace attnspot {
namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "attnspot-corpus-v1";

std::string encode_floats(const Eigen::MatrixXf& m) {
  // Row-major so (t, d) reads naturally from the stream.
  std::vector<float> buf(static_cast<std::size_t>(m.size()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      buf[static_cast<std::size_t>(r) * m.cols() + c] = m(r, c);
  return base64_encode(reinterpret_cast<const std::uint8_t*>(buf.data()),
                       buf.size() * sizeof(float));
}

Eigen::MatrixXf decode_floats(const std::string& b64, int rows, int cols) {
  const auto bytes = base64_decode(b64);
  if (bytes.size() != static_cast<std::size_t>(rows) * cols * sizeof(float))
    throw DataError("feature blob size does not match (t_enc, dim)");
  Eigen::MatrixXf m(rows, cols);
  const float* p = reinterpret_cast<const float*>(bytes.data());
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = p[static_cast<std::size_t>(r) * cols + c];
  return m;
}

json clip_to_json(const SubtitledClip& clip) {
  json j;
  j["id"] = clip.id;
  j["features"] = {{"t_enc", clip.features.t_enc()},
                   {"dim", clip.features.dim()},
                   {"stride", clip.features.stride},
                   {"origin_frame", clip.features.origin_frame},
                   {"data", encode_floats(clip.features.features)}};
  json subtitle = json::array();
  for (const auto& tok : clip.subtitle) subtitle.push_back({{"id", tok.token_id}, {"raw", tok.raw}});
  j["subtitle"] = std::move(subtitle);
  j["sub_span"] = {clip.sub_span.first, clip.sub_span.second};
  json anns = json::array();
  for (const auto& a : clip.annotations)
    anns.push_back({{"id", a.token_id},
                    {"raw", a.raw},
                    {"frame_time", a.frame_time},
                    {"confidence", a.confidence},
                    {"source", to_string(a.source)}});
  j["annotations"] = std::move(anns);
  if (!clip.activity_mask.empty())
    j["activity_mask"] = base64_encode(clip.activity_mask.data(), clip.activity_mask.size());
  if (clip.truth) {
    json truth = json::array();
    for (const auto& s : *clip.truth)
      truth.push_back({{"id", s.token_id},
                       {"raw", s.raw},
                       {"onset_frame", s.onset_frame},
                       {"duration_frames", s.duration_frames}});
    j["truth"] = std::move(truth);
  }
  return j;
}

SubtitledClip clip_from_json(const json& j, int feature_dim) {
  SubtitledClip clip;
  clip.id = j.at("id").get<std::string>();
  const auto& f = j.at("features");
  const int t_enc = f.at("t_enc").get<int>();
  const int dim = f.at("dim").get<int>();
  if (t_enc < 1 || dim < 1) throw DataError("features need t_enc >= 1 and dim >= 1");
  if (feature_dim > 0 && dim != feature_dim)
    throw DataError("clip feature dim disagrees with corpus metadata");
  clip.features.stride = f.at("stride").get<int>();
  clip.features.origin_frame = f.at("origin_frame").get<FrameIndex>();
  clip.features.features = decode_floats(f.at("data").get<std::string>(), t_enc, dim);
  if (!clip.features.features.allFinite()) throw DataError("non-finite feature values");

  for (const auto& t : j.at("subtitle"))
    clip.subtitle.push_back(TokenRef{t.at("id").get<int>(), t.at("raw").get<std::string>()});
  clip.sub_span = {j.at("sub_span").at(0).get<FrameIndex>(),
                   j.at("sub_span").at(1).get<FrameIndex>()};
  if (clip.sub_span.first >= clip.sub_span.second)
    throw DataError("sub_span start must precede its end");
  for (const auto& a : j.at("annotations")) {
    SparseAnnotation ann;
    ann.token_id = a.at("id").get<int>();
    ann.raw = a.at("raw").get<std::string>();
    ann.frame_time = a.at("frame_time").get<FrameIndex>();
    ann.confidence = a.at("confidence").get<double>();
    if (ann.confidence < 0.0 || ann.confidence > 1.0)
      throw DataError("annotation confidence outside [0, 1]");
    ann.source = annotation_source_from_string(a.at("source").get<std::string>());
    clip.annotations.push_back(std::move(ann));
  }
  if (j.contains("activity_mask"))
    clip.activity_mask = base64_decode(j.at("activity_mask").get<std::string>());
  if (j.contains("truth")) {
    std::vector<GroundTruthSign> truth;
    for (const auto& s : j.at("truth")) {
      GroundTruthSign sign;
      sign.token_id = s.at("id").get<int>();
      sign.raw = s.at("raw").get<std::string>();
      sign.onset_frame = s.at("onset_frame").get<FrameIndex>();
      sign.duration_frames = s.at("duration_frames").get<int>();
      if (sign.duration_frames < 1) throw DataError("truth sign duration must be >= 1");
      truth.push_back(std::move(sign));
    }
    clip.truth = std::move(truth);
  }
  return clip;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open corpus file for writing: " + path);
  json header;
  header["format"] = kFormatTag;
  header["fps"] = corpus.meta.fps;
  header["stride"] = corpus.meta.stride;
  header["feature_dim"] = corpus.meta.feature_dim;
  header["stop_words"] = corpus.meta.stop_words;
  out << header.dump() << '\n';
  for (const auto& clip : corpus.clips) out << clip_to_json(clip).dump() << '\n';
  if (!out) throw DataError("write failed: " + path);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  Corpus corpus;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      if (line_no == 1) {
        if (j.at("format").get<std::string>() != kFormatTag)
          throw DataError("unrecognised corpus format tag");
        corpus.meta.fps = j.at("fps").get<int>();
        corpus.meta.stride = j.at("stride").get<int>();
        corpus.meta.feature_dim = j.at("feature_dim").get<int>();
        corpus.meta.stop_words = j.at("stop_words").get<std::vector<std::string>>();
      } else {
        corpus.clips.push_back(clip_from_json(j, corpus.meta.feature_dim));
      }
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (line_no == 0) throw DataError(path + ":1: missing corpus header line");
  return corpus;
}

AnnotationStore canonicalize(const AnnotationStore& store) {
  AnnotationStore out = store;
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const AnnotationRow& a, const AnnotationRow& b) {
                     if (a.clip_id != b.clip_id) return a.clip_id < b.clip_id;
                     if (a.frame_time != b.frame_time) return a.frame_time < b.frame_time;
                     return a.token < b.token;
                   });
  std::vector<AnnotationRow> dedup;
  for (auto& row : out.rows) {
    if (!dedup.empty() && dedup.back().clip_id == row.clip_id &&
        dedup.back().token == row.token && dedup.back().frame_time == row.frame_time) {
      dedup.back().confidence = std::max(dedup.back().confidence, row.confidence);
    } else {
      dedup.push_back(std::move(row));
    }
  }
  out.rows = std::move(dedup);
  return out;
}

void write_annotation_store(const AnnotationStore& store, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open annotation store for writing: " + path);
  out << "clip_id,token,frame_time,confidence,source\n";
  for (const auto& row : canonicalize(store).rows)
    out << row.clip_id << ',' << row.token << ',' << row.frame_time << ','
        << format_double(row.confidence) << ',' << to_string(row.source) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

AnnotationStore read_annotation_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open annotation store: " + path);
  AnnotationStore store;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "clip_id,token,frame_time,confidence,source")
        throw DataError(path + ":1: unexpected annotation store header");
      continue;
    }
    std::istringstream ss(line);
    AnnotationRow row;
    std::string frame, conf, source;
    if (!(std::getline(ss, row.clip_id, ',') && std::getline(ss, row.token, ',') &&
          std::getline(ss, frame, ',') && std::getline(ss, conf, ',') &&
          std::getline(ss, source)))
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed annotation row");
    try {
      row.frame_time = std::stoll(frame);
      row.confidence = std::stod(conf);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed numeric field");
    }
    row.source = annotation_source_from_string(source);
    store.rows.push_back(std::move(row));
  }
  if (line_no == 0) throw DataError(path + ":1: missing annotation store header");
  return store;
}

}  // namespace attnspot
