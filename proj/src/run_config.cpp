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

#include "attnspot/run_config.h"

#include <cstdio>
#include <fstream>

#include "attnspot/common.h"

namespace attnspot {

using nlohmann::json;

AttnAggregation AggregationChoice::resolve(bool teacher_forced, int n_layers) const {
  if (!automatic) {
    if (explicit_agg.layers == AttnAggregation::Layers::kSingle &&
        explicit_agg.layer >= n_layers)
      throw ConfigError("aggregation layer index exceeds the model's layer count");
    return explicit_agg;
  }
  AttnAggregation agg;
  if (teacher_forced) {
    agg.layers = AttnAggregation::Layers::kSingle;
    agg.layer = 0;
  } else {
    agg.layers = AttnAggregation::Layers::kMeanAll;
  }
  return agg;
}

AggregationChoice parse_aggregation(const std::string& text) {
  AggregationChoice choice;
  if (text == "auto") return choice;
  choice.automatic = false;
  if (text == "mean") {
    choice.explicit_agg.layers = AttnAggregation::Layers::kMeanAll;
    return choice;
  }
  if (text.rfind("layer", 0) == 0) {
    choice.explicit_agg.layers = AttnAggregation::Layers::kSingle;
    try {
      choice.explicit_agg.layer = std::stoi(text.substr(5));
    } catch (const std::exception&) {
      throw ConfigError("bad aggregation spec: " + text);
    }
    return choice;
  }
  throw ConfigError("bad aggregation spec: " + text + " (want auto, mean, or layerN)");
}

json default_run_config_json() {
  return json{
      {"seed", 1},
      {"corpus",
       {{"n_clips", 100},
        {"holdout_clips", 0},
        {"vocab_size", 50},
        {"feature_dim", 64},
        {"noise",
         {{"drop_prob", 0.0},
          {"insert_prob", 0.0},
          {"reorder", false},
          {"offset_std_frames", 0.0}}},
        {"tokens_per_clip_min", 4},
        {"tokens_per_clip_max", 8},
        {"reveal_fraction", 0.3},
        {"stop_word_prob", 0.25},
        {"emission_noise_std", 1.0},
        {"clips_per_programme", 1},
        {"stride", 4},
        {"fps", 25},
        {"min_sign_frames", 7},
        {"max_sign_frames", 13},
        {"min_conf", 0.7},
        {"realign", "none"},
        {"realign_pad_seconds", 2.0},
        {"workers", 1}}},
      {"text",
       {{"stemming", true},
        {"keep_stop_words", false},
        {"vocab_policy", "from_annotations"},
        {"top_fraction", 1.0},
        {"stop_words_file", ""}}},
      {"model",
       {{"d_model", 512},
        {"n_heads", 2},
        {"n_layers", 2},
        {"feedforward_dim", 2048},
        {"dropout_prob", 0.1},
        {"max_enc_len", 512},
        {"max_dec_len", 32}}},
      {"train",
       {{"learning_rate", 1e-4},
        {"lr_decay_epochs", json::array()},
        {"lr_decay_factor", 0.1},
        {"batch_size", 32},
        {"epochs", 30},
        {"align_loss_weight", 0.0},
        {"align_loss_layer", "average"},
        {"align_sigma", 1.0},
        {"curriculum_stage_epochs", json::array()},
        {"trim_margin_frames", kDefaultTrimMarginFrames},
        {"grad_clip_norm", 0.0}}},
      {"decode", {{"strategy", "greedy"}, {"beam_width", 10}, {"aggregation", "auto"}}},
      {"mining",
       {{"strategy", "gd"},
        {"beam_width", 10},
        {"tf_threshold", 0.1},
        {"aggregation", "auto"},
        {"eval_vocab_file", ""},
        {"workers", 1}}},
      {"eval", {{"tolerance_feature_frames", 2}, {"min_eval_conf", 0.9}}},
      {"classify",
       {{"window_frames", 16},
        {"hidden", json::array({512, 256})},
        {"residual", true},
        {"epochs", 30},
        {"learning_rate", 1e-2},
        {"lr_decay_epochs", json::array({20, 25})},
        {"lr_decay_factor", 0.1},
        {"momentum", 0.9},
        {"batch_size", 256},
        {"seeds", json::array({1, 2, 3})}}},
  };
}

namespace {

bool numeric(const json& j) { return j.is_number_integer() || j.is_number_float(); }

void merge_checked(json& base, const json& user, const std::string& path) {
  if (!user.is_object())
    throw ConfigError("config section must be an object: " + (path.empty() ? "<root>" : path));
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string where = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key: " + where);
    json& slot = base[it.key()];
    const json& value = it.value();
    if (slot.is_object()) {
      merge_checked(slot, value, where);
    } else if (numeric(slot) && numeric(value)) {
      slot = value;
    } else if (slot.type() == value.type()) {
      slot = value;
    } else {
      throw ConfigError("config key " + where + " has the wrong type");
    }
  }
}

json parse_override_value(const std::string& text) {
  const json parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (!parsed.is_discarded()) return parsed;
  return json(text);  // bare string
}

void apply_override(json& user, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like section.key=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const json value = parse_override_value(assignment.substr(eq + 1));
  json* at = &user;
  std::size_t begin = 0;
  while (true) {
    const auto dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (key.empty()) throw ConfigError("bad override path: " + path);
    if (dot == std::string::npos) {
      (*at)[key] = value;
      return;
    }
    at = &(*at)[key];
    begin = dot + 1;
  }
}

std::vector<int> int_list(const json& j) {
  std::vector<int> out;
  for (const auto& v : j) out.push_back(v.get<int>());
  return out;
}

}  // namespace

RunConfig run_config_from_json(const json& user) {
  json merged = default_run_config_json();
  merge_checked(merged, user, "");

  RunConfig cfg;
  cfg.canonical = merged;
  cfg.seed = merged.at("seed").get<std::uint64_t>();

  const json& c = merged.at("corpus");
  cfg.corpus.n_clips = c.at("n_clips").get<int>();
  cfg.corpus_holdout_clips = c.at("holdout_clips").get<int>();
  cfg.corpus.vocab_size = c.at("vocab_size").get<int>();
  cfg.corpus.feature_dim = c.at("feature_dim").get<int>();
  cfg.corpus.noise.drop_prob = c.at("noise").at("drop_prob").get<double>();
  cfg.corpus.noise.insert_prob = c.at("noise").at("insert_prob").get<double>();
  cfg.corpus.noise.reorder = c.at("noise").at("reorder").get<bool>();
  cfg.corpus.noise.offset_std_frames = c.at("noise").at("offset_std_frames").get<double>();
  cfg.corpus.noise.seed = cfg.seed;
  cfg.corpus.tokens_per_clip_min = c.at("tokens_per_clip_min").get<int>();
  cfg.corpus.tokens_per_clip_max = c.at("tokens_per_clip_max").get<int>();
  cfg.corpus.reveal_fraction = c.at("reveal_fraction").get<double>();
  cfg.corpus.stop_word_prob = c.at("stop_word_prob").get<double>();
  cfg.corpus.emission_noise_std = c.at("emission_noise_std").get<double>();
  cfg.corpus.clips_per_programme = c.at("clips_per_programme").get<int>();
  cfg.corpus.stride = c.at("stride").get<int>();
  cfg.corpus.fps = c.at("fps").get<int>();
  cfg.corpus.min_sign_frames = c.at("min_sign_frames").get<int>();
  cfg.corpus.max_sign_frames = c.at("max_sign_frames").get<int>();
  cfg.corpus.workers = c.at("workers").get<int>();
  cfg.corpus_min_conf = c.at("min_conf").get<double>();
  {
    const std::string mode = c.at("realign").get<std::string>();
    if (mode == "none")
      cfg.realign = RealignMode::kNone;
    else if (mode == "shift_affine")
      cfg.realign = RealignMode::kShiftAffine;
    else if (mode == "pad_seconds")
      cfg.realign = RealignMode::kPadSeconds;
    else
      throw ConfigError("corpus.realign must be none, shift_affine, or pad_seconds");
  }
  cfg.realign_pad_seconds = c.at("realign_pad_seconds").get<double>();

  const json& t = merged.at("text");
  cfg.text.stemming = t.at("stemming").get<bool>();
  cfg.text.keep_stop_words = t.at("keep_stop_words").get<bool>();
  {
    const std::string policy = t.at("vocab_policy").get<std::string>();
    if (policy == "from_annotations")
      cfg.text.vocab_policy = PreprocessConfig::VocabPolicy::kFromAnnotations;
    else if (policy == "top_fraction")
      cfg.text.vocab_policy = PreprocessConfig::VocabPolicy::kTopFraction;
    else
      throw ConfigError("text.vocab_policy must be from_annotations or top_fraction");
  }
  cfg.text.top_fraction = t.at("top_fraction").get<double>();
  cfg.stop_words_file = t.at("stop_words_file").get<std::string>();

  const json& m = merged.at("model");
  cfg.model.d_model = m.at("d_model").get<int>();
  cfg.model.n_heads = m.at("n_heads").get<int>();
  cfg.model.n_layers = m.at("n_layers").get<int>();
  cfg.model.feedforward_dim = m.at("feedforward_dim").get<int>();
  cfg.model.dropout_prob = m.at("dropout_prob").get<double>();
  cfg.model.max_enc_len = m.at("max_enc_len").get<int>();
  cfg.model.max_dec_len = m.at("max_dec_len").get<int>();

  const json& tr = merged.at("train");
  cfg.train.lr.base = tr.at("learning_rate").get<double>();
  cfg.train.lr.decay_epochs = int_list(tr.at("lr_decay_epochs"));
  cfg.train.lr.factor = tr.at("lr_decay_factor").get<double>();
  cfg.train.batch_size = tr.at("batch_size").get<int>();
  cfg.train.epochs = tr.at("epochs").get<int>();
  cfg.train.align_loss_weight = tr.at("align_loss_weight").get<double>();
  {
    const std::string layer = tr.at("align_loss_layer").get<std::string>();
    if (layer == "average") {
      cfg.train.align_layer.average_layers = true;
    } else if (layer.rfind("layer", 0) == 0) {
      cfg.train.align_layer.average_layers = false;
      cfg.train.align_layer.layer = std::stoi(layer.substr(5));
    } else {
      throw ConfigError("train.align_loss_layer must be average or layerN");
    }
  }
  cfg.train.align_sigma = tr.at("align_sigma").get<double>();
  cfg.train.curriculum_stage_epochs = int_list(tr.at("curriculum_stage_epochs"));
  cfg.train.trim_margin_frames = tr.at("trim_margin_frames").get<int>();
  cfg.train.grad_clip_norm = tr.at("grad_clip_norm").get<double>();

  const json& d = merged.at("decode");
  cfg.decode_strategy = d.at("strategy").get<std::string>();
  cfg.decode_beam_width = d.at("beam_width").get<int>();
  cfg.decode_agg = parse_aggregation(d.at("aggregation").get<std::string>());

  const json& mi = merged.at("mining");
  cfg.mining.kind = mining_kind_from_string(mi.at("strategy").get<std::string>());
  cfg.mining.beam_width = mi.at("beam_width").get<int>();
  cfg.mining.tf_threshold = mi.at("tf_threshold").get<double>();
  cfg.mining_agg = parse_aggregation(mi.at("aggregation").get<std::string>());
  cfg.mining_eval_vocab_file = mi.at("eval_vocab_file").get<std::string>();
  cfg.mining_workers = mi.at("workers").get<int>();

  const json& e = merged.at("eval");
  cfg.eval_tolerance_feature_frames = e.at("tolerance_feature_frames").get<int>();
  cfg.eval_min_conf = e.at("min_eval_conf").get<double>();

  const json& cl = merged.at("classify");
  cfg.classify_window_frames = cl.at("window_frames").get<int>();
  cfg.classify.hidden = int_list(cl.at("hidden"));
  cfg.classify.residual = cl.at("residual").get<bool>();
  cfg.classify.epochs = cl.at("epochs").get<int>();
  cfg.classify.lr.base = cl.at("learning_rate").get<double>();
  cfg.classify.lr.decay_epochs = int_list(cl.at("lr_decay_epochs"));
  cfg.classify.lr.factor = cl.at("lr_decay_factor").get<double>();
  cfg.classify.momentum = cl.at("momentum").get<double>();
  cfg.classify.batch_size = cl.at("batch_size").get<int>();
  cfg.classify_seeds.clear();
  for (const auto& s : cl.at("seeds")) cfg.classify_seeds.push_back(s.get<std::uint64_t>());

  return cfg;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  json user = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
      in >> user;
    } catch (const json::exception& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  for (const auto& assignment : overrides) apply_override(user, assignment);
  return run_config_from_json(user);
}

std::string config_hash(const json& canonical) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical.dump())));
  return buf;
}

void write_manifest(const std::string& output_path, const std::string& subcommand,
                    const RunConfig& cfg, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, double wall_seconds) {
  json j;
  j["subcommand"] = subcommand;
  j["config_hash"] = config_hash(cfg.canonical);
  j["seed"] = cfg.seed;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["wall_time_s"] = wall_seconds;
  j["config"] = cfg.canonical;
  const std::string path = output_path + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw DataError("cannot open manifest for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace attnspot
