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

#include "commands.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "attnspot/run_config.h"

namespace attnspot {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path, "JSON run configuration");
  cmd->add_option("--set", opts->overrides, "override a config leaf, e.g. train.epochs=5");
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::set<std::string> resolve_stop_words(const RunConfig& cfg, const Corpus& corpus) {
  if (!cfg.stop_words_file.empty()) return load_word_list(cfg.stop_words_file);
  return {corpus.meta.stop_words.begin(), corpus.meta.stop_words.end()};
}

Corpus prepare_training_corpus(const RunConfig& cfg, const Corpus& raw, const Vocabulary& vocab) {
  Corpus working = raw;
  if (cfg.realign != RealignMode::kNone) {
    auto realigned = realign_subtitles(working, cfg.realign, cfg.realign_pad_seconds);
    if (!realigned.violations.empty())
      std::cerr << "warning: " << realigned.violations.size()
                << " realignment constraint violations\n";
    working = std::move(realigned.corpus);
  }
  Corpus encoded = encode_corpus(working, vocab, cfg.text);
  return select_training_subset(encoded, cfg.corpus_min_conf);
}

ModelConfig model_config_for(const RunConfig& cfg, const Vocabulary& vocab,
                             const Corpus& corpus) {
  ModelConfig mc = cfg.model;
  mc.vocab_size = vocab.size();
  mc.feature_dim = corpus.meta.feature_dim;
  return mc;
}

std::set<int> eval_vocab_ids(const RunConfig& cfg, const Vocabulary& vocab) {
  std::set<int> ids;
  if (cfg.mining_eval_vocab_file.empty()) return ids;  // empty set = full vocabulary
  for (const auto& stem : load_word_list(cfg.mining_eval_vocab_file)) {
    const int id = vocab.id_of(stem);
    if (id >= 0) ids.insert(id);
  }
  return ids;
}

// Timed ground truth for evaluation: synthetic truth when present, otherwise
// high-confidence annotations, both mapped into subtitle-window coordinates.
std::vector<std::pair<int, int>> timed_tokens(const SubtitledClip& clip,
                                              const FeatureSequence& window,
                                              double min_eval_conf) {
  std::vector<std::pair<int, int>> timed;
  if (clip.truth) {
    for (const auto& sign : *clip.truth)
      if (sign.token_id >= 0)
        timed.emplace_back(sign.token_id, window.index_of_frame(sign.midpoint_frame()));
  } else {
    for (const auto& ann : clip.annotations)
      if (ann.confidence > min_eval_conf)
        timed.emplace_back(ann.token_id, window.index_of_frame(ann.frame_time));
  }
  return timed;
}

ParamStore load_transformer(const std::string& path, ModelConfig* cfg_out) {
  auto ck = load_checkpoint(path);
  if (ck.kind != "transformer") throw DataError(path + ": not a transformer checkpoint");
  *cfg_out = model_config_from_json(ck.config);
  return std::move(ck.params);
}

// --- subcommand bodies -------------------------------------------------------

int cmd_gen_corpus(const CommonOpts& common, const std::string& out_path,
                   std::string holdout_path) {
  Timer timer;
  RunConfig cfg = load_run_config(common.config_path, common.overrides);
  Corpus corpus = generate_corpus(cfg.corpus, cfg.seed);

  std::vector<std::string> outputs{out_path};
  if (cfg.corpus_holdout_clips > 0) {
    if (cfg.corpus_holdout_clips >= cfg.corpus.n_clips)
      throw ConfigError("holdout_clips must be smaller than n_clips");
    if (holdout_path.empty()) holdout_path = out_path + ".holdout.jsonl";
    Corpus holdout;
    holdout.meta = corpus.meta;
    const std::size_t split =
        corpus.clips.size() - static_cast<std::size_t>(cfg.corpus_holdout_clips);
    holdout.clips.assign(corpus.clips.begin() + static_cast<std::ptrdiff_t>(split),
                         corpus.clips.end());
    corpus.clips.resize(split);
    save_corpus(holdout, holdout_path);
    outputs.push_back(holdout_path);
  }
  save_corpus(corpus, out_path);
  write_manifest(out_path, "gen-corpus", cfg, {}, outputs, timer.seconds());
  std::cerr << "wrote " << corpus.clips.size() << " clips to " << out_path << "\n";
  return 0;
}

int cmd_build_vocab(const CommonOpts& common, const std::string& corpus_path,
                    const std::string& out_path) {
  Timer timer;
  RunConfig cfg = load_run_config(common.config_path, common.overrides);
  const Corpus corpus = load_corpus(corpus_path);
  const auto stops = resolve_stop_words(cfg, corpus);
  const Vocabulary vocab = build_vocabulary(corpus, cfg.text, stops);
  save_vocabulary(vocab, out_path);
  write_manifest(out_path, "build-vocab", cfg, {corpus_path}, {out_path}, timer.seconds());
  std::cerr << "vocabulary of " << vocab.content_size() << " stems -> " << out_path << "\n";
  return 0;
}

int cmd_train(const CommonOpts& common, const std::string& corpus_path,
              const std::string& vocab_path, const std::string& out_path, std::string log_path) {
  Timer timer;
  RunConfig cfg = load_run_config(common.config_path, common.overrides);
  const Corpus raw = load_corpus(corpus_path);
  const Vocabulary vocab = load_vocabulary(vocab_path);
  const Corpus training = prepare_training_corpus(cfg, raw, vocab);
  if (training.clips.empty()) throw DataError("no training clips after subset selection");

  const ModelConfig mc = model_config_for(cfg, vocab, raw);
  Transformer model(mc);
  if (log_path.empty()) log_path = out_path + ".log.csv";
  try {
    auto trained = train_transformer(model, training, cfg.train, cfg.seed);
    save_checkpoint(out_path, "transformer", model_config_to_json(mc), trained.params);
    write_train_log(trained.log, log_path);
  } catch (const TrainAbort& abort) {
    const std::string snap_path = out_path + ".nan_snapshot.json";
    std::ofstream snap(snap_path);
    snap << abort.snapshot.dump(2) << '\n';
    std::cerr << "training aborted: " << abort.what() << " (snapshot: " << snap_path << ")\n";
    throw DataError(abort.what());
  }
  write_manifest(out_path, "train", cfg, {corpus_path, vocab_path}, {out_path, log_path},
                 timer.seconds());
  std::cerr << "checkpoint -> " << out_path << "\n";
  return 0;
}

int cmd_decode(const CommonOpts& common, const std::string& corpus_path,
               const std::string& vocab_path, const std::string& model_path,
               const std::string& out_path) {
  Timer timer;
  RunConfig cfg = load_run_config(common.config_path, common.overrides);
  const Corpus raw = load_corpus(corpus_path);
  const Vocabulary vocab = load_vocabulary(vocab_path);
  ModelConfig mc;
  const ParamStore params = load_transformer(model_path, &mc);
  Transformer model(mc);
  const Corpus corpus = encode_corpus(raw, vocab, cfg.text);

  const bool tf = cfg.decode_strategy == "tf";
  const AttnAggregation agg = cfg.decode_agg.resolve(tf, mc.n_layers);

  std::ofstream out(out_path);
  if (!out) throw DataError("cannot open decode dump for writing: " + out_path);
  for (const auto& clip : corpus.clips) {
    const FeatureSequence window = subtitle_window_features(clip);
    if (window.t_enc() < 1 || window.t_enc() > mc.max_enc_len) continue;
    const Mat feats = window.features.cast<double>();
    if (cfg.decode_strategy == "greedy") {
      append_decode_dump(out, clip.id, greedy_decode(model, params, feats), vocab, agg);
    } else if (cfg.decode_strategy == "beam") {
      for (const auto& r : beam_decode(model, params, feats, cfg.decode_beam_width))
        append_decode_dump(out, clip.id, r, vocab, agg);
    } else if (tf) {
      if (clip.subtitle.empty()) continue;
      std::vector<int> reference;
      for (const auto& t : clip.subtitle) reference.push_back(t.token_id);
      append_decode_dump(out, clip.id, teacher_forced_decode(model, params, feats, reference),
                         vocab, agg);
    } else {
      throw ConfigError("decode.strategy must be greedy, beam, or tf");
    }
  }
  write_manifest(out_path, "decode", cfg, {corpus_path, vocab_path, model_path}, {out_path},
                 timer.seconds());
  return 0;
}

int cmd_mine(const CommonOpts& common, const std::string& corpus_path,
             const std::string& vocab_path, const std::string& model_path,
             const std::string& out_path, std::string stats_path) {
  Timer timer;
  RunConfig cfg = load_run_config(common.config_path, common.overrides);
  const Corpus raw = load_corpus(corpus_path);
  const Vocabulary vocab = load_vocabulary(vocab_path);
  ModelConfig mc;
  const ParamStore params = load_transformer(model_path, &mc);
  Transformer model(mc);
  const Corpus corpus = encode_corpus(raw, vocab, cfg.text);

  const bool tf = cfg.mining.kind == MiningStrategy::Kind::kTfThreshold ||
                  cfg.mining.kind == MiningStrategy::Kind::kTfPrediction;
  const AttnAggregation agg = cfg.mining_agg.resolve(tf, mc.n_layers);
  auto mined = mine_corpus(model, params, corpus, cfg.mining, agg, vocab,
                           eval_vocab_ids(cfg, vocab), cfg.mining_workers);

  write_annotation_store(mined.store, out_path);
  if (stats_path.empty()) stats_path = out_path + ".stats.json";
  {
    json stats = yield_stats_to_json(mined.stats);
    stats["strategy"] = to_string(cfg.mining.kind);
    std::ofstream s(stats_path);
    if (!s) throw DataError("cannot open stats file for writing: " + stats_path);
    s << stats.dump(2) << '\n';
  }
  write_manifest(out_path, "mine", cfg, {corpus_path, vocab_path, model_path},
                 {out_path, stats_path}, timer.seconds());
  std::cerr << "mined " << mined.stats.ann_full_vocab << " annotations ("
            << mined.stats.subtitles_newly_annotated << " newly covered subtitles)\n";
  return 0;
}

int cmd_eval_loc(const CommonOpts& common, const std::string& corpus_path,
                 const std::string& vocab_path, const std::string& model_path,
                 const std::string& out_path) {
  Timer timer;
  RunConfig cfg = load_run_config(common.config_path, common.overrides);
  const Corpus raw = load_corpus(corpus_path);
  const Vocabulary vocab = load_vocabulary(vocab_path);
  ModelConfig mc;
  const ParamStore params = load_transformer(model_path, &mc);
  Transformer model(mc);
  const Corpus corpus = encode_corpus(raw, vocab, cfg.text);

  // Aggregation grid: mean over layers plus every single layer, for both
  // greedy and teacher-forced attention.
  std::vector<std::pair<std::string, AttnAggregation>> grid;
  grid.emplace_back("mean", AttnAggregation{AttnAggregation::Layers::kMeanAll, 0});
  for (int l = 0; l < mc.n_layers; ++l)
    grid.emplace_back("layer" + std::to_string(l),
                      AttnAggregation{AttnAggregation::Layers::kSingle, l});

  std::map<std::string, std::vector<ClipEvalInput>> gd_inputs, tf_inputs;
  int evaluated = 0;
  for (const auto& clip : corpus.clips) {
    if (clip.subtitle.empty()) continue;
    const FeatureSequence window = subtitle_window_features(clip);
    if (window.t_enc() < 1 || window.t_enc() > mc.max_enc_len) continue;
    const Mat feats = window.features.cast<double>();
    std::vector<int> reference;
    for (const auto& t : clip.subtitle) reference.push_back(t.token_id);
    const auto timed = timed_tokens(clip, window, cfg.eval_min_conf);
    const SpotContext ctx{clip.id, window.origin_frame, window.stride};
    ++evaluated;

    const auto gd = greedy_decode(model, params, feats);
    const auto tf = teacher_forced_decode(model, params, feats, reference);
    for (const auto& [name, agg] : grid) {
      ClipEvalInput gd_in;
      gd_in.reference = reference;
      gd_in.predictions = spot_from_decode(gd, reference, agg, /*filter=*/true, ctx, vocab);
      gd_in.timed = timed;
      gd_inputs[name].push_back(std::move(gd_in));

      ClipEvalInput tf_in;
      tf_in.reference = reference;
      tf_in.predictions = spot_from_decode(tf, reference, agg, /*filter=*/false, ctx, vocab);
      tf_in.timed = timed;
      tf_inputs[name].push_back(std::move(tf_in));
    }
  }

  json report;
  report["n_clips"] = evaluated;
  report["tolerance_feature_frames"] = cfg.eval_tolerance_feature_frames;
  for (const auto& [name, inputs] : gd_inputs)
    report["gd"][name] = loc_report_to_json(
        eval_localisation(inputs, cfg.eval_tolerance_feature_frames));
  for (const auto& [name, inputs] : tf_inputs)
    report["tf"][name] = loc_report_to_json(
        eval_localisation(inputs, cfg.eval_tolerance_feature_frames));

  std::ofstream out(out_path);
  if (!out) throw DataError("cannot open report for writing: " + out_path);
  out << report.dump(2) << '\n';
  write_manifest(out_path, "eval-loc", cfg, {corpus_path, vocab_path, model_path}, {out_path},
                 timer.seconds());
  std::cerr << "localisation report -> " << out_path << "\n";
  return 0;
}

int cmd_train_cls(const CommonOpts& common, const std::string& corpus_path,
                  const std::string& vocab_path, const std::string& store_path,
                  const std::string& test_corpus_path, const std::string& out_path,
                  std::string report_path) {
  Timer timer;
  RunConfig cfg = load_run_config(common.config_path, common.overrides);
  const Corpus corpus = load_corpus(corpus_path);
  const Vocabulary vocab = load_vocabulary(vocab_path);
  const AnnotationStore store = read_annotation_store(store_path);

  ClassSet classes;
  const auto restricted = eval_vocab_ids(cfg, vocab);
  if (restricted.empty())
    classes = ClassSet::from_vocabulary(vocab);
  else
    classes = ClassSet::from_token_ids({restricted.begin(), restricted.end()});

  ExtractStats stats;
  const auto instances =
      extract_instances(corpus, store, vocab, classes, cfg.classify_window_frames, &stats);
  if (stats.skipped_unknown_clip > 0)
    std::cerr << "warning: " << stats.skipped_unknown_clip << " rows named unknown clips\n";
  auto trained = train_mlp(instances, classes.size(), cfg.classify, cfg.seed);

  json ck_config;
  ck_config["window_frames"] = cfg.classify_window_frames;
  ck_config["class_token_ids"] = classes.token_ids;
  ck_config["hidden"] = cfg.classify.hidden;
  ck_config["residual"] = cfg.classify.residual;
  ck_config["input_dim"] = corpus.meta.feature_dim;
  save_checkpoint(out_path, "mlp", ck_config, trained.params);

  std::vector<std::string> inputs{corpus_path, vocab_path, store_path};
  std::vector<std::string> outputs{out_path};
  if (!test_corpus_path.empty()) {
    const Corpus test_raw = load_corpus(test_corpus_path);
    const Corpus test = encode_corpus(test_raw, vocab, cfg.text);
    const auto test_instances =
        extract_truth_instances(test, classes, cfg.classify_window_frames);
    json report;
    report["instances_train"] = instances.size();
    report["instances_test"] = test_instances.size();
    report["report"] = rec_report_to_json(
        evaluate_classifier(trained.params, cfg.classify, test_instances));
    if (cfg.classify_seeds.size() > 1)
      report["repeated"] = rec_report_stats_to_json(train_eval_repeated(
          instances, test_instances, classes.size(), cfg.classify, cfg.classify_seeds));
    if (report_path.empty()) report_path = out_path + ".report.json";
    std::ofstream r(report_path);
    if (!r) throw DataError("cannot open report for writing: " + report_path);
    r << report.dump(2) << '\n';
    inputs.push_back(test_corpus_path);
    outputs.push_back(report_path);
  }
  write_manifest(out_path, "train-cls", cfg, inputs, outputs, timer.seconds());
  return 0;
}

int cmd_eval_cls(const CommonOpts& common, const std::string& corpus_path,
                 const std::string& vocab_path, const std::string& model_path,
                 const std::string& out_path) {
  Timer timer;
  RunConfig cfg = load_run_config(common.config_path, common.overrides);
  const Corpus raw = load_corpus(corpus_path);
  const Vocabulary vocab = load_vocabulary(vocab_path);
  auto ck = load_checkpoint(model_path);
  if (ck.kind != "mlp") throw DataError(model_path + ": not an MLP checkpoint");

  MlpConfig mlp_cfg = cfg.classify;
  mlp_cfg.hidden = ck.config.at("hidden").get<std::vector<int>>();
  mlp_cfg.residual = ck.config.at("residual").get<bool>();
  const int window = ck.config.at("window_frames").get<int>();
  const ClassSet classes =
      ClassSet::from_token_ids(ck.config.at("class_token_ids").get<std::vector<int>>());

  const Corpus corpus = encode_corpus(raw, vocab, cfg.text);
  const auto instances = extract_truth_instances(corpus, classes, window);
  if (instances.empty()) throw DataError("no test instances (does the corpus carry truth?)");

  json report;
  report["instances"] = instances.size();
  report["report"] = rec_report_to_json(evaluate_classifier(ck.params, mlp_cfg, instances));
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot open report for writing: " + out_path);
  out << report.dump(2) << '\n';
  write_manifest(out_path, "eval-cls", cfg, {corpus_path, vocab_path, model_path}, {out_path},
                 timer.seconds());
  return 0;
}

int cmd_report(const std::string& grid_dir, const std::string& out_path) {
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::recursive_directory_iterator(grid_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > 14 && name.substr(name.size() - 14) == ".manifest.json")
      manifests.push_back(entry.path());
  }
  std::sort(manifests.begin(), manifests.end());

  std::vector<std::map<std::string, std::string>> rows;
  std::vector<std::string> columns{"run", "subcommand", "config_hash", "seed"};
  auto ensure_column = [&](const std::string& c) {
    if (std::find(columns.begin(), columns.end(), c) == columns.end()) columns.push_back(c);
  };

  for (const auto& path : manifests) {
    std::ifstream in(path);
    json manifest;
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    std::map<std::string, std::string> row;
    row["run"] = fs::relative(path, grid_dir).string();
    row["subcommand"] = manifest.value("subcommand", "");
    row["config_hash"] = manifest.value("config_hash", "");
    row["seed"] = manifest.contains("seed") ? manifest.at("seed").dump() : "";
    for (const auto& output : manifest.value("outputs", std::vector<std::string>{})) {
      const fs::path op(output);
      if (op.extension() != ".json") continue;
      std::ifstream rin(op);
      if (!rin) continue;  // outputs may have moved; skip quietly
      json rj = json::parse(rin, nullptr, false);
      if (rj.is_discarded()) continue;
      const std::string stem = op.stem().string();
      for (const auto& [k, v] : flatten_json(rj)) {
        const std::string column = stem + "." + k;
        ensure_column(column);
        row[column] = v;
      }
    }
    rows.push_back(std::move(row));
  }

  std::ofstream out(out_path);
  if (!out) throw DataError("cannot open grid CSV for writing: " + out_path);
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << columns[i] << (i + 1 < columns.size() ? ',' : '\n');
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      auto it = row.find(columns[i]);
      if (it != row.end()) out << it->second;
      out << (i + 1 < columns.size() ? ',' : '\n');
    }
  }
  std::cerr << rows.size() << " runs -> " << out_path << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Attention-based sign spotting over weakly aligned subtitles"};
  app.require_subcommand(1);

  CommonOpts common;
  std::string corpus_path, vocab_path, model_path, store_path, test_corpus_path;
  std::string out_path, holdout_path, log_path, stats_path, report_path, grid_dir;

  auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic corpus");
  add_common(gen, &common);
  gen->add_option("--out", out_path, "corpus JSONL output")->required();
  gen->add_option("--holdout-out", holdout_path, "held-out split output");

  auto* vocab_cmd = app.add_subcommand("build-vocab", "build the stem vocabulary");
  add_common(vocab_cmd, &common);
  vocab_cmd->add_option("--corpus", corpus_path)->required();
  vocab_cmd->add_option("--out", out_path)->required();

  auto* train_cmd = app.add_subcommand("train", "train the sequence model");
  add_common(train_cmd, &common);
  train_cmd->add_option("--corpus", corpus_path)->required();
  train_cmd->add_option("--vocab", vocab_path)->required();
  train_cmd->add_option("--out", out_path)->required();
  train_cmd->add_option("--log", log_path, "per-epoch CSV (default <out>.log.csv)");

  auto* decode_cmd = app.add_subcommand("decode", "dump decoding results");
  add_common(decode_cmd, &common);
  decode_cmd->add_option("--corpus", corpus_path)->required();
  decode_cmd->add_option("--vocab", vocab_path)->required();
  decode_cmd->add_option("--model", model_path)->required();
  decode_cmd->add_option("--out", out_path)->required();

  auto* mine_cmd = app.add_subcommand("mine", "mine an annotation store");
  add_common(mine_cmd, &common);
  mine_cmd->add_option("--corpus", corpus_path)->required();
  mine_cmd->add_option("--vocab", vocab_path)->required();
  mine_cmd->add_option("--model", model_path)->required();
  mine_cmd->add_option("--out", out_path)->required();
  mine_cmd->add_option("--stats", stats_path, "yield stats JSON (default <out>.stats.json)");

  auto* eval_loc_cmd = app.add_subcommand("eval-loc", "localisation evaluation");
  add_common(eval_loc_cmd, &common);
  eval_loc_cmd->add_option("--corpus", corpus_path)->required();
  eval_loc_cmd->add_option("--vocab", vocab_path)->required();
  eval_loc_cmd->add_option("--model", model_path)->required();
  eval_loc_cmd->add_option("--out", out_path)->required();

  auto* train_cls_cmd = app.add_subcommand("train-cls", "train the recognition MLP");
  add_common(train_cls_cmd, &common);
  train_cls_cmd->add_option("--corpus", corpus_path)->required();
  train_cls_cmd->add_option("--vocab", vocab_path)->required();
  train_cls_cmd->add_option("--store", store_path)->required();
  train_cls_cmd->add_option("--test-corpus", test_corpus_path, "evaluate after training");
  train_cls_cmd->add_option("--out", out_path)->required();
  train_cls_cmd->add_option("--report", report_path, "report JSON (default <out>.report.json)");

  auto* eval_cls_cmd = app.add_subcommand("eval-cls", "evaluate a recognition MLP");
  add_common(eval_cls_cmd, &common);
  eval_cls_cmd->add_option("--corpus", corpus_path)->required();
  eval_cls_cmd->add_option("--vocab", vocab_path)->required();
  eval_cls_cmd->add_option("--model", model_path)->required();
  eval_cls_cmd->add_option("--out", out_path)->required();

  auto* report_cmd = app.add_subcommand("report", "assemble a CSV grid from run manifests");
  report_cmd->add_option("--grid", grid_dir, "directory holding run manifests")->required();
  report_cmd->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_corpus(common, out_path, holdout_path);
    if (vocab_cmd->parsed()) return cmd_build_vocab(common, corpus_path, out_path);
    if (train_cmd->parsed())
      return cmd_train(common, corpus_path, vocab_path, out_path, log_path);
    if (decode_cmd->parsed())
      return cmd_decode(common, corpus_path, vocab_path, model_path, out_path);
    if (mine_cmd->parsed())
      return cmd_mine(common, corpus_path, vocab_path, model_path, out_path, stats_path);
    if (eval_loc_cmd->parsed())
      return cmd_eval_loc(common, corpus_path, vocab_path, model_path, out_path);
    if (train_cls_cmd->parsed())
      return cmd_train_cls(common, corpus_path, vocab_path, store_path, test_corpus_path,
                           out_path, report_path);
    if (eval_cls_cmd->parsed())
      return cmd_eval_cls(common, corpus_path, vocab_path, model_path, out_path);
    if (report_cmd->parsed()) return cmd_report(grid_dir, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace attnspot
