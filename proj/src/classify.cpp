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

#include "attnspot/classify.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "attnspot/common.h"

namespace attnspot {

ClassSet ClassSet::from_vocabulary(const Vocabulary& vocab) {
  return from_token_ids(vocab.content_ids());
}

ClassSet ClassSet::from_token_ids(std::vector<int> ids) {
  ClassSet cs;
  cs.token_ids = std::move(ids);
  for (std::size_t i = 0; i < cs.token_ids.size(); ++i)
    cs.token_to_class.emplace(cs.token_ids[i], static_cast<int>(i));
  return cs;
}

int ClassSet::class_of(int token_id) const {
  auto it = token_to_class.find(token_id);
  return it == token_to_class.end() ? -1 : it->second;
}

namespace {

Eigen::VectorXd pooled_window(const FeatureSequence& fs, FrameIndex center, int window_frames) {
  const FrameIndex half = window_frames / 2;
  const int first = fs.index_of_frame(center - half);
  const int last = fs.index_of_frame(center + half - 1);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(fs.dim());
  for (int j = first; j <= last; ++j) mean += fs.features.row(j).cast<double>();
  return mean / static_cast<double>(last - first + 1);
}

}  // namespace

std::vector<TrimmedInstance> extract_instances(const Corpus& corpus, const AnnotationStore& store,
                                               const Vocabulary& vocab, const ClassSet& classes,
                                               int window_frames, ExtractStats* stats) {
  if (window_frames < 1) throw ConfigError("window_frames must be >= 1");
  std::unordered_map<std::string, const SubtitledClip*> by_id;
  for (const auto& clip : corpus.clips) by_id.emplace(clip.id, &clip);

  std::vector<TrimmedInstance> out;
  out.reserve(store.rows.size());
  for (const auto& row : store.rows) {
    auto it = by_id.find(row.clip_id);
    if (it == by_id.end()) {
      if (stats) ++stats->skipped_unknown_clip;
      continue;
    }
    const int cls = classes.class_of(vocab.id_of(row.token));
    if (cls < 0) {
      if (stats) ++stats->skipped_out_of_class;
      continue;
    }
    TrimmedInstance inst;
    inst.features = pooled_window(it->second->features, row.frame_time, window_frames);
    inst.label = cls;
    inst.clip_id = row.clip_id;
    out.push_back(std::move(inst));
    if (stats) ++stats->instances;
  }
  return out;
}

std::vector<TrimmedInstance> extract_truth_instances(const Corpus& corpus,
                                                     const ClassSet& classes, int window_frames) {
  std::vector<TrimmedInstance> out;
  for (const auto& clip : corpus.clips) {
    if (!clip.truth) continue;
    for (const auto& sign : *clip.truth) {
      const int cls = classes.class_of(sign.token_id);
      if (cls < 0) continue;
      TrimmedInstance inst;
      inst.features = pooled_window(clip.features, sign.midpoint_frame(), window_frames);
      inst.label = cls;
      inst.clip_id = clip.id;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

void MlpConfig::validate() const {
  if (hidden.empty()) throw ConfigError("the MLP needs at least one hidden layer");
  for (int h : hidden)
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
  if (epochs < 1 || batch_size < 1) throw ConfigError("invalid MLP training settings");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must lie in [0, 1)");
}

namespace {

Mat glorot(int rows, int cols, RngStream& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = (rng.uniform() * 2.0 - 1.0) * limit;
  return m;
}

// x -> res(x) -> hidden stack -> logits
Var mlp_graph(Graph& g, const std::unordered_map<std::string, Var>& params, Var x,
              const MlpConfig& cfg) {
  if (cfg.residual) {
    Var t = g.relu(g.add_row_broadcast(g.matmul(x, params.at("res.w")), params.at("res.b")));
    x = g.add(x, t);
  }
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i) {
    const std::string n = "fc" + std::to_string(i);
    x = g.relu(g.add_row_broadcast(g.matmul(x, params.at(n + ".w")), params.at(n + ".b")));
  }
  return g.add_row_broadcast(g.matmul(x, params.at("out.w")), params.at("out.b"));
}

Mat instances_matrix(const std::vector<TrimmedInstance>& instances,
                     const std::vector<std::size_t>& rows) {
  Mat x(static_cast<int>(rows.size()), instances.front().features.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    x.row(static_cast<int>(i)) = instances[rows[i]].features.transpose();
  return x;
}

}  // namespace

ParamStore init_mlp_params(int input_dim, int n_classes, const MlpConfig& cfg,
                           std::uint64_t seed) {
  cfg.validate();
  RngStream rng(seed, 0x3117);
  ParamStore p;
  if (cfg.residual) {
    p.add("res.w", glorot(input_dim, input_dim, rng));
    p.add("res.b", Mat::Zero(1, input_dim));
  }
  int prev = input_dim;
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i) {
    p.add("fc" + std::to_string(i) + ".w", glorot(prev, cfg.hidden[i], rng));
    p.add("fc" + std::to_string(i) + ".b", Mat::Zero(1, cfg.hidden[i]));
    prev = cfg.hidden[i];
  }
  p.add("out.w", glorot(prev, n_classes, rng));
  p.add("out.b", Mat::Zero(1, n_classes));
  return p;
}

MlpTrainResult train_mlp(const std::vector<TrimmedInstance>& instances, int n_classes,
                         const MlpConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (instances.empty()) throw ConfigError("no training instances");
  std::set<int> labels;
  for (const auto& inst : instances) labels.insert(inst.label);
  if (labels.size() < 2) throw ConfigError("MLP training needs at least two classes");

  const int input_dim = static_cast<int>(instances.front().features.size());
  MlpTrainResult result;
  result.params = init_mlp_params(input_dim, n_classes, cfg, seed);
  std::unordered_map<std::string, Mat> velocity;

  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    RngStream rng(seed, 0x2000 + static_cast<std::uint64_t>(epoch));
    rng.shuffle(order);
    const double lr = cfg.lr.at_epoch(epoch);
    double epoch_loss = 0.0;
    int batches = 0;

    std::size_t at = 0;
    while (at < order.size()) {
      const std::size_t end = std::min(order.size(), at + static_cast<std::size_t>(cfg.batch_size));
      std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(at),
                                    order.begin() + static_cast<std::ptrdiff_t>(end));
      std::vector<int> targets;
      targets.reserve(rows.size());
      for (std::size_t r : rows) targets.push_back(instances[r].label);

      Graph g;
      auto vars = register_params(g, result.params, /*trainable=*/true);
      Var x = g.input(instances_matrix(instances, rows));
      Var logits = mlp_graph(g, vars, x, cfg);
      Var loss = g.mean_nll(logits, targets, /*pad_id=*/-1);
      epoch_loss += loss.value()(0, 0);
      ++batches;
      g.backward(loss);

      for (const auto& name : result.params.names()) {
        const Mat& grad = vars.at(name).grad();
        Mat& v = velocity.try_emplace(name, Mat::Zero(grad.rows(), grad.cols())).first->second;
        v = cfg.momentum * v - lr * grad;
        result.params.at(name) += v;
      }
      at = end;
    }
    result.log.push_back({epoch, epoch_loss / std::max(1, batches), lr});
  }
  return result;
}

std::vector<Eigen::VectorXd> mlp_scores(const ParamStore& params, const MlpConfig& cfg,
                                        const std::vector<TrimmedInstance>& instances) {
  std::vector<Eigen::VectorXd> out;
  if (instances.empty()) return out;
  std::vector<std::size_t> rows(instances.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  Graph g;
  auto vars = register_params(g, params, /*trainable=*/false);
  Var logits = mlp_graph(g, vars, g.input(instances_matrix(instances, rows)), cfg);
  const Mat& z = logits.value();
  out.reserve(instances.size());
  for (int r = 0; r < z.rows(); ++r) out.push_back(z.row(r).transpose());
  return out;
}

RecReport evaluate_classifier(const ParamStore& params, const MlpConfig& cfg,
                              const std::vector<TrimmedInstance>& test_instances) {
  const auto scores = mlp_scores(params, cfg, test_instances);
  std::vector<int> labels;
  labels.reserve(test_instances.size());
  for (const auto& inst : test_instances) labels.push_back(inst.label);
  return topk_recognition(scores, labels);
}

RecReportStats train_eval_repeated(const std::vector<TrimmedInstance>& train_instances,
                                   const std::vector<TrimmedInstance>& test_instances,
                                   int n_classes, const MlpConfig& cfg,
                                   const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ConfigError("train_eval_repeated needs at least one seed");
  std::vector<RecReport> reports;
  reports.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    const auto trained = train_mlp(train_instances, n_classes, cfg, seed);
    reports.push_back(evaluate_classifier(trained.params, cfg, test_instances));
  }

  auto collect = [&](auto member) {
    double mean = 0.0;
    for (const auto& r : reports) mean += r.*member;
    mean /= static_cast<double>(reports.size());
    double var = 0.0;
    for (const auto& r : reports) var += (r.*member - mean) * (r.*member - mean);
    var /= static_cast<double>(reports.size());
    return std::pair<double, double>{mean, std::sqrt(var)};
  };

  RecReportStats stats;
  stats.n_runs = static_cast<int>(reports.size());
  std::tie(stats.mean.top1_instance, stats.stddev.top1_instance) =
      collect(&RecReport::top1_instance);
  std::tie(stats.mean.top5_instance, stats.stddev.top5_instance) =
      collect(&RecReport::top5_instance);
  std::tie(stats.mean.top1_class, stats.stddev.top1_class) = collect(&RecReport::top1_class);
  std::tie(stats.mean.top5_class, stats.stddev.top5_class) = collect(&RecReport::top5_class);
  return stats;
}

nlohmann::json rec_report_stats_to_json(const RecReportStats& stats) {
  return {{"mean", rec_report_to_json(stats.mean)},
          {"stddev", rec_report_to_json(stats.stddev)},
          {"n_runs", stats.n_runs}};
}

}  // namespace attnspot
