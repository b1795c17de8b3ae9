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

#ifndef ATTNSPOT_GRAPH_H_
#define ATTNSPOT_GRAPH_H_

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "attnspot/rng.h"

namespace attnspot {

using Mat = Eigen::MatrixXd;

class Graph;

// Handle to a node on a Graph tape. Valid only while its Graph lives.
class Var {
 public:
  Var() = default;
  const Mat& value() const;
  const Mat& grad() const;
  int rows() const { return static_cast<int>(value().rows()); }
  int cols() const { return static_cast<int>(value().cols()); }
  bool valid() const { return graph_ != nullptr; }

 private:
  friend class Graph;
  Var(Graph* g, int idx) : graph_(g), index_(idx) {}
  Graph* graph_ = nullptr;
  int index_ = -1;
};

// Define-by-run reverse-mode tape over dense double matrices. Nodes are
// appended in topological order; backward() walks the tape in reverse.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var input(Mat v);  // constant leaf, no gradient
  Var param(Mat v);  // differentiable leaf

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double c);
  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var add_row_broadcast(Var a, Var row);  // a + row replicated over a's rows
  Var relu(Var a);
  Var concat_cols(const std::vector<Var>& parts);

  // Row-wise softmax after adding `additive_mask` (0 or large negative) to
  // the scores. Every row must keep at least one unmasked entry.
  Var softmax_rows(Var a, const Mat& additive_mask);
  Var softmax_rows(Var a);

  // y = (x - mean) / sqrt(var + eps) * gain + bias, statistics per row.
  Var layer_norm_rows(Var a, Var gain, Var bias, double eps = 1e-5);

  // Gathers table rows by id; gradients scatter-add back into the table.
  Var embedding_rows(Var table, const std::vector<int>& ids);

  // Inverted dropout; identity when p == 0.
  Var dropout(Var a, double p, RngStream& rng);

  // Scalar (1x1): mean over steps with target != pad_id of
  // -log softmax(logits_row)[target].
  Var mean_nll(Var logits, const std::vector<int>& targets, int pad_id);

  // Scalar: sum_t weights[t] * ||probs.row(t) - targets.row(t)||^2.
  Var weighted_row_sqdist(Var probs, const Mat& targets, const std::vector<double>& weights);

  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  friend class Var;

  struct Node {
    Mat value;
    Mat grad;
    bool requires_grad = false;
    std::function<void()> back;  // empty for leaves
  };

  Var make(Mat value, bool requires_grad, std::function<void()> back = {});
  Node& node(Var v) { return nodes_[static_cast<std::size_t>(v.index_)]; }
  bool rg(Var v) const { return nodes_[static_cast<std::size_t>(v.index_)].requires_grad; }
  Mat& gradref(Var v) { return nodes_[static_cast<std::size_t>(v.index_)].grad; }
  const Mat& val(Var v) const { return nodes_[static_cast<std::size_t>(v.index_)].value; }

  std::vector<Node> nodes_;
};

}  // namespace attnspot

#endif  // ATTNSPOT_GRAPH_H_
