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

#include "attnspot/graph.h"

#include <cmath>

#include "attnspot/common.h"

namespace attnspot {

const Mat& Var::value() const {
  return graph_->nodes_[static_cast<std::size_t>(index_)].value;
}

const Mat& Var::grad() const {
  return graph_->nodes_[static_cast<std::size_t>(index_)].grad;
}

Var Graph::make(Mat value, bool requires_grad, std::function<void()> back) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::input(Mat v) { return make(std::move(v), false); }

Var Graph::param(Mat v) { return make(std::move(v), true); }

Var Graph::add(Var a, Var b) {
  Var out = make(val(a) + val(b), rg(a) || rg(b));
  node(out).back = [this, a, b, out]() {
    if (rg(a)) gradref(a).noalias() += out.grad();
    if (rg(b)) gradref(b).noalias() += out.grad();
  };
  return out;
}

Var Graph::sub(Var a, Var b) {
  Var out = make(val(a) - val(b), rg(a) || rg(b));
  node(out).back = [this, a, b, out]() {
    if (rg(a)) gradref(a).noalias() += out.grad();
    if (rg(b)) gradref(b).noalias() -= out.grad();
  };
  return out;
}

Var Graph::mul(Var a, Var b) {
  Var out = make(val(a).cwiseProduct(val(b)), rg(a) || rg(b));
  node(out).back = [this, a, b, out]() {
    if (rg(a)) gradref(a).noalias() += out.grad().cwiseProduct(val(b));
    if (rg(b)) gradref(b).noalias() += out.grad().cwiseProduct(val(a));
  };
  return out;
}

Var Graph::scale(Var a, double c) {
  Var out = make(val(a) * c, rg(a));
  node(out).back = [this, a, c, out]() {
    if (rg(a)) gradref(a).noalias() += out.grad() * c;
  };
  return out;
}

Var Graph::matmul(Var a, Var b) {
  Var out = make(val(a) * val(b), rg(a) || rg(b));
  node(out).back = [this, a, b, out]() {
    if (rg(a)) gradref(a).noalias() += out.grad() * val(b).transpose();
    if (rg(b)) gradref(b).noalias() += val(a).transpose() * out.grad();
  };
  return out;
}

Var Graph::transpose(Var a) {
  Var out = make(val(a).transpose(), rg(a));
  node(out).back = [this, a, out]() {
    if (rg(a)) gradref(a).noalias() += out.grad().transpose();
  };
  return out;
}

Var Graph::add_row_broadcast(Var a, Var row) {
  Mat v = val(a);
  v.rowwise() += val(row).row(0);
  Var out = make(std::move(v), rg(a) || rg(row));
  node(out).back = [this, a, row, out]() {
    if (rg(a)) gradref(a).noalias() += out.grad();
    if (rg(row)) gradref(row).noalias() += out.grad().colwise().sum();
  };
  return out;
}

Var Graph::relu(Var a) {
  Var out = make(val(a).cwiseMax(0.0), rg(a));
  node(out).back = [this, a, out]() {
    if (!rg(a)) return;
    gradref(a).noalias() +=
        out.grad().cwiseProduct((val(a).array() > 0.0).cast<double>().matrix());
  };
  return out;
}

Var Graph::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ContractViolation("concat_cols over no parts");
  int cols = 0;
  bool needs = false;
  for (const Var& p : parts) {
    cols += p.cols();
    needs = needs || rg(p);
  }
  Mat v(parts.front().rows(), cols);
  int at = 0;
  for (const Var& p : parts) {
    v.middleCols(at, p.cols()) = val(p);
    at += p.cols();
  }
  Var out = make(std::move(v), needs);
  std::vector<Var> parts_copy = parts;
  node(out).back = [this, parts_copy, out]() {
    int at = 0;
    for (const Var& p : parts_copy) {
      if (rg(p)) gradref(p).noalias() += out.grad().middleCols(at, p.cols());
      at += p.cols();
    }
  };
  return out;
}

Var Graph::softmax_rows(Var a, const Mat& additive_mask) {
  Mat scores = val(a);
  if (additive_mask.size() > 0) scores += additive_mask;
  Mat probs(scores.rows(), scores.cols());
  for (int r = 0; r < scores.rows(); ++r) {
    const double mx = scores.row(r).maxCoeff();
    Eigen::RowVectorXd e = (scores.row(r).array() - mx).exp();
    probs.row(r) = e / e.sum();
  }
  Var out = make(std::move(probs), rg(a));
  node(out).back = [this, a, out]() {
    if (!rg(a)) return;
    const Mat& p = val(out);
    const Mat& dp = out.grad();
    Mat da(p.rows(), p.cols());
    for (int r = 0; r < p.rows(); ++r) {
      const double dot = dp.row(r).dot(p.row(r));
      da.row(r) = p.row(r).cwiseProduct((dp.row(r).array() - dot).matrix());
    }
    gradref(a).noalias() += da;
  };
  return out;
}

Var Graph::softmax_rows(Var a) { return softmax_rows(a, Mat()); }

Var Graph::layer_norm_rows(Var a, Var gain, Var bias, double eps) {
  const Mat& x = val(a);
  const int d = static_cast<int>(x.cols());
  Eigen::VectorXd mean = x.rowwise().mean();
  Mat centered = x.colwise() - mean;
  Eigen::VectorXd inv_std =
      ((centered.array().square().rowwise().sum() / d) + eps).sqrt().inverse();
  Mat xhat = (centered.array().colwise() * inv_std.array()).matrix();
  Mat y = ((xhat.array().rowwise() * val(gain).row(0).array()).rowwise() +
           val(bias).row(0).array())
              .matrix();
  Var out = make(std::move(y), rg(a) || rg(gain) || rg(bias));
  node(out).back = [this, a, gain, bias, out, xhat, inv_std, d]() {
    const Mat& dy = out.grad();
    if (rg(gain)) gradref(gain).noalias() += dy.cwiseProduct(xhat).colwise().sum();
    if (rg(bias)) gradref(bias).noalias() += dy.colwise().sum();
    if (!rg(a)) return;
    Mat dxhat = (dy.array().rowwise() * val(gain).row(0).array()).matrix();
    Eigen::VectorXd mean_dxhat = dxhat.rowwise().mean();
    Eigen::VectorXd mean_dxhat_xhat = dxhat.cwiseProduct(xhat).rowwise().sum() / d;
    Mat dx = dxhat;
    dx.colwise() -= mean_dxhat;
    dx.noalias() -= (xhat.array().colwise() * mean_dxhat_xhat.array()).matrix();
    dx = (dx.array().colwise() * inv_std.array()).matrix();
    gradref(a).noalias() += dx;
  };
  return out;
}

Var Graph::embedding_rows(Var table, const std::vector<int>& ids) {
  const Mat& t = val(table);
  Mat v(static_cast<int>(ids.size()), t.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= t.rows())
      throw ContractViolation("embedding id out of range: " + std::to_string(ids[i]));
    v.row(static_cast<int>(i)) = t.row(ids[i]);
  }
  Var out = make(std::move(v), rg(table));
  std::vector<int> ids_copy = ids;
  node(out).back = [this, table, out, ids_copy]() {
    if (!rg(table)) return;
    Mat& g = gradref(table);
    for (std::size_t i = 0; i < ids_copy.size(); ++i)
      g.row(ids_copy[i]) += out.grad().row(static_cast<int>(i));
  };
  return out;
}

Var Graph::dropout(Var a, double p, RngStream& rng) {
  if (p <= 0.0) return a;
  if (p >= 1.0) throw ContractViolation("dropout probability must be < 1");
  const double keep = 1.0 - p;
  Mat mask(val(a).rows(), val(a).cols());
  for (int r = 0; r < mask.rows(); ++r)
    for (int c = 0; c < mask.cols(); ++c) mask(r, c) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  Var out = make(val(a).cwiseProduct(mask), rg(a));
  node(out).back = [this, a, out, mask]() {
    if (rg(a)) gradref(a).noalias() += out.grad().cwiseProduct(mask);
  };
  return out;
}

Var Graph::mean_nll(Var logits, const std::vector<int>& targets, int pad_id) {
  const Mat& z = val(logits);
  if (static_cast<int>(targets.size()) != z.rows())
    throw ContractViolation("mean_nll: target length must match logit rows");
  Mat softmax(z.rows(), z.cols());
  double loss = 0.0;
  int counted = 0;
  for (int r = 0; r < z.rows(); ++r) {
    const double mx = z.row(r).maxCoeff();
    Eigen::RowVectorXd e = (z.row(r).array() - mx).exp();
    const double sum = e.sum();
    softmax.row(r) = e / sum;
    if (targets[static_cast<std::size_t>(r)] == pad_id) continue;
    const int t = targets[static_cast<std::size_t>(r)];
    if (t < 0 || t >= z.cols()) throw ContractViolation("mean_nll: target id out of range");
    loss += -(z(r, t) - mx - std::log(sum));
    ++counted;
  }
  if (counted == 0) throw ContractViolation("mean_nll: all steps are padding");
  Mat out(1, 1);
  out(0, 0) = loss / counted;
  Var v = make(std::move(out), rg(logits));
  std::vector<int> targets_copy = targets;
  node(v).back = [this, logits, v, softmax, targets_copy, pad_id, counted]() {
    if (!rg(logits)) return;
    const double g = v.grad()(0, 0) / counted;
    Mat& dz = gradref(logits);
    for (int r = 0; r < softmax.rows(); ++r) {
      const int t = targets_copy[static_cast<std::size_t>(r)];
      if (t == pad_id) continue;
      dz.row(r) += g * softmax.row(r);
      dz(r, t) -= g;
    }
  };
  return v;
}

Var Graph::weighted_row_sqdist(Var probs, const Mat& targets, const std::vector<double>& weights) {
  const Mat& p = val(probs);
  if (p.rows() != targets.rows() || p.cols() != targets.cols())
    throw ContractViolation("weighted_row_sqdist: shape mismatch");
  if (static_cast<int>(weights.size()) != p.rows())
    throw ContractViolation("weighted_row_sqdist: weight length mismatch");
  double loss = 0.0;
  for (int r = 0; r < p.rows(); ++r)
    if (weights[static_cast<std::size_t>(r)] != 0.0)
      loss += weights[static_cast<std::size_t>(r)] * (p.row(r) - targets.row(r)).squaredNorm();
  Mat out(1, 1);
  out(0, 0) = loss;
  Var v = make(std::move(out), rg(probs));
  Mat targets_copy = targets;
  std::vector<double> w_copy = weights;
  node(v).back = [this, probs, v, targets_copy, w_copy]() {
    if (!rg(probs)) return;
    const double g = v.grad()(0, 0);
    Mat& dp = gradref(probs);
    for (int r = 0; r < dp.rows(); ++r)
      if (w_copy[static_cast<std::size_t>(r)] != 0.0)
        dp.row(r) += (2.0 * g * w_copy[static_cast<std::size_t>(r)]) *
                     (val(probs).row(r) - targets_copy.row(r));
  };
  return v;
}

void Graph::backward(Var loss) {
  if (loss.rows() != 1 || loss.cols() != 1)
    throw ContractViolation("backward expects a scalar loss");
  for (auto& n : nodes_) {
    if (n.requires_grad) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  }
  if (!node(loss).requires_grad) return;  // loss independent of every parameter
  node(loss).grad(0, 0) = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& n = nodes_[i];
    if (n.requires_grad && n.back) n.back();
  }
}

}  // namespace attnspot
