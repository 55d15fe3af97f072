// Copyright 2026 The trajkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajkit/nn/tensor.hpp"

#include "trajkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

namespace trajkit::nn
{
namespace
{

thread_local bool g_grad_enabled = true;
thread_local std::uint64_t g_flops = 0;

template <typename S>
using NodePtr = std::shared_ptr<Node<S>>;

template <typename S>
Tensor<S> make_result(
  Matrix<S> value, std::vector<NodePtr<S>> parents, std::function<void(Node<S> &)> backward_fn)
{
  auto node = std::make_shared<Node<S>>();
  node->value = std::move(value);
  const bool tracked = g_grad_enabled && std::any_of(parents.begin(), parents.end(), [](const auto & p) {
    return p->requires_grad;
  });
  if (tracked) {
    node->requires_grad = true;
    node->is_leaf = false;
    node->parents = std::move(parents);
    node->backward_fn = std::move(backward_fn);
  }
  return Tensor<S>::from_node(std::move(node));
}

template <typename S>
void push_grad(Node<S> & parent, const Matrix<S> & delta)
{
  if (parent.requires_grad) {
    parent.accumulate(delta);
  }
}

void require(bool condition, const std::string & what)
{
  if (!condition) {
    throw Error(ErrorCode::ShapeMismatch, what);
  }
}

std::string shape(Index r, Index c)
{
  return std::to_string(r) + "x" + std::to_string(c);
}

template <typename S>
void require_same_shape(const Tensor<S> & a, const Tensor<S> & b, const char * op)
{
  require(
    a.rows() == b.rows() && a.cols() == b.cols(),
    std::string(op) + ": " + shape(a.rows(), a.cols()) + " vs " + shape(b.rows(), b.cols()));
}

template <typename S>
S stable_sigmoid(S x)
{
  if (x >= S(0)) {
    return S(1) / (S(1) + std::exp(-x));
  }
  const S e = std::exp(x);
  return e / (S(1) + e);
}

template <typename S>
double accumulate_sum(const Matrix<S> & m)
{
  return m.template cast<double>().sum();
}

}  // namespace

template <typename S>
void Node<S>::accumulate(const Matrix<S> & delta)
{
  if (grad.size() == 0) {
    grad = delta;
  } else {
    grad += delta;
  }
}

template <typename S>
Tensor<S>::Tensor() : node_(std::make_shared<Node<S>>())
{
}

template <typename S>
Tensor<S>::Tensor(Mat value, bool requires_grad) : node_(std::make_shared<Node<S>>())
{
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

template <typename S>
Tensor<S> Tensor<S>::zeros(Index rows, Index cols, bool requires_grad)
{
  return Tensor(Mat::Zero(rows, cols), requires_grad);
}

template <typename S>
Tensor<S> Tensor<S>::from_node(std::shared_ptr<Node<S>> node)
{
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

template <typename S>
typename Tensor<S>::Mat Tensor<S>::grad() const
{
  if (node_->grad.size() == 0) {
    return Mat::Zero(rows(), cols());
  }
  return node_->grad;
}

template <typename S>
S Tensor<S>::item() const
{
  if (size() != 1) {
    throw Error(ErrorCode::NotScalar, "item() on a " + shape(rows(), cols()) + " tensor");
  }
  return node_->value(0, 0);
}

template <typename S>
void Tensor<S>::backward() const
{
  if (size() != 1) {
    throw Error(ErrorCode::NotScalar, "backward() on a " + shape(rows(), cols()) + " tensor");
  }
  if (!node_->requires_grad) {
    throw Error(ErrorCode::InvalidArgument, "backward() on a tensor that does not require grad");
  }
  // Iterative post-order DFS gives a topological order (inputs first).
  std::vector<Node<S> *> order;
  std::unordered_set<Node<S> *> visited;
  std::vector<std::pair<Node<S> *, std::size_t>> stack{{node_.get(), 0}};
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto & [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<S> * parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }
  for (Node<S> * n : order) {
    if (!n->is_leaf) {
      n->grad.resize(0, 0);
    }
  }
  node_->accumulate(Mat::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<S> * n = *it;
    if (n->backward_fn && n->grad.size() > 0) {
      n->backward_fn(*n);
    }
  }
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled)
{
  g_grad_enabled = false;
}

NoGradGuard::~NoGradGuard()
{
  g_grad_enabled = previous_;
}

bool grad_enabled()
{
  return g_grad_enabled;
}

std::uint64_t & flop_counter()
{
  return g_flops;
}

template <typename S>
Tensor<S> matmul(const Tensor<S> & a, const Tensor<S> & b)
{
  require(
    a.cols() == b.rows(),
    "matmul: " + shape(a.rows(), a.cols()) + " x " + shape(b.rows(), b.cols()));
  g_flops += static_cast<std::uint64_t>(a.rows() * a.cols() * b.cols());
  Matrix<S> out = a.value() * b.value();
  return make_result<S>(std::move(out), {a.node(), b.node()}, [](Node<S> & self) {
    auto & pa = *self.parents[0];
    auto & pb = *self.parents[1];
    if (pa.requires_grad) pa.accumulate(self.grad * pb.value.transpose());
    if (pb.requires_grad) pb.accumulate(pa.value.transpose() * self.grad);
  });
}

template <typename S>
Tensor<S> add(const Tensor<S> & a, const Tensor<S> & b)
{
  require_same_shape(a, b, "add");
  return make_result<S>(a.value() + b.value(), {a.node(), b.node()}, [](Node<S> & self) {
    push_grad(*self.parents[0], self.grad);
    push_grad(*self.parents[1], self.grad);
  });
}

template <typename S>
Tensor<S> add_row(const Tensor<S> & a, const Tensor<S> & b)
{
  require(
    b.rows() == 1 && b.cols() == a.cols(),
    "add_row: " + shape(a.rows(), a.cols()) + " + " + shape(b.rows(), b.cols()));
  Matrix<S> out = a.value().rowwise() + b.value().row(0);
  return make_result<S>(std::move(out), {a.node(), b.node()}, [](Node<S> & self) {
    push_grad(*self.parents[0], self.grad);
    if (self.parents[1]->requires_grad) {
      self.parents[1]->accumulate(self.grad.colwise().sum());
    }
  });
}

template <typename S>
Tensor<S> sub(const Tensor<S> & a, const Tensor<S> & b)
{
  require_same_shape(a, b, "sub");
  return make_result<S>(a.value() - b.value(), {a.node(), b.node()}, [](Node<S> & self) {
    push_grad(*self.parents[0], self.grad);
    push_grad<S>(*self.parents[1], -self.grad);
  });
}

template <typename S>
Tensor<S> mul(const Tensor<S> & a, const Tensor<S> & b)
{
  require_same_shape(a, b, "mul");
  Matrix<S> out = a.value().cwiseProduct(b.value());
  return make_result<S>(std::move(out), {a.node(), b.node()}, [](Node<S> & self) {
    auto & pa = *self.parents[0];
    auto & pb = *self.parents[1];
    if (pa.requires_grad) pa.accumulate(self.grad.cwiseProduct(pb.value));
    if (pb.requires_grad) pb.accumulate(self.grad.cwiseProduct(pa.value));
  });
}

template <typename S>
Tensor<S> scale(const Tensor<S> & a, S factor)
{
  return make_result<S>(a.value() * factor, {a.node()}, [factor](Node<S> & self) {
    push_grad<S>(*self.parents[0], self.grad * factor);
  });
}

template <typename S>
Tensor<S> add_scalar(const Tensor<S> & a, S offset)
{
  Matrix<S> out = a.value().array() + offset;
  return make_result<S>(std::move(out), {a.node()}, [](Node<S> & self) {
    push_grad(*self.parents[0], self.grad);
  });
}

template <typename S>
Tensor<S> concat_cols(const std::vector<Tensor<S>> & parts)
{
  require(!parts.empty(), "concat_cols: no inputs");
  Index cols = 0;
  for (const auto & p : parts) {
    require(p.rows() == parts.front().rows(), "concat_cols: row counts differ");
    cols += p.cols();
  }
  Matrix<S> out(parts.front().rows(), cols);
  std::vector<NodePtr<S>> parents;
  std::vector<Index> offsets;
  Index offset = 0;
  for (const auto & p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    parents.push_back(p.node());
    offsets.push_back(offset);
    offset += p.cols();
  }
  return make_result<S>(std::move(out), std::move(parents), [offsets](Node<S> & self) {
    for (std::size_t i = 0; i < self.parents.size(); ++i) {
      auto & p = *self.parents[i];
      if (p.requires_grad) p.accumulate(self.grad.middleCols(offsets[i], p.value.cols()));
    }
  });
}

template <typename S>
Tensor<S> concat_rows(const std::vector<Tensor<S>> & parts)
{
  require(!parts.empty(), "concat_rows: no inputs");
  Index rows = 0;
  for (const auto & p : parts) {
    require(p.cols() == parts.front().cols(), "concat_rows: column counts differ");
    rows += p.rows();
  }
  Matrix<S> out(rows, parts.front().cols());
  std::vector<NodePtr<S>> parents;
  std::vector<Index> offsets;
  Index offset = 0;
  for (const auto & p : parts) {
    out.middleRows(offset, p.rows()) = p.value();
    parents.push_back(p.node());
    offsets.push_back(offset);
    offset += p.rows();
  }
  return make_result<S>(std::move(out), std::move(parents), [offsets](Node<S> & self) {
    for (std::size_t i = 0; i < self.parents.size(); ++i) {
      auto & p = *self.parents[i];
      if (p.requires_grad) p.accumulate(self.grad.middleRows(offsets[i], p.value.rows()));
    }
  });
}

template <typename S>
Tensor<S> slice_cols(const Tensor<S> & a, Index start, Index count)
{
  require(
    start >= 0 && count >= 0 && start + count <= a.cols(),
    "slice_cols: [" + std::to_string(start) + ", +" + std::to_string(count) + ") of " +
      shape(a.rows(), a.cols()));
  Matrix<S> out = a.value().middleCols(start, count);
  return make_result<S>(std::move(out), {a.node()}, [start, count](Node<S> & self) {
    auto & p = *self.parents[0];
    Matrix<S> g = Matrix<S>::Zero(p.value.rows(), p.value.cols());
    g.middleCols(start, count) = self.grad;
    p.accumulate(g);
  });
}

template <typename S>
Tensor<S> slice_rows(const Tensor<S> & a, Index start, Index count)
{
  require(
    start >= 0 && count >= 0 && start + count <= a.rows(),
    "slice_rows: [" + std::to_string(start) + ", +" + std::to_string(count) + ") of " +
      shape(a.rows(), a.cols()));
  Matrix<S> out = a.value().middleRows(start, count);
  return make_result<S>(std::move(out), {a.node()}, [start, count](Node<S> & self) {
    auto & p = *self.parents[0];
    Matrix<S> g = Matrix<S>::Zero(p.value.rows(), p.value.cols());
    g.middleRows(start, count) = self.grad;
    p.accumulate(g);
  });
}

template <typename S>
Tensor<S> gather_rows(const Tensor<S> & a, const std::vector<Index> & rows)
{
  Matrix<S> out(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] >= 0 && rows[i] < a.rows(), "gather_rows: index out of range");
    out.row(static_cast<Index>(i)) = a.value().row(rows[i]);
  }
  return make_result<S>(std::move(out), {a.node()}, [rows](Node<S> & self) {
    auto & p = *self.parents[0];
    Matrix<S> g = Matrix<S>::Zero(p.value.rows(), p.value.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      g.row(rows[i]) += self.grad.row(static_cast<Index>(i));
    }
    p.accumulate(g);
  });
}

template <typename S>
Tensor<S> scatter_add_rows(const Tensor<S> & a, const std::vector<Index> & index, Index out_rows)
{
  require(static_cast<Index>(index.size()) == a.rows(), "scatter_add_rows: index length");
  Matrix<S> out = Matrix<S>::Zero(out_rows, a.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    require(index[i] >= 0 && index[i] < out_rows, "scatter_add_rows: index out of range");
    out.row(index[i]) += a.value().row(static_cast<Index>(i));
  }
  return make_result<S>(std::move(out), {a.node()}, [index](Node<S> & self) {
    auto & p = *self.parents[0];
    Matrix<S> g(p.value.rows(), p.value.cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
      g.row(static_cast<Index>(i)) = self.grad.row(index[i]);
    }
    p.accumulate(g);
  });
}

template <typename S>
Tensor<S> reshape(const Tensor<S> & a, Index rows, Index cols)
{
  require(
    rows * cols == a.size(),
    "reshape: " + shape(a.rows(), a.cols()) + " to " + shape(rows, cols));
  Matrix<S> out = Eigen::Map<const Matrix<S>>(a.value().data(), rows, cols);
  return make_result<S>(std::move(out), {a.node()}, [](Node<S> & self) {
    auto & p = *self.parents[0];
    p.accumulate(Eigen::Map<const Matrix<S>>(self.grad.data(), p.value.rows(), p.value.cols()));
  });
}

template <typename S>
Tensor<S> transpose(const Tensor<S> & a)
{
  Matrix<S> out = a.value().transpose();
  return make_result<S>(std::move(out), {a.node()}, [](Node<S> & self) {
    self.parents[0]->accumulate(self.grad.transpose());
  });
}

template <typename S>
Tensor<S> relu(const Tensor<S> & a)
{
  g_flops += static_cast<std::uint64_t>(a.size());
  Matrix<S> out = a.value().cwiseMax(S(0));
  return make_result<S>(std::move(out), {a.node()}, [](Node<S> & self) {
    auto & p = *self.parents[0];
    p.accumulate((p.value.array() > S(0)).select(self.grad, S(0)));
  });
}

template <typename S>
Tensor<S> sigmoid(const Tensor<S> & a)
{
  g_flops += static_cast<std::uint64_t>(a.size());
  Matrix<S> out = a.value().unaryExpr([](S x) { return stable_sigmoid(x); });
  return make_result<S>(out, {a.node()}, [out](Node<S> & self) {
    self.parents[0]->accumulate(
      (self.grad.array() * out.array() * (S(1) - out.array())).matrix());
  });
}

template <typename S>
Tensor<S> softplus(const Tensor<S> & a)
{
  g_flops += static_cast<std::uint64_t>(a.size());
  Matrix<S> out = a.value().unaryExpr(
    [](S x) { return std::max(x, S(0)) + std::log1p(std::exp(-std::abs(x))); });
  return make_result<S>(std::move(out), {a.node()}, [](Node<S> & self) {
    auto & p = *self.parents[0];
    p.accumulate(
      self.grad.cwiseProduct(p.value.unaryExpr([](S x) { return stable_sigmoid(x); })));
  });
}

template <typename S>
Tensor<S> tanh(const Tensor<S> & a)
{
  g_flops += static_cast<std::uint64_t>(a.size());
  Matrix<S> out = a.value().array().tanh().matrix();
  return make_result<S>(out, {a.node()}, [out](Node<S> & self) {
    self.parents[0]->accumulate(
      (self.grad.array() * (S(1) - out.array().square())).matrix());
  });
}

template <typename S>
Tensor<S> exp(const Tensor<S> & a)
{
  g_flops += static_cast<std::uint64_t>(a.size());
  Matrix<S> out = a.value().array().exp().matrix();
  return make_result<S>(out, {a.node()}, [out](Node<S> & self) {
    self.parents[0]->accumulate(self.grad.cwiseProduct(out));
  });
}

template <typename S>
Tensor<S> log_clamped(const Tensor<S> & a, S floor)
{
  g_flops += static_cast<std::uint64_t>(a.size());
  Matrix<S> out = a.value().cwiseMax(floor).array().log().matrix();
  return make_result<S>(std::move(out), {a.node()}, [floor](Node<S> & self) {
    auto & p = *self.parents[0];
    p.accumulate((p.value.array() > floor).select(self.grad.array() / p.value.array(), S(0)).matrix());
  });
}

template <typename S>
Tensor<S> square(const Tensor<S> & a)
{
  Matrix<S> out = a.value().array().square().matrix();
  return make_result<S>(std::move(out), {a.node()}, [](Node<S> & self) {
    auto & p = *self.parents[0];
    p.accumulate(S(2) * self.grad.cwiseProduct(p.value));
  });
}

namespace
{

template <typename S>
Matrix<S> softmax_rows(const Matrix<S> & x)
{
  Matrix<S> out(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) {
    const S m = x.row(i).maxCoeff();
    out.row(i) = (x.row(i).array() - m).exp().matrix();
    const double total = out.row(i).template cast<double>().sum();
    out.row(i) /= static_cast<S>(total);
  }
  return out;
}

template <typename S>
Matrix<S> softmax_rows_backward(const Matrix<S> & p, const Matrix<S> & g)
{
  Matrix<S> out(p.rows(), p.cols());
  for (Index i = 0; i < p.rows(); ++i) {
    const S dot = static_cast<S>(g.row(i).cwiseProduct(p.row(i)).template cast<double>().sum());
    out.row(i) = p.row(i).cwiseProduct((g.row(i).array() - dot).matrix());
  }
  return out;
}

}  // namespace

template <typename S>
Tensor<S> softmax(const Tensor<S> & a, int axis)
{
  if (axis != 0 && axis != 1) {
    throw Error(ErrorCode::InvalidArgument, "softmax axis must be 0 or 1");
  }
  g_flops += static_cast<std::uint64_t>(a.size());
  Matrix<S> out = axis == 1 ? softmax_rows<S>(a.value())
                            : Matrix<S>(softmax_rows<S>(a.value().transpose()).transpose());
  return make_result<S>(out, {a.node()}, [out, axis](Node<S> & self) {
    if (axis == 1) {
      self.parents[0]->accumulate(softmax_rows_backward<S>(out, self.grad));
    } else {
      self.parents[0]->accumulate(
        softmax_rows_backward<S>(out.transpose(), self.grad.transpose()).transpose());
    }
  });
}

template <typename S>
Tensor<S> logsumexp_rows(const Tensor<S> & a)
{
  g_flops += static_cast<std::uint64_t>(a.size());
  Matrix<S> out(a.rows(), 1);
  for (Index i = 0; i < a.rows(); ++i) {
    const S m = a.value().row(i).maxCoeff();
    const double total = (a.value().row(i).array() - m).exp().template cast<double>().sum();
    out(i, 0) = m + static_cast<S>(std::log(total));
  }
  return make_result<S>(std::move(out), {a.node()}, [](Node<S> & self) {
    auto & p = *self.parents[0];
    Matrix<S> w = softmax_rows<S>(p.value);
    p.accumulate(w.array().colwise() * self.grad.col(0).array());
  });
}

template <typename S>
Tensor<S> sum(const Tensor<S> & a)
{
  Matrix<S> out(1, 1);
  out(0, 0) = static_cast<S>(accumulate_sum<S>(a.value()));
  return make_result<S>(std::move(out), {a.node()}, [](Node<S> & self) {
    auto & p = *self.parents[0];
    p.accumulate(Matrix<S>::Constant(p.value.rows(), p.value.cols(), self.grad(0, 0)));
  });
}

template <typename S>
Tensor<S> mean(const Tensor<S> & a)
{
  require(a.size() > 0, "mean: empty tensor");
  const double n = static_cast<double>(a.size());
  Matrix<S> out(1, 1);
  out(0, 0) = static_cast<S>(accumulate_sum<S>(a.value()) / n);
  return make_result<S>(std::move(out), {a.node()}, [n](Node<S> & self) {
    auto & p = *self.parents[0];
    p.accumulate(Matrix<S>::Constant(
      p.value.rows(), p.value.cols(), static_cast<S>(self.grad(0, 0) / n)));
  });
}

template <typename S>
Tensor<S> row_sum(const Tensor<S> & a)
{
  Matrix<S> out(a.rows(), 1);
  for (Index i = 0; i < a.rows(); ++i) {
    out(i, 0) = static_cast<S>(a.value().row(i).template cast<double>().sum());
  }
  return make_result<S>(std::move(out), {a.node()}, [](Node<S> & self) {
    auto & p = *self.parents[0];
    p.accumulate(self.grad.col(0).replicate(1, p.value.cols()));
  });
}

template <typename S>
Tensor<S> dropout(const Tensor<S> & a, double p, bool train, std::mt19937_64 & rng)
{
  if (p < 0.0 || p >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "dropout rate must lie in [0, 1)");
  }
  if (!train || p == 0.0) {
    return a;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const S keep_scale = static_cast<S>(1.0 / (1.0 - p));
  Matrix<S> mask(a.rows(), a.cols());
  for (Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = u(rng) < p ? S(0) : keep_scale;
  }
  Matrix<S> out = a.value().cwiseProduct(mask);
  return make_result<S>(std::move(out), {a.node()}, [mask](Node<S> & self) {
    self.parents[0]->accumulate(self.grad.cwiseProduct(mask));
  });
}

template <typename S>
Tensor<S> smooth_l1(const Tensor<S> & pred, const Tensor<S> & target)
{
  require_same_shape(pred, target, "smooth_l1");
  require(pred.size() > 0, "smooth_l1: empty tensor");
  const Matrix<S> diff = pred.value() - target.value();
  double total = 0.0;
  for (Index i = 0; i < diff.size(); ++i) {
    const double d = std::abs(static_cast<double>(diff.data()[i]));
    total += d < 1.0 ? 0.5 * d * d : d - 0.5;
  }
  const double n = static_cast<double>(diff.size());
  Matrix<S> out(1, 1);
  out(0, 0) = static_cast<S>(total / n);
  return make_result<S>(std::move(out), {pred.node(), target.node()}, [diff, n](Node<S> & self) {
    const Matrix<S> g =
      diff.cwiseMax(S(-1)).cwiseMin(S(1)) * static_cast<S>(self.grad(0, 0) / n);
    push_grad(*self.parents[0], g);
    push_grad<S>(*self.parents[1], -g);
  });
}

template <typename S>
Tensor<S> batch_norm(
  const Tensor<S> & x, const Tensor<S> & gamma, const Tensor<S> & beta, Tensor<S> & running_mean,
  Tensor<S> & running_var, bool train, const BatchNormOptions & options)
{
  const Index f = x.cols();
  require(
    gamma.rows() == 1 && gamma.cols() == f && beta.rows() == 1 && beta.cols() == f &&
      running_mean.cols() == f && running_var.cols() == f,
    "batch_norm: parameter width does not match " + std::to_string(f) + " features");
  require(x.rows() > 0, "batch_norm: empty batch");
  g_flops += static_cast<std::uint64_t>(x.size());
  const Index n = x.rows();
  Eigen::RowVectorXd mu(f), var(f);
  if (train) {
    const Eigen::MatrixXd xd = x.value().template cast<double>();
    mu = xd.colwise().mean();
    var = (xd.rowwise() - mu).array().square().colwise().mean();
    const double unbias = n > 1 ? static_cast<double>(n) / static_cast<double>(n - 1) : 1.0;
    auto & rm = running_mean.mutable_value();
    auto & rv = running_var.mutable_value();
    for (Index j = 0; j < f; ++j) {
      rm(0, j) = static_cast<S>((1.0 - options.momentum) * rm(0, j) + options.momentum * mu[j]);
      rv(0, j) =
        static_cast<S>((1.0 - options.momentum) * rv(0, j) + options.momentum * var[j] * unbias);
    }
  } else {
    mu = running_mean.value().row(0).template cast<double>();
    var = running_var.value().row(0).template cast<double>();
  }
  Matrix<S> inv_std(1, f);
  for (Index j = 0; j < f; ++j) {
    inv_std(0, j) = static_cast<S>(1.0 / std::sqrt(var[j] + options.eps));
  }
  const Matrix<S> mu_s = mu.template cast<S>();
  Matrix<S> x_hat = (x.value().rowwise() - mu_s.row(0)).array().rowwise() * inv_std.row(0).array();
  Matrix<S> out =
    (x_hat.array().rowwise() * gamma.value().row(0).array()).rowwise() + beta.value().row(0).array();
  return make_result<S>(
    std::move(out), {x.node(), gamma.node(), beta.node()},
    [x_hat, inv_std, train, n](Node<S> & self) {
      auto & px = *self.parents[0];
      auto & pg = *self.parents[1];
      auto & pb = *self.parents[2];
      const Matrix<S> & g = self.grad;
      if (pg.requires_grad) pg.accumulate(g.cwiseProduct(x_hat).colwise().sum());
      if (pb.requires_grad) pb.accumulate(g.colwise().sum());
      if (!px.requires_grad) return;
      const auto scale_row = (pg.value.array() * inv_std.array()).matrix();
      if (!train) {
        px.accumulate(g.array().rowwise() * scale_row.row(0).array());
        return;
      }
      const Matrix<S> g_sum = g.colwise().sum();
      const Matrix<S> gx_sum = g.cwiseProduct(x_hat).colwise().sum();
      Matrix<S> dx = (g * static_cast<S>(n)).rowwise() - g_sum.row(0);
      dx -= (x_hat.array().rowwise() * gx_sum.row(0).array()).matrix();
      dx = dx.array().rowwise() * (scale_row.row(0).array() / static_cast<S>(n));
      px.accumulate(dx);
    });
}

#define TRAJKIT_NN_INSTANTIATE(S)                                                                 \
  template struct Node<S>;                                                                        \
  template class Tensor<S>;                                                                       \
  template Tensor<S> matmul(const Tensor<S> &, const Tensor<S> &);                                \
  template Tensor<S> add(const Tensor<S> &, const Tensor<S> &);                                   \
  template Tensor<S> add_row(const Tensor<S> &, const Tensor<S> &);                               \
  template Tensor<S> sub(const Tensor<S> &, const Tensor<S> &);                                   \
  template Tensor<S> mul(const Tensor<S> &, const Tensor<S> &);                                   \
  template Tensor<S> scale(const Tensor<S> &, S);                                                 \
  template Tensor<S> add_scalar(const Tensor<S> &, S);                                            \
  template Tensor<S> concat_cols(const std::vector<Tensor<S>> &);                                 \
  template Tensor<S> concat_rows(const std::vector<Tensor<S>> &);                                 \
  template Tensor<S> slice_cols(const Tensor<S> &, Index, Index);                                 \
  template Tensor<S> slice_rows(const Tensor<S> &, Index, Index);                                 \
  template Tensor<S> gather_rows(const Tensor<S> &, const std::vector<Index> &);                  \
  template Tensor<S> scatter_add_rows(const Tensor<S> &, const std::vector<Index> &, Index);      \
  template Tensor<S> reshape(const Tensor<S> &, Index, Index);                                    \
  template Tensor<S> transpose(const Tensor<S> &);                                                \
  template Tensor<S> relu(const Tensor<S> &);                                                     \
  template Tensor<S> sigmoid(const Tensor<S> &);                                                  \
  template Tensor<S> softplus(const Tensor<S> &);                                                 \
  template Tensor<S> tanh(const Tensor<S> &);                                                     \
  template Tensor<S> exp(const Tensor<S> &);                                                      \
  template Tensor<S> log_clamped(const Tensor<S> &, S);                                           \
  template Tensor<S> square(const Tensor<S> &);                                                   \
  template Tensor<S> softmax(const Tensor<S> &, int);                                             \
  template Tensor<S> logsumexp_rows(const Tensor<S> &);                                           \
  template Tensor<S> sum(const Tensor<S> &);                                                      \
  template Tensor<S> mean(const Tensor<S> &);                                                     \
  template Tensor<S> row_sum(const Tensor<S> &);                                                  \
  template Tensor<S> dropout(const Tensor<S> &, double, bool, std::mt19937_64 &);                 \
  template Tensor<S> smooth_l1(const Tensor<S> &, const Tensor<S> &);                             \
  template Tensor<S> batch_norm(                                                                  \
    const Tensor<S> &, const Tensor<S> &, const Tensor<S> &, Tensor<S> &, Tensor<S> &, bool,      \
    const BatchNormOptions &);

TRAJKIT_NN_INSTANTIATE(float)
TRAJKIT_NN_INSTANTIATE(double)

#undef TRAJKIT_NN_INSTANTIATE

}  // namespace trajkit::nn
