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

#ifndef TRAJKIT__NN__TENSOR_HPP_
#define TRAJKIT__NN__TENSOR_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

namespace trajkit::nn
{

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Index = Eigen::Index;

template <typename Scalar>
struct Node
{
  Matrix<Scalar> value;
  Matrix<Scalar> grad;  // empty until first accumulation
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node &)> backward_fn;

  void accumulate(const Matrix<Scalar> & delta);
};

/**
 * @brief Dense 2-D matrix handle taking part in reverse-mode differentiation.
 *
 * Copies share the underlying node, so a parameter held by a layer and by an
 * optimizer is the same storage.
 */
template <typename Scalar>
class Tensor
{
public:
  using Mat = Matrix<Scalar>;

  Tensor();
  explicit Tensor(Mat value, bool requires_grad = false);

  static Tensor zeros(Index rows, Index cols, bool requires_grad = false);
  static Tensor from_node(std::shared_ptr<Node<Scalar>> node);

  const Mat & value() const { return node_->value; }
  Mat & mutable_value() { return node_->value; }
  /// Zero matrix of the value's shape when no gradient has reached this tensor.
  Mat grad() const;
  bool has_grad() const { return node_->grad.size() > 0; }
  void zero_grad() { node_->grad.resize(0, 0); }

  bool requires_grad() const { return node_->requires_grad; }
  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  Index size() const { return node_->value.size(); }

  /// Value of a 1x1 tensor; throws NotScalar otherwise.
  Scalar item() const;

  /**
   * @brief Reverse sweep from this scalar. Leaf gradients accumulate across
   * calls; intermediate gradients are reset first.
   */
  void backward() const;

  const std::shared_ptr<Node<Scalar>> & node() const { return node_; }

private:
  std::shared_ptr<Node<Scalar>> node_;
};

/// Disables tape recording on the current thread while alive.
class NoGradGuard
{
public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard & operator=(const NoGradGuard &) = delete;

private:
  bool previous_;
};

bool grad_enabled();

/// Thread-local count of forward FLOPs: one per multiply-accumulate in
/// matmul, one per element for nonlinear maps and normalization.
std::uint64_t & flop_counter();

template <typename S> Tensor<S> matmul(const Tensor<S> & a, const Tensor<S> & b);
template <typename S> Tensor<S> add(const Tensor<S> & a, const Tensor<S> & b);
/// a (n x c) plus row vector b (1 x c) broadcast over rows.
template <typename S> Tensor<S> add_row(const Tensor<S> & a, const Tensor<S> & b);
template <typename S> Tensor<S> sub(const Tensor<S> & a, const Tensor<S> & b);
template <typename S> Tensor<S> mul(const Tensor<S> & a, const Tensor<S> & b);
template <typename S> Tensor<S> scale(const Tensor<S> & a, S factor);
template <typename S> Tensor<S> add_scalar(const Tensor<S> & a, S offset);
template <typename S> Tensor<S> concat_cols(const std::vector<Tensor<S>> & parts);
template <typename S> Tensor<S> concat_rows(const std::vector<Tensor<S>> & parts);
template <typename S> Tensor<S> slice_cols(const Tensor<S> & a, Index start, Index count);
template <typename S> Tensor<S> slice_rows(const Tensor<S> & a, Index start, Index count);
template <typename S> Tensor<S> gather_rows(const Tensor<S> & a, const std::vector<Index> & rows);
/// out.row(index[i]) += a.row(i) for an output with @p out_rows rows.
template <typename S>
Tensor<S> scatter_add_rows(const Tensor<S> & a, const std::vector<Index> & index, Index out_rows);
/// Reinterpret the row-major data with a new shape of the same size.
template <typename S> Tensor<S> reshape(const Tensor<S> & a, Index rows, Index cols);
template <typename S> Tensor<S> transpose(const Tensor<S> & a);
template <typename S> Tensor<S> relu(const Tensor<S> & a);
template <typename S> Tensor<S> sigmoid(const Tensor<S> & a);
template <typename S> Tensor<S> softplus(const Tensor<S> & a);
template <typename S> Tensor<S> tanh(const Tensor<S> & a);
template <typename S> Tensor<S> exp(const Tensor<S> & a);
/// log(max(a, floor)); the gradient is zero where the floor is active.
template <typename S> Tensor<S> log_clamped(const Tensor<S> & a, S floor);
template <typename S> Tensor<S> square(const Tensor<S> & a);
/// axis 1 normalizes each row, axis 0 each column. -inf entries map to 0.
template <typename S> Tensor<S> softmax(const Tensor<S> & a, int axis = 1);
/// Per-row log-sum-exp with max shift; n x 1.
template <typename S> Tensor<S> logsumexp_rows(const Tensor<S> & a);
template <typename S> Tensor<S> sum(const Tensor<S> & a);
template <typename S> Tensor<S> mean(const Tensor<S> & a);
/// n x 1 row sums.
template <typename S> Tensor<S> row_sum(const Tensor<S> & a);
/// Inverted dropout; identity when @p train is false or @p p is 0.
template <typename S>
Tensor<S> dropout(const Tensor<S> & a, double p, bool train, std::mt19937_64 & rng);
/// Mean smooth L1 (beta 1) over all elements.
template <typename S> Tensor<S> smooth_l1(const Tensor<S> & pred, const Tensor<S> & target);

struct BatchNormOptions
{
  double momentum = 0.1;
  double eps = 1e-5;
};

/**
 * @brief Per-column normalization over the rows of @p x.
 *
 * In training mode the batch statistics are used and the running buffers are
 * updated in place (unbiased variance); otherwise the running statistics are
 * applied.
 */
template <typename S>
Tensor<S> batch_norm(
  const Tensor<S> & x, const Tensor<S> & gamma, const Tensor<S> & beta, Tensor<S> & running_mean,
  Tensor<S> & running_var, bool train, const BatchNormOptions & options = {});

}  // namespace trajkit::nn

#endif  // TRAJKIT__NN__TENSOR_HPP_
