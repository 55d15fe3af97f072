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

#ifndef TRAJKIT__NN__LAYERS_HPP_
#define TRAJKIT__NN__LAYERS_HPP_

#include "trajkit/nn/tensor.hpp"

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace trajkit::nn
{

enum class EntryKind { Parameter, Buffer };

template <typename Scalar>
struct NamedTensor
{
  std::string name;
  Tensor<Scalar> tensor;
  EntryKind kind = EntryKind::Parameter;
};

/**
 * @brief Registry of a model's learnable parameters and persistent buffers,
 * in registration order. Names are unique.
 */
template <typename Scalar>
class ParameterSet
{
public:
  explicit ParameterSet(std::uint64_t seed = 0) : rng_(seed) {}

  /// Uniform(-bound, bound) initialization; InvalidArgument on a duplicate name.
  Tensor<Scalar> add_parameter(const std::string & name, Index rows, Index cols, double bound);
  Tensor<Scalar> add_constant_parameter(
    const std::string & name, Index rows, Index cols, Scalar value);
  Tensor<Scalar> add_buffer(const std::string & name, Index rows, Index cols, Scalar value);

  const std::vector<NamedTensor<Scalar>> & entries() const { return entries_; }
  std::vector<Tensor<Scalar>> parameters() const;
  /// nullptr when absent.
  const NamedTensor<Scalar> * find(const std::string & name) const;

  /// Element count of entries of kind Parameter.
  std::size_t count_params() const;
  void zero_grad();

  std::mt19937_64 & rng() { return rng_; }

private:
  void check_unique(const std::string & name) const;

  std::vector<NamedTensor<Scalar>> entries_;
  std::mt19937_64 rng_;
};

/// y = x W + b with W stored in x out.
template <typename Scalar>
class Linear
{
public:
  Linear() = default;
  Linear(ParameterSet<Scalar> & params, const std::string & name, Index in, Index out);

  Tensor<Scalar> operator()(const Tensor<Scalar> & x) const;

  Index in_features() const { return weight_.rows(); }
  Index out_features() const { return weight_.cols(); }
  const Tensor<Scalar> & weight() const { return weight_; }
  const Tensor<Scalar> & bias() const { return bias_; }

private:
  Tensor<Scalar> weight_;
  Tensor<Scalar> bias_;
};

template <typename Scalar>
struct LstmState
{
  Tensor<Scalar> h;
  Tensor<Scalar> c;
};

/**
 * @brief Single LSTM cell, gates ordered input, forget, cell, output.
 *
 * Rows are independent sequences sharing the same weights.
 */
template <typename Scalar>
class LstmCell
{
public:
  LstmCell() = default;
  LstmCell(ParameterSet<Scalar> & params, const std::string & name, Index in, Index hidden);

  LstmState<Scalar> operator()(const Tensor<Scalar> & x, const LstmState<Scalar> & state) const;
  LstmState<Scalar> zero_state(Index rows) const;

  Index input_size() const { return w_ih_.rows(); }
  Index hidden_size() const { return w_hh_.rows(); }

private:
  Tensor<Scalar> w_ih_;
  Tensor<Scalar> w_hh_;
  Tensor<Scalar> bias_;
};

template <typename Scalar>
class BatchNorm
{
public:
  BatchNorm() = default;
  BatchNorm(ParameterSet<Scalar> & params, const std::string & name, Index features);

  Tensor<Scalar> operator()(const Tensor<Scalar> & x, bool train) const;

private:
  Tensor<Scalar> gamma_;
  Tensor<Scalar> beta_;
  mutable Tensor<Scalar> running_mean_;
  mutable Tensor<Scalar> running_var_;
};

/**
 * @brief Three-layer encoder: Linear, BN, ReLU, dropout, Linear, BN, ReLU, Linear.
 */
template <typename Scalar>
class MlpEncoder
{
public:
  MlpEncoder() = default;
  MlpEncoder(
    ParameterSet<Scalar> & params, const std::string & name, Index in, Index hidden, Index out,
    double dropout_rate);

  Tensor<Scalar> operator()(const Tensor<Scalar> & x, bool train, std::mt19937_64 & rng) const;

private:
  Linear<Scalar> fc1_, fc2_, fc3_;
  BatchNorm<Scalar> bn1_, bn2_;
  double dropout_rate_ = 0.0;
};

}  // namespace trajkit::nn

#endif  // TRAJKIT__NN__LAYERS_HPP_
