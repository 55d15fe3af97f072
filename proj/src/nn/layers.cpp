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

#include "trajkit/nn/layers.hpp"

#include "trajkit/error.hpp"

#include <algorithm>
#include <cmath>

namespace trajkit::nn
{

template <typename S>
void ParameterSet<S>::check_unique(const std::string & name) const
{
  if (find(name) != nullptr) {
    throw Error(ErrorCode::InvalidArgument, "duplicate parameter name '" + name + "'");
  }
}

template <typename S>
Tensor<S> ParameterSet<S>::add_parameter(
  const std::string & name, Index rows, Index cols, double bound)
{
  check_unique(name);
  std::uniform_real_distribution<double> u(-bound, bound);
  Matrix<S> value(rows, cols);
  for (Index i = 0; i < value.size(); ++i) {
    value.data()[i] = static_cast<S>(u(rng_));
  }
  Tensor<S> t(std::move(value), true);
  entries_.push_back({name, t, EntryKind::Parameter});
  return t;
}

template <typename S>
Tensor<S> ParameterSet<S>::add_constant_parameter(
  const std::string & name, Index rows, Index cols, S value)
{
  check_unique(name);
  Tensor<S> t(Matrix<S>::Constant(rows, cols, value), true);
  entries_.push_back({name, t, EntryKind::Parameter});
  return t;
}

template <typename S>
Tensor<S> ParameterSet<S>::add_buffer(const std::string & name, Index rows, Index cols, S value)
{
  check_unique(name);
  Tensor<S> t(Matrix<S>::Constant(rows, cols, value), false);
  entries_.push_back({name, t, EntryKind::Buffer});
  return t;
}

template <typename S>
std::vector<Tensor<S>> ParameterSet<S>::parameters() const
{
  std::vector<Tensor<S>> out;
  for (const auto & e : entries_) {
    if (e.kind == EntryKind::Parameter) {
      out.push_back(e.tensor);
    }
  }
  return out;
}

template <typename S>
const NamedTensor<S> * ParameterSet<S>::find(const std::string & name) const
{
  auto it = std::find_if(
    entries_.begin(), entries_.end(), [&](const auto & e) { return e.name == name; });
  return it == entries_.end() ? nullptr : &*it;
}

template <typename S>
std::size_t ParameterSet<S>::count_params() const
{
  std::size_t total = 0;
  for (const auto & e : entries_) {
    if (e.kind == EntryKind::Parameter) {
      total += static_cast<std::size_t>(e.tensor.size());
    }
  }
  return total;
}

template <typename S>
void ParameterSet<S>::zero_grad()
{
  for (auto & e : entries_) {
    e.tensor.zero_grad();
  }
}

template <typename S>
Linear<S>::Linear(ParameterSet<S> & params, const std::string & name, Index in, Index out)
{
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  weight_ = params.add_parameter(name + ".weight", in, out, bound);
  bias_ = params.add_parameter(name + ".bias", 1, out, bound);
}

template <typename S>
Tensor<S> Linear<S>::operator()(const Tensor<S> & x) const
{
  return add_row(matmul(x, weight_), bias_);
}

template <typename S>
LstmCell<S>::LstmCell(ParameterSet<S> & params, const std::string & name, Index in, Index hidden)
{
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  w_ih_ = params.add_parameter(name + ".weight_ih", in, 4 * hidden, bound);
  w_hh_ = params.add_parameter(name + ".weight_hh", hidden, 4 * hidden, bound);
  bias_ = params.add_parameter(name + ".bias", 1, 4 * hidden, bound);
}

template <typename S>
LstmState<S> LstmCell<S>::zero_state(Index rows) const
{
  return {Tensor<S>::zeros(rows, hidden_size()), Tensor<S>::zeros(rows, hidden_size())};
}

template <typename S>
LstmState<S> LstmCell<S>::operator()(const Tensor<S> & x, const LstmState<S> & state) const
{
  const Index h = hidden_size();
  const Tensor<S> gates = add_row(add(matmul(x, w_ih_), matmul(state.h, w_hh_)), bias_);
  const Tensor<S> i = sigmoid(slice_cols(gates, 0, h));
  const Tensor<S> f = sigmoid(slice_cols(gates, h, h));
  const Tensor<S> g = tanh(slice_cols(gates, 2 * h, h));
  const Tensor<S> o = sigmoid(slice_cols(gates, 3 * h, h));
  const Tensor<S> c = add(mul(f, state.c), mul(i, g));
  return {mul(o, tanh(c)), c};
}

template <typename S>
BatchNorm<S>::BatchNorm(ParameterSet<S> & params, const std::string & name, Index features)
{
  gamma_ = params.add_constant_parameter(name + ".weight", 1, features, S(1));
  beta_ = params.add_constant_parameter(name + ".bias", 1, features, S(0));
  running_mean_ = params.add_buffer(name + ".running_mean", 1, features, S(0));
  running_var_ = params.add_buffer(name + ".running_var", 1, features, S(1));
}

template <typename S>
Tensor<S> BatchNorm<S>::operator()(const Tensor<S> & x, bool train) const
{
  return batch_norm(x, gamma_, beta_, running_mean_, running_var_, train);
}

template <typename S>
MlpEncoder<S>::MlpEncoder(
  ParameterSet<S> & params, const std::string & name, Index in, Index hidden, Index out,
  double dropout_rate)
: fc1_(params, name + ".fc1", in, hidden),
  fc2_(params, name + ".fc2", hidden, hidden),
  fc3_(params, name + ".fc3", hidden, out),
  bn1_(params, name + ".bn1", hidden),
  bn2_(params, name + ".bn2", hidden),
  dropout_rate_(dropout_rate)
{
}

template <typename S>
Tensor<S> MlpEncoder<S>::operator()(const Tensor<S> & x, bool train, std::mt19937_64 & rng) const
{
  Tensor<S> y = dropout(relu(bn1_(fc1_(x), train)), dropout_rate_, train, rng);
  y = relu(bn2_(fc2_(y), train));
  return fc3_(y);
}

template class ParameterSet<float>;
template class ParameterSet<double>;
template class Linear<float>;
template class Linear<double>;
template class LstmCell<float>;
template class LstmCell<double>;
template class BatchNorm<float>;
template class BatchNorm<double>;
template class MlpEncoder<float>;
template class MlpEncoder<double>;

}  // namespace trajkit::nn
