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

#include "trajkit/nn/adam.hpp"

#include "trajkit/error.hpp"

#include <cmath>

namespace trajkit::nn
{

template <typename S>
Adam<S>::Adam(std::vector<Tensor<S>> params, AdamOptions options)
: params_(std::move(params)), options_(options)
{
  if (!(options_.lr > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "learning rate must be positive");
  }
  for (const auto & p : params_) {
    m_.push_back(Matrix<S>::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix<S>::Zero(p.rows(), p.cols()));
  }
}

template <typename S>
void Adam<S>::step()
{
  ++t_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto & p = params_[k];
    if (!p.has_grad()) {
      continue;
    }
    const Matrix<S> g = p.grad();
    if (g.rows() != m_[k].rows() || g.cols() != m_[k].cols()) {
      throw Error(ErrorCode::ShapeMismatch, "parameter reshaped after optimizer construction");
    }
    auto & value = p.mutable_value();
    for (Index i = 0; i < g.size(); ++i) {
      const double gi = static_cast<double>(g.data()[i]);
      const double m = b1 * static_cast<double>(m_[k].data()[i]) + (1.0 - b1) * gi;
      const double v = b2 * static_cast<double>(v_[k].data()[i]) + (1.0 - b2) * gi * gi;
      m_[k].data()[i] = static_cast<S>(m);
      v_[k].data()[i] = static_cast<S>(v);
      const double update = options_.lr * (m / c1) / (std::sqrt(v / c2) + options_.eps);
      value.data()[i] = static_cast<S>(static_cast<double>(value.data()[i]) - update);
    }
  }
}

template <typename S>
void Adam<S>::zero_grad()
{
  for (auto & p : params_) {
    p.zero_grad();
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace trajkit::nn
