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

#ifndef TRAJKIT__NN__ADAM_HPP_
#define TRAJKIT__NN__ADAM_HPP_

#include "trajkit/nn/tensor.hpp"

#include <vector>

namespace trajkit::nn
{

struct AdamOptions
{
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction; moment state is kept per parameter.
template <typename Scalar>
class Adam
{
public:
  Adam(std::vector<Tensor<Scalar>> params, AdamOptions options = {});

  /// One update from the gradients currently stored on the parameters.
  void step();
  void zero_grad();

  double lr() const { return options_.lr; }
  void set_lr(double lr) { options_.lr = lr; }
  long step_count() const { return t_; }

private:
  std::vector<Tensor<Scalar>> params_;
  std::vector<Matrix<Scalar>> m_;
  std::vector<Matrix<Scalar>> v_;
  AdamOptions options_;
  long t_ = 0;
};

}  // namespace trajkit::nn

#endif  // TRAJKIT__NN__ADAM_HPP_
