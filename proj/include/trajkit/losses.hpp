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

#ifndef TRAJKIT__LOSSES_HPP_
#define TRAJKIT__LOSSES_HPP_

#include "trajkit/nn/tensor.hpp"

#include <vector>

namespace trajkit
{

struct LossWeights
{
  double alpha = 1.0;
  double beta = 0.1;
  double gamma = 0.65;
  double epsilon_margin = 1e-4;

  /// Throws InvalidArgument on a negative entry.
  void validate() const;
  /// NLL only.
  LossWeights first_stage() const { return {alpha, 0.0, 0.0, epsilon_margin}; }
};

inline constexpr double kConfidenceFloor = 1e-12;

/**
 * @brief Batch-mean negative log-likelihood of a unit-covariance Gaussian
 * mixture:
 *   -log sum_m exp(log max(c_m, floor) - 0.5 * sum_t |y_hat_mt - y_t|^2).
 *
 * @param positions (k*B) x 2T mode-major trajectories
 * @param confidences B x k
 * @param gt B x 2T
 */
template <typename Scalar>
nn::Tensor<Scalar> nll_loss(
  const nn::Tensor<Scalar> & positions, const nn::Tensor<Scalar> & confidences,
  const nn::Matrix<Scalar> & gt);

template <typename Scalar>
struct WtaHinge
{
  nn::Tensor<Scalar> wta;
  nn::Tensor<Scalar> hinge;
  std::vector<Eigen::Index> winners;
};

/**
 * @brief Winner-takes-all smooth L1 on the mode with the closest end point
 * (ties to the lowest index) and the confidence margin hinge
 * (1/(k-1)) sum_{m != m*} max(0, c_m + eps - c_{m*}); both batch means.
 */
template <typename Scalar>
WtaHinge<Scalar> wta_hinge(
  const nn::Tensor<Scalar> & positions, const nn::Tensor<Scalar> & confidences,
  const nn::Matrix<Scalar> & gt, double epsilon_margin);

template <typename Scalar>
struct LossParts
{
  nn::Tensor<Scalar> nll;
  nn::Tensor<Scalar> hinge;
  nn::Tensor<Scalar> wta;
  nn::Tensor<Scalar> total;
};

template <typename Scalar>
nn::Tensor<Scalar> combined_loss(
  const nn::Tensor<Scalar> & nll, const nn::Tensor<Scalar> & hinge, const nn::Tensor<Scalar> & wta,
  const LossWeights & weights);

double combined_loss(double nll, double hinge, double wta, const LossWeights & weights);

/// All parts for one forward output; the regularizers are skipped (zero)
/// when their weights are zero.
template <typename Scalar>
LossParts<Scalar> compute_losses(
  const nn::Tensor<Scalar> & positions, const nn::Tensor<Scalar> & confidences,
  const nn::Matrix<Scalar> & gt, const LossWeights & weights);

}  // namespace trajkit

#endif  // TRAJKIT__LOSSES_HPP_
