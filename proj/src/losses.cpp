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

#include "trajkit/losses.hpp"

#include "trajkit/error.hpp"

namespace trajkit
{

using nn::Tensor;
using Eigen::Index;

void LossWeights::validate() const
{
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0 || epsilon_margin < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "loss weights must be non-negative");
  }
}

namespace
{

template <typename S>
Index check_shapes(const Tensor<S> & positions, const Tensor<S> & confidences, const nn::Matrix<S> & gt)
{
  const Index b = gt.rows();
  const Index k = confidences.cols();
  if (b < 1 || confidences.rows() != b || positions.rows() != k * b || positions.cols() != gt.cols() ||
      gt.cols() % 2 != 0) {
    throw Error(ErrorCode::ShapeMismatch, "loss inputs disagree on batch, modes or horizon");
  }
  return k;
}

}  // namespace

template <typename S>
Tensor<S> nll_loss(const Tensor<S> & positions, const Tensor<S> & confidences, const nn::Matrix<S> & gt)
{
  const Index k = check_shapes(positions, confidences, gt);
  const Index b = gt.rows();
  const Tensor<S> target(gt);
  std::vector<Tensor<S>> errors;
  for (Index m = 0; m < k; ++m) {
    errors.push_back(nn::row_sum(nn::square(nn::sub(nn::slice_rows(positions, m * b, b), target))));
  }
  const Tensor<S> logits = nn::sub(
    nn::log_clamped(confidences, static_cast<S>(kConfidenceFloor)),
    nn::scale(nn::concat_cols(errors), S(0.5)));
  return nn::scale(nn::mean(nn::logsumexp_rows(logits)), S(-1));
}

template <typename S>
WtaHinge<S> wta_hinge(
  const Tensor<S> & positions, const Tensor<S> & confidences, const nn::Matrix<S> & gt,
  double epsilon_margin)
{
  const Index k = check_shapes(positions, confidences, gt);
  const Index b = gt.rows();
  const Index last = gt.cols() - 2;
  WtaHinge<S> out;
  std::vector<Index> winner_rows;
  for (Index i = 0; i < b; ++i) {
    Index best = 0;
    double best_d = 0.0;
    for (Index m = 0; m < k; ++m) {
      const double dx = static_cast<double>(positions.value()(m * b + i, last) - gt(i, last));
      const double dy = static_cast<double>(positions.value()(m * b + i, last + 1) - gt(i, last + 1));
      const double d = std::sqrt(dx * dx + dy * dy);
      if (m == 0 || d < best_d) {
        best = m;
        best_d = d;
      }
    }
    out.winners.push_back(best);
    winner_rows.push_back(best * b + i);
  }
  out.wta = nn::smooth_l1(nn::gather_rows(positions, winner_rows), Tensor<S>(gt));

  if (k == 1) {
    out.hinge = Tensor<S>::zeros(1, 1);
    return out;
  }
  std::vector<Index> flat_winners;
  nn::Matrix<S> others = nn::Matrix<S>::Ones(b, k);
  for (Index i = 0; i < b; ++i) {
    flat_winners.push_back(i * k + out.winners[static_cast<std::size_t>(i)]);
    others(i, out.winners[static_cast<std::size_t>(i)]) = S(0);
  }
  const Tensor<S> winner_conf = nn::gather_rows(nn::reshape(confidences, b * k, 1), flat_winners);
  const Tensor<S> spread = nn::matmul(winner_conf, Tensor<S>(nn::Matrix<S>::Ones(1, k)));
  const Tensor<S> margins = nn::relu(
    nn::add_scalar(nn::sub(confidences, spread), static_cast<S>(epsilon_margin)));
  out.hinge = nn::scale(
    nn::sum(nn::mul(margins, Tensor<S>(others))), static_cast<S>(1.0 / (static_cast<double>(k - 1) * b)));
  return out;
}

template <typename S>
Tensor<S> combined_loss(
  const Tensor<S> & nll, const Tensor<S> & hinge, const Tensor<S> & wta, const LossWeights & w)
{
  w.validate();
  return nn::add(
    nn::add(nn::scale(nll, static_cast<S>(w.alpha)), nn::scale(hinge, static_cast<S>(w.beta))),
    nn::scale(wta, static_cast<S>(w.gamma)));
}

double combined_loss(double nll, double hinge, double wta, const LossWeights & w)
{
  w.validate();
  return w.alpha * nll + w.beta * hinge + w.gamma * wta;
}

template <typename S>
LossParts<S> compute_losses(
  const Tensor<S> & positions, const Tensor<S> & confidences, const nn::Matrix<S> & gt,
  const LossWeights & weights)
{
  LossParts<S> parts;
  parts.nll = nll_loss(positions, confidences, gt);
  if (weights.beta > 0.0 || weights.gamma > 0.0) {
    auto reg = wta_hinge(positions, confidences, gt, weights.epsilon_margin);
    parts.hinge = reg.hinge;
    parts.wta = reg.wta;
  } else {
    parts.hinge = Tensor<S>::zeros(1, 1);
    parts.wta = Tensor<S>::zeros(1, 1);
  }
  parts.total = combined_loss(parts.nll, parts.hinge, parts.wta, weights);
  return parts;
}

#define TRAJKIT_LOSSES_INSTANTIATE(S)                                                           \
  template Tensor<S> nll_loss(const Tensor<S> &, const Tensor<S> &, const nn::Matrix<S> &);     \
  template WtaHinge<S> wta_hinge(                                                               \
    const Tensor<S> &, const Tensor<S> &, const nn::Matrix<S> &, double);                       \
  template Tensor<S> combined_loss(                                                             \
    const Tensor<S> &, const Tensor<S> &, const Tensor<S> &, const LossWeights &);              \
  template LossParts<S> compute_losses(                                                         \
    const Tensor<S> &, const Tensor<S> &, const nn::Matrix<S> &, const LossWeights &);

TRAJKIT_LOSSES_INSTANTIATE(float)
TRAJKIT_LOSSES_INSTANTIATE(double)

#undef TRAJKIT_LOSSES_INSTANTIATE

}  // namespace trajkit
