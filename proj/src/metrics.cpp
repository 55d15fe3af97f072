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

#include "trajkit/metrics.hpp"

#include "trajkit/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace trajkit
{

std::vector<int> selected_modes(const Eigen::VectorXd & confidences, int k_eval)
{
  const int k = static_cast<int>(confidences.size());
  if (k_eval < 1 || k_eval > k) {
    throw Error(
      ErrorCode::ShapeMismatch,
      "k_eval " + std::to_string(k_eval) + " outside [1, " + std::to_string(k) + "]");
  }
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return confidences[a] > confidences[b];
  });
  order.resize(static_cast<std::size_t>(k_eval));
  return order;
}

namespace
{

void check_pair(const Polyline & gt, const Polyline & pred)
{
  if (gt.rows() != pred.rows() || gt.rows() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and ground truth lengths differ");
  }
}

template <typename Fn>
double min_over_modes(
  const Polyline & gt, const std::vector<Polyline> & preds, const Eigen::VectorXd & confidences,
  int k_eval, Fn metric)
{
  if (preds.size() != static_cast<std::size_t>(confidences.size())) {
    throw Error(ErrorCode::ShapeMismatch, "one confidence per mode is required");
  }
  double best = std::numeric_limits<double>::infinity();
  for (int m : selected_modes(confidences, k_eval)) {
    best = std::min(best, metric(gt, preds[static_cast<std::size_t>(m)]));
  }
  return best;
}

}  // namespace

double ade(const Polyline & gt, const Polyline & pred)
{
  check_pair(gt, pred);
  return (pred - gt).rowwise().norm().mean();
}

double fde(const Polyline & gt, const Polyline & pred)
{
  check_pair(gt, pred);
  return (pred.row(pred.rows() - 1) - gt.row(gt.rows() - 1)).norm();
}

double min_ade(
  const Polyline & gt, const std::vector<Polyline> & preds, const Eigen::VectorXd & confidences,
  int k_eval)
{
  return min_over_modes(gt, preds, confidences, k_eval, ade);
}

double min_fde(
  const Polyline & gt, const std::vector<Polyline> & preds, const Eigen::VectorXd & confidences,
  int k_eval)
{
  return min_over_modes(gt, preds, confidences, k_eval, fde);
}

ErrorStats summarize(std::vector<double> values)
{
  if (values.empty()) {
    throw Error(ErrorCode::EmptySet, "no values to summarize");
  }
  ErrorStats s;
  s.count = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return s;
}

ErrorStats endpoint_error_stats(
  const std::vector<CenterlinePrior> & priors, const std::vector<Point2> & gt_endpoints)
{
  if (priors.size() != gt_endpoints.size()) {
    throw Error(ErrorCode::ShapeMismatch, "one ground-truth end point per prior is required");
  }
  std::vector<double> errors;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    const auto & p = priors[i];
    for (std::size_t c = 0; c < p.centerlines.size(); ++c) {
      if (p.valid[c]) {
        const auto & line = p.centerlines[c];
        best = std::min(best, (line.row(line.rows() - 1).transpose() - gt_endpoints[i]).norm());
      }
    }
    if (std::isfinite(best)) {
      errors.push_back(best);
    }
  }
  return summarize(std::move(errors));
}

void MetricTotals::add(
  const Polyline & gt, const std::vector<Polyline> & preds, const Eigen::VectorXd & conf)
{
  const int k = static_cast<int>(preds.size());
  ade_k1 += min_ade(gt, preds, conf, 1);
  fde_k1 += min_fde(gt, preds, conf, 1);
  ade_k6 += min_ade(gt, preds, conf, k);
  fde_k6 += min_fde(gt, preds, conf, k);
  ++n;
}

}  // namespace trajkit
