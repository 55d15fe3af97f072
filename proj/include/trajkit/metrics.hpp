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

#ifndef TRAJKIT__METRICS_HPP_
#define TRAJKIT__METRICS_HPP_

#include "trajkit/map_prior.hpp"
#include "trajkit/scenario.hpp"

#include <Eigen/Core>

#include <vector>

namespace trajkit
{

/**
 * @brief Modes considered for a k_eval budget: the k_eval most confident
 * ones (ties to the lower index), so k_eval = 1 is the argmax mode and
 * k_eval = k is every mode.
 */
std::vector<int> selected_modes(const Eigen::VectorXd & confidences, int k_eval);

double ade(const Polyline & gt, const Polyline & pred);
double fde(const Polyline & gt, const Polyline & pred);

double min_ade(
  const Polyline & gt, const std::vector<Polyline> & preds, const Eigen::VectorXd & confidences,
  int k_eval);
double min_fde(
  const Polyline & gt, const std::vector<Polyline> & preds, const Eigen::VectorXd & confidences,
  int k_eval);

struct ErrorStats
{
  double mean = 0.0;
  double median = 0.0;
  std::size_t count = 0;
};

/// Median averages the two middle values for an even count.
ErrorStats summarize(std::vector<double> values);

/**
 * @brief Distance from each ground-truth end point to the closest valid
 * centerline end point, summarized. Scenarios without a valid centerline are
 * skipped; EmptySet when none remain.
 */
ErrorStats endpoint_error_stats(
  const std::vector<CenterlinePrior> & priors, const std::vector<Point2> & gt_endpoints);

/// Running accumulator of the four benchmark numbers.
struct MetricTotals
{
  double ade_k1 = 0.0;
  double fde_k1 = 0.0;
  double ade_k6 = 0.0;
  double fde_k6 = 0.0;
  std::size_t n = 0;

  void add(const Polyline & gt, const std::vector<Polyline> & preds, const Eigen::VectorXd & conf);
  double mean_ade_k1() const { return n ? ade_k1 / static_cast<double>(n) : 0.0; }
  double mean_fde_k1() const { return n ? fde_k1 / static_cast<double>(n) : 0.0; }
  double mean_ade_k6() const { return n ? ade_k6 / static_cast<double>(n) : 0.0; }
  double mean_fde_k6() const { return n ? fde_k6 / static_cast<double>(n) : 0.0; }
};

}  // namespace trajkit

#endif  // TRAJKIT__METRICS_HPP_
