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

#ifndef TRAJKIT__TRAINING_HPP_
#define TRAJKIT__TRAINING_HPP_

#include "trajkit/batch.hpp"
#include "trajkit/losses.hpp"
#include "trajkit/metrics.hpp"
#include "trajkit/predictor.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace trajkit
{

struct AugmentPolicy
{
  double p_drop = 0.1;
  double p_swap = 0.05;
  double sigma = 0.2;
};

/**
 * @brief Perturb the observed frames of every agent: interior points are
 * replaced by the midpoint of their neighbors with p_drop, points are swapped
 * with their successor with p_swap, then Gaussian noise is added per axis.
 * The future is untouched.
 */
SceneSample augment(const SceneSample & sample, const AugmentPolicy & policy, std::uint64_t seed);

/**
 * @brief Sampling weights: the floor(fraction * n) scenes with the largest
 * error get weight 2, the rest 1 (ties favor the lower index).
 */
std::vector<double> hard_mining_weights(const std::vector<double> & errors, double fraction);

/// Reduce-on-plateau for a metric that should decrease.
class PlateauScheduler
{
public:
  PlateauScheduler(double factor = 0.5, int patience = 5) : factor_(factor), patience_(patience) {}

  /// Returns true when this observation triggered a reduction of @p lr.
  bool observe(double metric, double & lr);
  int num_reductions() const { return reductions_; }

private:
  double factor_;
  int patience_;
  double best_ = 0.0;
  bool has_best_ = false;
  int bad_epochs_ = 0;
  int reductions_ = 0;
};

struct TrainConfig
{
  double lr = 1e-3;
  int batch_size = 64;
  int epochs = 50;
  /// Stage 2 starts at the first plateau or after this many epochs.
  int stage1_max_epochs = 30;
  double plateau_factor = 0.5;
  int plateau_patience = 5;
  double hard_mining_fraction = 0.10;
  double hard_mining_weight = 2.0;
  bool augment = true;
  AugmentPolicy augment_policy;
  LossWeights weights;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochMetrics
{
  int epoch = 0;
  int stage = 1;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_minade_k1 = 0.0;
  double val_minfde_k1 = 0.0;
  double val_minade_k6 = 0.0;
  double val_minfde_k6 = 0.0;

  std::string to_json() const;
};

struct TrainResult
{
  std::vector<EpochMetrics> history;
  int best_epoch = 0;
  double best_val_minade_k6 = 0.0;
};

/// Evaluation-mode metrics over @p samples, which must carry futures.
template <typename Scalar>
MetricTotals evaluate(
  const Predictor<Scalar> & model, const std::vector<SceneSample> & samples, int batch_size = 64);

/// Per-sample minADE over all modes.
template <typename Scalar>
std::vector<double> per_sample_min_ade(
  const Predictor<Scalar> & model, const std::vector<SceneSample> & samples, int batch_size = 64);

/**
 * @brief Two-stage training. Stage 1 optimizes the likelihood only; stage 2
 * adds the hinge and winner-takes-all terms and samples hard scenes more
 * often. The parameters of the best validation epoch are restored at the end.
 *
 * Throws NonFiniteLoss naming the epoch and batch.
 */
template <typename Scalar>
TrainResult train(
  Predictor<Scalar> & model, const std::vector<SceneSample> & train_set,
  const std::vector<SceneSample> & val_set, const TrainConfig & config,
  const std::function<void(const EpochMetrics &)> & on_epoch = {});

}  // namespace trajkit

#endif  // TRAJKIT__TRAINING_HPP_
