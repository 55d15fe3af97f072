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

#include "trajkit/training.hpp"

#include "trajkit/error.hpp"
#include "trajkit/nn/adam.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace trajkit
{

SceneSample augment(const SceneSample & sample, const AugmentPolicy & policy, std::uint64_t seed)
{
  SceneSample out = sample;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (auto & xy : out.agents) {
    const Eigen::Index n = xy.rows();
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      if (u(rng) < policy.p_drop) {
        xy.row(i) = 0.5 * (xy.row(i - 1) + xy.row(i + 1));
      }
    }
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (u(rng) < policy.p_swap) {
        xy.row(i).swap(xy.row(i + 1));
      }
    }
    if (policy.sigma > 0.0) {
      for (Eigen::Index i = 0; i < n; ++i) {
        xy(i, 0) += policy.sigma * noise(rng);
        xy(i, 1) += policy.sigma * noise(rng);
      }
    }
  }
  return out;
}

std::vector<double> hard_mining_weights(const std::vector<double> & errors, double fraction)
{
  if (fraction < 0.0 || fraction >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "hard mining fraction must lie in [0, 1)");
  }
  std::vector<double> weights(errors.size(), 1.0);
  const auto hard = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(errors.size()) + 1e-9));
  std::vector<std::size_t> order(errors.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return errors[a] > errors[b];
  });
  for (std::size_t i = 0; i < hard; ++i) {
    weights[order[i]] = 2.0;
  }
  return weights;
}

bool PlateauScheduler::observe(double metric, double & lr)
{
  if (!has_best_ || metric < best_) {
    best_ = metric;
    has_best_ = true;
    bad_epochs_ = 0;
    return false;
  }
  if (++bad_epochs_ > patience_) {
    lr *= factor_;
    bad_epochs_ = 0;
    ++reductions_;
    return true;
  }
  return false;
}

void TrainConfig::validate() const
{
  if (!(lr > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "lr must be positive");
  }
  if (batch_size < 1 || epochs < 0 || stage1_max_epochs < 0 || plateau_patience < 0) {
    throw Error(ErrorCode::InvalidArgument, "batch size, epochs and patience must be non-negative");
  }
  if (hard_mining_fraction < 0.0 || hard_mining_fraction >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "hard mining fraction must lie in [0, 1)");
  }
  if (!(plateau_factor > 0.0 && plateau_factor < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "plateau factor must lie in (0, 1)");
  }
  weights.validate();
}

std::string EpochMetrics::to_json() const
{
  const nlohmann::json j = {
    {"epoch", epoch},
    {"stage", stage},
    {"lr", lr},
    {"train_loss", train_loss},
    {"val_minade_k1", val_minade_k1},
    {"val_minfde_k1", val_minfde_k1},
    {"val_minade_k6", val_minade_k6},
    {"val_minfde_k6", val_minfde_k6}};
  return j.dump();
}

namespace
{

template <typename Fn>
void for_each_batch(const std::vector<SceneSample> & samples, int batch_size, int window, Fn fn)
{
  for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(samples.size(), start + static_cast<std::size_t>(batch_size));
    std::vector<const SceneSample *> ptrs;
    for (std::size_t i = start; i < end; ++i) {
      ptrs.push_back(&samples[i]);
    }
    fn(start, ptrs, make_batch(ptrs, window));
  }
}

template <typename S>
std::vector<nn::Matrix<S>> snapshot(const nn::ParameterSet<S> & params)
{
  std::vector<nn::Matrix<S>> out;
  for (const auto & e : params.entries()) {
    out.push_back(e.tensor.value());
  }
  return out;
}

template <typename S>
void restore(nn::ParameterSet<S> & params, const std::vector<nn::Matrix<S>> & values)
{
  for (std::size_t i = 0; i < values.size(); ++i) {
    nn::Tensor<S> t = params.entries()[i].tensor;
    t.mutable_value() = values[i];
  }
}

}  // namespace

template <typename S>
MetricTotals evaluate(const Predictor<S> & model, const std::vector<SceneSample> & samples, int batch_size)
{
  MetricTotals totals;
  for_each_batch(samples, batch_size, model.config().window, [&](std::size_t, const auto & ptrs, const Batch & batch) {
    const auto sets = model.predict(batch);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (!ptrs[i]->has_future()) {
        throw Error(ErrorCode::InvalidArgument, "sample '" + ptrs[i]->id + "' has no future");
      }
      totals.add(ptrs[i]->future, sets[i].trajectories, sets[i].confidences);
    }
  });
  return totals;
}

template <typename S>
std::vector<double> per_sample_min_ade(
  const Predictor<S> & model, const std::vector<SceneSample> & samples, int batch_size)
{
  std::vector<double> out;
  for_each_batch(samples, batch_size, model.config().window, [&](std::size_t, const auto & ptrs, const Batch & batch) {
    const auto sets = model.predict(batch);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      out.push_back(min_ade(
        ptrs[i]->future, sets[i].trajectories, sets[i].confidences,
        static_cast<int>(sets[i].trajectories.size())));
    }
  });
  return out;
}

template <typename S>
TrainResult train(
  Predictor<S> & model, const std::vector<SceneSample> & train_set,
  const std::vector<SceneSample> & val_set, const TrainConfig & config,
  const std::function<void(const EpochMetrics &)> & on_epoch)
{
  config.validate();
  if (train_set.empty()) {
    throw Error(ErrorCode::EmptySet, "training set is empty");
  }
  const std::vector<SceneSample> & validation = val_set.empty() ? train_set : val_set;
  std::mt19937_64 rng(config.seed);
  nn::Adam<S> optimizer(model.params().parameters(), {config.lr});
  PlateauScheduler scheduler(config.plateau_factor, config.plateau_patience);
  double lr = config.lr;
  int stage = 1;
  std::vector<double> sampling_weights;

  TrainResult result;
  std::vector<nn::Matrix<S>> best_values = snapshot(model.params());
  bool has_best = false;
  const std::size_t n = train_set.size();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<std::size_t> order(n);
    if (stage == 2 && !sampling_weights.empty()) {
      std::discrete_distribution<std::size_t> pick(sampling_weights.begin(), sampling_weights.end());
      for (auto & i : order) {
        i = pick(rng);
      }
    } else {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
    }
    const LossWeights weights = stage == 1 ? config.weights.first_stage() : config.weights;

    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(config.batch_size));
      std::vector<SceneSample> augmented;
      augmented.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        const SceneSample & s = train_set[order[i]];
        const std::uint64_t aug_seed = rng();
        augmented.push_back(config.augment ? augment(s, config.augment_policy, aug_seed) : s);
      }
      std::vector<const SceneSample *> ptrs;
      for (const auto & s : augmented) {
        ptrs.push_back(&s);
      }
      const Batch batch = make_batch(ptrs, model.config().window);
      const ForwardOutput<S> out = model.forward(batch, true, rng);
      const LossParts<S> parts =
        compute_losses(out.positions, out.confidences, nn::Matrix<S>(batch.future.cast<S>()), weights);
      const double loss = static_cast<double>(parts.total.item());
      if (!std::isfinite(loss)) {
        throw Error(
          ErrorCode::NonFiniteLoss,
          "epoch " + std::to_string(epoch) + " batch " + std::to_string(batches));
      }
      optimizer.zero_grad();
      parts.total.backward();
      optimizer.step();
      loss_sum += loss;
      ++batches;
    }

    const MetricTotals val = evaluate(model, validation, config.batch_size);
    EpochMetrics m;
    m.epoch = epoch;
    m.stage = stage;
    m.lr = lr;
    m.train_loss = loss_sum / std::max(1, batches);
    m.val_minade_k1 = val.mean_ade_k1();
    m.val_minfde_k1 = val.mean_fde_k1();
    m.val_minade_k6 = val.mean_ade_k6();
    m.val_minfde_k6 = val.mean_fde_k6();
    result.history.push_back(m);
    if (on_epoch) {
      on_epoch(m);
    }
    if (!has_best || m.val_minade_k6 < result.best_val_minade_k6) {
      has_best = true;
      result.best_epoch = epoch;
      result.best_val_minade_k6 = m.val_minade_k6;
      best_values = snapshot(model.params());
    }

    const bool plateau = scheduler.observe(m.val_minade_k6, lr);
    optimizer.set_lr(lr);
    if (stage == 1 && (plateau || epoch >= config.stage1_max_epochs)) {
      stage = 2;
      if (config.hard_mining_fraction > 0.0) {
        sampling_weights = hard_mining_weights(
          per_sample_min_ade(model, train_set, config.batch_size), config.hard_mining_fraction);
        for (auto & w : sampling_weights) {
          w = w > 1.0 ? config.hard_mining_weight : 1.0;
        }
      }
    }
  }
  if (has_best) {
    restore(model.params(), best_values);
  }
  return result;
}

#define TRAJKIT_TRAINING_INSTANTIATE(S)                                                          \
  template MetricTotals evaluate(const Predictor<S> &, const std::vector<SceneSample> &, int);   \
  template std::vector<double> per_sample_min_ade(                                               \
    const Predictor<S> &, const std::vector<SceneSample> &, int);                                \
  template TrainResult train(                                                                    \
    Predictor<S> &, const std::vector<SceneSample> &, const std::vector<SceneSample> &,          \
    const TrainConfig &, const std::function<void(const EpochMetrics &)> &);

TRAJKIT_TRAINING_INSTANTIATE(float)
TRAJKIT_TRAINING_INSTANTIATE(double)

#undef TRAJKIT_TRAINING_INSTANTIATE

}  // namespace trajkit
