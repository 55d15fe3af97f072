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

#include "trajkit/batch.hpp"

#include "trajkit/error.hpp"

namespace trajkit
{

SceneSample make_sample(const Scenario & s, std::optional<CenterlinePrior> prior)
{
  const auto [local, frame] = to_target_frame(s);
  SceneSample out;
  out.id = s.id;
  out.frame = frame;
  out.horizon = s.horizon;
  const std::size_t target = local.target_index();
  out.agents.push_back(local.target_observed());
  for (std::size_t a = 0; a < local.agents.size(); ++a) {
    if (a != target) {
      out.agents.push_back(local.agents[a].xy.topRows(s.horizon.obs_len));
    }
  }
  if (local.has_future()) {
    out.future = local.target_future();
  }
  out.prior = std::move(prior);
  return out;
}

Batch make_batch(const std::vector<const SceneSample *> & samples, int window)
{
  if (samples.empty()) {
    throw Error(ErrorCode::EmptySet, "cannot batch zero samples");
  }
  Batch b;
  b.obs_len = samples.front()->horizon.obs_len;
  b.pred_len = samples.front()->horizon.pred_len;
  b.window = window;
  if (window < 1 || window > b.obs_len) {
    throw Error(ErrorCode::InvalidArgument, "decoder window must lie in [1, obs_len]");
  }
  const Eigen::Index batch = static_cast<Eigen::Index>(samples.size());
  Eigen::Index n = 0;
  const bool with_future = samples.front()->has_future();
  const bool with_prior = samples.front()->prior.has_value();
  for (const auto * s : samples) {
    if (s->horizon.obs_len != b.obs_len || s->horizon.pred_len != b.pred_len) {
      throw Error(ErrorCode::ShapeMismatch, "batched samples must share a horizon");
    }
    if (s->prior.has_value() != with_prior) {
      throw Error(ErrorCode::MissingPrior, "sample '" + s->id + "' lacks a map prior");
    }
    for (const auto & a : s->agents) {
      if (a.rows() != b.obs_len) {
        throw Error(ErrorCode::ShapeMismatch, "agent history length differs from obs_len");
      }
    }
    b.slices.push_back({n, static_cast<Eigen::Index>(s->agents.size())});
    b.target_rows.push_back(n);
    n += static_cast<Eigen::Index>(s->agents.size());
  }

  b.steps.assign(static_cast<std::size_t>(b.obs_len - 1), Eigen::MatrixXd(n, 2));
  b.last_positions.resize(n, 2);
  Eigen::Index row = 0;
  for (const auto * s : samples) {
    for (const auto & a : s->agents) {
      for (int t = 0; t + 1 < b.obs_len; ++t) {
        b.steps[static_cast<std::size_t>(t)].row(row) = a.row(t + 1) - a.row(t);
      }
      b.last_positions.row(row) = a.row(b.obs_len - 1);
      ++row;
    }
  }

  b.target_window = Eigen::MatrixXd::Zero(batch, 2 * window);
  b.target_window_positions.resize(batch, 2 * window);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const Polyline & target = samples[static_cast<std::size_t>(i)]->agents.front();
    for (int w = 0; w < window; ++w) {
      // Slot w holds the displacement ending at frame obs_len - window + w.
      const int frame = b.obs_len - window + w;
      if (frame >= 1) {
        b.target_window.block(i, 2 * w, 1, 2) = target.row(frame) - target.row(frame - 1);
      }
      b.target_window_positions.block(i, 2 * w, 1, 2) = target.row(frame);
    }
  }

  if (with_future) {
    b.future.resize(batch, 2 * b.pred_len);
    for (Eigen::Index i = 0; i < batch; ++i) {
      const auto * s = samples[static_cast<std::size_t>(i)];
      if (s->future.rows() != b.pred_len) {
        throw Error(ErrorCode::ShapeMismatch, "sample '" + s->id + "' lacks future frames");
      }
      for (int t = 0; t < b.pred_len; ++t) {
        b.future.block(i, 2 * t, 1, 2) = s->future.row(t);
      }
    }
  }

  if (with_prior) {
    b.has_prior = true;
    const auto & first = *samples.front()->prior;
    const Eigen::Index m = static_cast<Eigen::Index>(first.centerlines.size());
    const Eigen::Index r = first.plausible_points.rows();
    b.centerlines.resize(m * batch, 2 * b.pred_len);
    b.centerline_valid.resize(m * batch, 1);
    b.area.resize(batch, 2 * r);
    for (Eigen::Index i = 0; i < batch; ++i) {
      const auto & p = *samples[static_cast<std::size_t>(i)]->prior;
      if (static_cast<Eigen::Index>(p.centerlines.size()) != m || p.plausible_points.rows() != r) {
        throw Error(ErrorCode::ShapeMismatch, "priors in a batch must share M and r");
      }
      for (Eigen::Index c = 0; c < m; ++c) {
        const Polyline & line = p.centerlines[static_cast<std::size_t>(c)];
        if (line.rows() != b.pred_len) {
          throw Error(ErrorCode::ShapeMismatch, "centerline length differs from pred_len");
        }
        for (int t = 0; t < b.pred_len; ++t) {
          b.centerlines.block(c * batch + i, 2 * t, 1, 2) = line.row(t);
        }
        b.centerline_valid(c * batch + i, 0) = p.valid[static_cast<std::size_t>(c)] ? 1.0 : 0.0;
      }
      for (Eigen::Index j = 0; j < r; ++j) {
        b.area.block(i, 2 * j, 1, 2) = p.plausible_points.row(j);
      }
    }
  }
  return b;
}

}  // namespace trajkit
