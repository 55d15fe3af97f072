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

#ifndef TRAJKIT__BATCH_HPP_
#define TRAJKIT__BATCH_HPP_

#include "trajkit/interaction.hpp"
#include "trajkit/map_prior.hpp"
#include "trajkit/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace trajkit
{

/**
 * @brief Model-ready view of one scenario in the target frame. The target
 * is always agent 0.
 */
struct SceneSample
{
  std::string id;
  std::vector<Polyline> agents;  // obs_len x 2 each
  Polyline future;               // pred_len x 2, empty when unknown
  std::optional<CenterlinePrior> prior;
  TargetFrame frame;
  Horizon horizon;

  bool has_future() const { return future.rows() > 0; }
};

/// @p s is rotated into its target frame here; priors must be built in that frame.
SceneSample make_sample(const Scenario & s, std::optional<CenterlinePrior> prior = std::nullopt);

/// Dense arrays for a batch of samples sharing one horizon.
struct Batch
{
  int obs_len = 20;
  int pred_len = 30;
  int window = 20;
  std::vector<SceneSlice> slices;
  std::vector<Eigen::Index> target_rows;
  /// Per encoder step, N x 2 displacements.
  std::vector<Eigen::MatrixXd> steps;
  Eigen::Matrix<double, Eigen::Dynamic, 2> last_positions;  // N x 2
  Eigen::MatrixXd target_window;                            // B x 2*window displacements
  Eigen::MatrixXd target_window_positions;                  // B x 2*window absolute
  Eigen::MatrixXd future;                                   // B x 2*pred_len, empty when unknown
  bool has_prior = false;
  Eigen::MatrixXd centerlines;  // (M*B) x 2*pred_len, row c*B + b
  Eigen::MatrixXd centerline_valid;  // (M*B) x 1
  Eigen::MatrixXd area;         // B x 2*r

  Eigen::Index batch_size() const { return static_cast<Eigen::Index>(slices.size()); }
  Eigen::Index num_agents() const { return last_positions.rows(); }
};

/**
 * @brief Assemble a batch. Samples without a prior leave has_prior false;
 * mixing samples with and without priors throws MissingPrior.
 *
 * The target window holds the last @p window displacements, left-padded with
 * zeros when the history is shorter.
 */
Batch make_batch(const std::vector<const SceneSample *> & samples, int window);

}  // namespace trajkit

#endif  // TRAJKIT__BATCH_HPP_
