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

#ifndef TRAJKIT__SYNTHETIC_HPP_
#define TRAJKIT__SYNTHETIC_HPP_

#include "trajkit/scenario.hpp"

#include <cstdint>
#include <optional>

namespace trajkit
{

/**
 * @brief Parameters of a desk-scale synthetic scenario.
 *
 * The target starts at the world origin heading +y at frame 0 and follows a
 * lane of the generated graph with arc length s(t) = v t + a t^2 / 2 (speed is
 * held at zero once a braking profile stops). CV and CTRV both use a = 0; the
 * turn rate always comes from the lane geometry.
 */
struct SynthSpec
{
  int n_agents = 1;
  MotionModel motion = MotionModel::CV;
  LaneTopology lane_topology = LaneTopology::Straight;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  /// Drawn from U(6, 14) m/s when unset.
  std::optional<double> speed;
  /// Drawn from U(-0.8, 1.5) m/s^2 for CTRA when unset; forced to 0 otherwise.
  std::optional<double> accel;

  /// Rigid world pose applied to the whole scene after generation.
  double world_yaw = 0.0;
  Point2 world_offset = Point2::Zero();

  Horizon horizon;
};

Scenario generate_synthetic(const SynthSpec & spec);

}  // namespace trajkit

#endif  // TRAJKIT__SYNTHETIC_HPP_
