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

#ifndef TRAJKIT__MAP_PRIOR_HPP_
#define TRAJKIT__MAP_PRIOR_HPP_

#include "trajkit/kinematics.hpp"
#include "trajkit/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace trajkit
{

struct Centerline
{
  Polyline waypoints;
  std::vector<std::string> source_lane_ids;
};

/**
 * @brief Kinematically truncated candidate centerlines plus the sampled
 * plausible area around them, all in the target frame.
 */
struct CenterlinePrior
{
  std::vector<Polyline> centerlines;  // M entries of pred_len x 2, all-zero when padded
  std::vector<bool> valid;
  Polyline plausible_points;  // r x 2
  KinematicState state;
  std::uint64_t rng_seed = 0;

  int num_valid() const;
};

struct PriorOptions
{
  int max_candidates = 3;
  int plausible_points = 200;
  double area_sigma = 0.2;
  /// Lanes seeding the candidate search.
  int seed_lanes = 4;
  double max_lane_distance = 50.0;
  /// Extra length beyond the travel distance the successor search must reach.
  double length_slack = 10.0;
  double heading_weight = 2.0;
  StateEstimateOptions state;
  /// When false the acceleration term of the travel distance is dropped (CTRV).
  bool use_accel = true;
  std::uint64_t seed = 0;
};

/**
 * @brief Successor-chained lane polylines near the last observation, best first.
 *
 * Seeds are the lanes whose nearest waypoint is closest to the last observed
 * position; each seed is extended depth-first along successors until the
 * chain covers @p required_length beyond that waypoint. Candidates are scored
 * by -(distance) - heading_weight * (1 - cos(heading gap)) and de-duplicated
 * when one lane sequence is a suffix of another.
 *
 * Throws NoLaneInRange when the graph is empty or the nearest lane is beyond
 * the configured distance.
 */
std::vector<Centerline> candidate_centerlines(
  const LaneGraph & graph, const Polyline & target_obs, int max_candidates,
  double required_length, const PriorOptions & options = {});

/// Cut @p c from the waypoint nearest @p last_obs to the first waypoint whose
/// accumulated length reaches ctra_distance(state, horizon).
Centerline truncate_centerline(
  const Centerline & c, const KinematicState & state, const Point2 & last_obs, double horizon);

/// Resample to @p n points uniformly spaced in chord length; natural cubic
/// spline per axis for 4+ input points, linear otherwise.
Polyline resample_cubic(const Polyline & waypoints, int n);

Polyline sample_plausible_area(
  const std::vector<Polyline> & centerlines, int r, double sigma, std::uint64_t seed);

/// Estimate the kinematic state of the target from its observed frames.
KinematicState estimate_target_state(const Scenario & s, const PriorOptions & options = {});

/// Compose search, truncation, resampling, padding and area sampling.
/// @p s must already be in the target frame.
CenterlinePrior build_prior(
  const Scenario & s, const KinematicState & state, const PriorOptions & options = {});

std::string prior_to_json(const CenterlinePrior & prior);
CenterlinePrior prior_from_json(const std::string & text);

}  // namespace trajkit

#endif  // TRAJKIT__MAP_PRIOR_HPP_
