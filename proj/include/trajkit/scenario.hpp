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

#ifndef TRAJKIT__SCENARIO_HPP_
#define TRAJKIT__SCENARIO_HPP_

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace trajkit
{

using Point2 = Eigen::Vector2d;
/// Ordered 2-D points, one per row (meters).
using Polyline = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Frame layout of a scenario sampled at 10 Hz.
struct Horizon
{
  int obs_len = 20;
  int pred_len = 30;
  double dt = 0.1;

  int full_len() const noexcept { return obs_len + pred_len; }
};

struct AgentTrack
{
  std::string id;
  Polyline xy;
  bool is_target = false;
};

struct Lane
{
  std::string id;
  Polyline waypoints;
  std::vector<std::string> successors;
  std::vector<std::string> predecessors;
};

class LaneGraph
{
public:
  LaneGraph() = default;
  explicit LaneGraph(std::vector<Lane> lanes);

  const std::vector<Lane> & lanes() const noexcept { return lanes_; }
  bool empty() const noexcept { return lanes_.empty(); }
  std::size_t size() const noexcept { return lanes_.size(); }

  /// Returns nullptr for unknown ids.
  const Lane * find(std::string_view id) const;

  /// Throws MalformedInput on dangling references, short lanes or repeated waypoints.
  void validate() const;

private:
  std::vector<Lane> lanes_;
};

enum class MotionModel { CV, CTRV, CTRA };
enum class LaneTopology { Straight, Curve, Fork };

std::string_view to_string(MotionModel m) noexcept;
std::string_view to_string(LaneTopology t) noexcept;
MotionModel parse_motion_model(std::string_view s);
LaneTopology parse_lane_topology(std::string_view s);

/// Generator parameters attached to synthetic scenarios.
struct MotionTruth
{
  MotionModel motion = MotionModel::CV;
  LaneTopology topology = LaneTopology::Straight;
  double speed = 0.0;  // at frame 0, m/s
  double accel = 0.0;  // m/s^2 along the path
  std::vector<std::string> target_lanes;
};

struct Scenario
{
  std::string id;
  std::vector<AgentTrack> agents;
  LaneGraph lane_graph;
  std::optional<std::string> city;
  std::optional<MotionTruth> truth;
  Horizon horizon;

  std::size_t target_index() const;
  const AgentTrack & target() const { return agents[target_index()]; }
  int frame_count() const;
  bool has_future() const { return frame_count() >= horizon.full_len(); }

  Polyline target_observed() const;
  /// Empty when the scenario carries no future frames.
  Polyline target_future() const;

  /// Throws on violated invariants (target count, frame counts, finiteness).
  void validate() const;
};

enum class ScenarioFormat { NativeJson, ArgoverseCsv };

ScenarioFormat parse_scenario_format(std::string_view s);

/**
 * @brief Parse a scenario from text.
 *
 * Agents without a full history horizon are dropped. The horizon is full
 * (obs + pred frames) when the target provides it, otherwise observed-only.
 *
 * @param id_hint Scenario id used by formats without one (CSV).
 */
Scenario parse_scenario(
  std::string_view text, ScenarioFormat format, std::string_view id_hint = "",
  const Horizon & horizon = {});

std::string to_native_json(const Scenario & s);

/// Rigid transform from world coordinates to the target-aligned frame.
struct TargetFrame
{
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
  Point2 origin = Point2::Zero();

  Point2 to_local(const Point2 & p) const { return rotation * (p - origin); }
  Point2 to_world(const Point2 & p) const { return rotation.transpose() * p + origin; }
  Polyline to_local(const Polyline & pts) const;
  Polyline to_world(const Polyline & pts) const;
};

/// Heading below this displacement norm falls back to the identity rotation.
inline constexpr double kMinHeadingNorm = 1e-6;

/**
 * @brief Rotate and translate the scene so the target sits at the origin at
 * its last observed frame, heading along +y.
 */
std::pair<Scenario, TargetFrame> to_target_frame(const Scenario & s);

/// Element t of the result is xy[t+1] - xy[t].
Polyline relative_displacements(const Polyline & xy);

}  // namespace trajkit

#endif  // TRAJKIT__SCENARIO_HPP_
