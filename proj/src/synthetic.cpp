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

#include "trajkit/synthetic.hpp"

#include "trajkit/error.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace trajkit
{
namespace
{

constexpr double kPi = 3.14159265358979323846;
constexpr double kLaneBehind = 60.0;
constexpr double kWaypointSpacing = 1.0;

/// Constant-curvature piece of a path; curvature 0 is a straight segment.
struct PathPiece
{
  double length;
  double curvature;
};

/// Arc-length parameterized path starting at the origin heading +y.
class Path
{
public:
  explicit Path(std::vector<PathPiece> pieces) : pieces_(std::move(pieces)) {}

  Point2 position(double s) const
  {
    Point2 p(0.0, 0.0);
    Point2 dir(0.0, 1.0);
    if (s <= 0.0) {
      return p + s * dir;
    }
    for (const auto & piece : pieces_) {
      const double step = std::min(s, piece.length);
      advance(p, dir, step, piece.curvature);
      s -= step;
      if (s <= 0.0) {
        return p;
      }
    }
    advance(p, dir, s, 0.0);
    return p;
  }

private:
  static void advance(Point2 & p, Point2 & dir, double ds, double k)
  {
    if (std::abs(k) < 1e-12) {
      p += ds * dir;
      return;
    }
    const double phi = k * ds;
    const Point2 normal(-dir.y(), dir.x());
    p += (std::sin(phi) * dir + (1.0 - std::cos(phi)) * normal) / k;
    dir = std::cos(phi) * dir + std::sin(phi) * normal;
  }

  std::vector<PathPiece> pieces_;
};

Polyline sample_path(const Path & path, double s_begin, double s_end)
{
  const int n = std::max(1, static_cast<int>(std::ceil((s_end - s_begin) / kWaypointSpacing)));
  Polyline out(n + 1, 2);
  for (int i = 0; i <= n; ++i) {
    const double s = s_begin + (s_end - s_begin) * i / n;
    out.row(i) = path.position(s).transpose();
  }
  return out;
}

/// Arc length travelled after t seconds; braking profiles hold position once stopped.
double travelled(double v, double a, double t)
{
  if (a < 0.0 && v + a * t < 0.0) {
    t = -v / a;
  }
  return v * t + 0.5 * a * t * t;
}

Point2 path_normal(const Path & path, double s)
{
  const Point2 d = path.position(s + 0.05) - path.position(s - 0.05);
  return Point2(-d.y(), d.x()).normalized();
}

}  // namespace

Scenario generate_synthetic(const SynthSpec & spec)
{
  if (spec.n_agents < 1) {
    throw Error(ErrorCode::InvalidArgument, "n_agents must be >= 1");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const Horizon & hz = spec.horizon;
  const int frames = hz.full_len();

  const double v = spec.speed ? *spec.speed : uniform(6.0, 14.0);
  double a = 0.0;
  {
    const double drawn = uniform(-0.8, 1.5);
    if (spec.motion == MotionModel::CTRA) {
      a = spec.accel ? *spec.accel : drawn;
    }
  }
  const double t_last_obs = (hz.obs_len - 1) * hz.dt;
  const double s_last_obs = travelled(v, a, t_last_obs);
  const double junction = s_last_obs + uniform(2.0, 12.0);
  const double radius = uniform(30.0, 70.0);
  const double turn_sign = unit(rng) < 0.5 ? 1.0 : -1.0;
  const bool take_turn = unit(rng) < 0.5;
  const double quarter = radius * kPi / 2.0;
  const double s_far = travelled(v, a, (frames - 1) * hz.dt) + 150.0;

  std::vector<Lane> lanes;
  std::vector<std::string> target_lanes;
  Path target_path({});
  switch (spec.lane_topology) {
    case LaneTopology::Straight: {
      const Path path({});
      lanes.push_back({"lane_0", sample_path(path, -kLaneBehind, s_far), {}, {}});
      target_lanes = {"lane_0"};
      target_path = path;
      break;
    }
    case LaneTopology::Curve: {
      const Path path({{junction, 0.0}, {quarter, turn_sign / radius}});
      lanes.push_back({"lane_0", sample_path(path, -kLaneBehind, s_far + quarter), {}, {}});
      target_lanes = {"lane_0"};
      target_path = path;
      break;
    }
    case LaneTopology::Fork: {
      const Path straight({});
      const Path turn({{junction, 0.0}, {quarter, turn_sign / radius}});
      lanes.push_back({"lane_in", sample_path(straight, -kLaneBehind, junction), {"lane_straight", "lane_turn"}, {}});
      lanes.push_back({"lane_straight", sample_path(straight, junction, s_far), {}, {"lane_in"}});
      lanes.push_back({"lane_turn", sample_path(turn, junction, s_far + quarter), {}, {"lane_in"}});
      target_path = take_turn ? turn : straight;
      target_lanes = {"lane_in", take_turn ? "lane_turn" : "lane_straight"};
      break;
    }
  }

  Scenario s;
  s.id = "synth_" + std::to_string(spec.seed);
  s.horizon = hz;
  s.truth = MotionTruth{spec.motion, spec.lane_topology, v, a, target_lanes};

  AgentTrack target{"target", Polyline(frames, 2), true};
  for (int i = 0; i < frames; ++i) {
    target.xy.row(i) = target_path.position(travelled(v, a, i * hz.dt)).transpose();
  }
  s.agents.push_back(std::move(target));

  for (int n = 1; n < spec.n_agents; ++n) {
    const double offset = (unit(rng) < 0.5 ? -1.0 : 1.0) * uniform(8.0, 40.0);
    const double speed = uniform(5.0, 14.0);
    const double lateral = uniform(-0.3, 0.3);
    AgentTrack other{"agent_" + std::to_string(n), Polyline(frames, 2), false};
    for (int i = 0; i < frames; ++i) {
      const double arc = offset + speed * i * hz.dt;
      other.xy.row(i) = (target_path.position(arc) + lateral * path_normal(target_path, arc)).transpose();
    }
    s.agents.push_back(std::move(other));
  }

  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (auto & agent : s.agents) {
      for (Eigen::Index i = 0; i < agent.xy.rows(); ++i) {
        agent.xy(i, 0) += noise(rng);
        agent.xy(i, 1) += noise(rng);
      }
    }
  }

  if (spec.world_yaw != 0.0 || !spec.world_offset.isZero()) {
    const Eigen::Matrix2d rot = Eigen::Rotation2Dd(spec.world_yaw).toRotationMatrix();
    auto place = [&](Polyline & pts) {
      for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        pts.row(i) = (rot * pts.row(i).transpose() + spec.world_offset).transpose();
      }
    };
    for (auto & agent : s.agents) place(agent.xy);
    for (auto & lane : lanes) place(lane.waypoints);
  }
  s.lane_graph = LaneGraph(std::move(lanes));
  return s;
}

}  // namespace trajkit
