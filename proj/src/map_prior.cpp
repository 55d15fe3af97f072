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

#include "trajkit/map_prior.hpp"

#include "trajkit/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace trajkit
{
namespace
{

struct NearestWaypoint
{
  Eigen::Index index = 0;
  double distance = std::numeric_limits<double>::infinity();
};

/// Strict comparison keeps the lowest index on ties.
NearestWaypoint nearest_waypoint(const Polyline & pts, const Point2 & p)
{
  NearestWaypoint best;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const double d = (pts.row(i).transpose() - p).norm();
    if (d < best.distance) {
      best = {i, d};
    }
  }
  return best;
}

double polyline_length(const Polyline & pts, Eigen::Index from = 0)
{
  double total = 0.0;
  for (Eigen::Index i = from + 1; i < pts.rows(); ++i) {
    total += (pts.row(i) - pts.row(i - 1)).norm();
  }
  return total;
}

Point2 direction_at(const Polyline & pts, Eigen::Index i)
{
  const Eigen::Index a = i + 1 < pts.rows() ? i : i - 1;
  return (pts.row(a + 1) - pts.row(a)).transpose();
}

void append_waypoints(Polyline & chain, const Polyline & next)
{
  Eigen::Index skip = 0;
  if (chain.rows() > 0 && (chain.row(chain.rows() - 1) - next.row(0)).norm() < 1e-9) {
    skip = 1;
  }
  const Eigen::Index old_rows = chain.rows();
  chain.conservativeResize(old_rows + next.rows() - skip, 2);
  chain.bottomRows(next.rows() - skip) = next.bottomRows(next.rows() - skip);
}

bool is_suffix(const std::vector<std::string> & shorter, const std::vector<std::string> & longer)
{
  if (shorter.size() > longer.size()) {
    return false;
  }
  return std::equal(shorter.rbegin(), shorter.rend(), longer.rbegin());
}

class NaturalCubicSpline
{
public:
  NaturalCubicSpline(const Eigen::VectorXd & knots, const Eigen::VectorXd & values)
  : knots_(knots), values_(values), second_(Eigen::VectorXd::Zero(knots.size()))
  {
    const Eigen::Index n = knots.size();
    // Thomas algorithm on the interior second-derivative system.
    Eigen::VectorXd diag(n), upper(n), rhs(n);
    diag.setOnes();
    upper.setZero();
    rhs.setZero();
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      const double h0 = knots[i] - knots[i - 1];
      const double h1 = knots[i + 1] - knots[i];
      const double lower = h0 / 6.0;
      const double d = (h0 + h1) / 3.0 - lower * upper[i - 1] / diag[i - 1];
      rhs[i] = (values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0 -
               lower * rhs[i - 1] / diag[i - 1];
      diag[i] = d;
      upper[i] = h1 / 6.0;
    }
    for (Eigen::Index i = n - 2; i >= 1; --i) {
      second_[i] = (rhs[i] - upper[i] * second_[i + 1]) / diag[i];
    }
  }

  double operator()(double u) const
  {
    const Eigen::Index n = knots_.size();
    Eigen::Index i = std::upper_bound(knots_.data(), knots_.data() + n, u) - knots_.data() - 1;
    i = std::clamp<Eigen::Index>(i, 0, n - 2);
    const double h = knots_[i + 1] - knots_[i];
    const double a = (knots_[i + 1] - u) / h;
    const double b = (u - knots_[i]) / h;
    return a * values_[i] + b * values_[i + 1] +
           ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) * h * h / 6.0;
  }

private:
  Eigen::VectorXd knots_;
  Eigen::VectorXd values_;
  Eigen::VectorXd second_;
};

}  // namespace

int CenterlinePrior::num_valid() const
{
  return static_cast<int>(std::count(valid.begin(), valid.end(), true));
}

std::vector<Centerline> candidate_centerlines(
  const LaneGraph & graph, const Polyline & target_obs, int max_candidates,
  double required_length, const PriorOptions & options)
{
  if (target_obs.rows() < 2) {
    throw Error(ErrorCode::TooShort, "candidate search needs 2 observed positions");
  }
  if (graph.empty()) {
    throw Error(ErrorCode::NoLaneInRange, "lane graph is empty");
  }
  const Eigen::Index last = target_obs.rows() - 1;
  const Point2 last_obs = target_obs.row(last).transpose();
  const Point2 heading =
    (target_obs.row(last) - target_obs.row(std::max<Eigen::Index>(0, last - 4))).transpose();

  struct Seed
  {
    const Lane * lane;
    NearestWaypoint nearest;
  };
  std::vector<Seed> seeds;
  for (const auto & lane : graph.lanes()) {
    seeds.push_back({&lane, nearest_waypoint(lane.waypoints, last_obs)});
  }
  std::sort(seeds.begin(), seeds.end(), [](const Seed & a, const Seed & b) {
    if (a.nearest.distance != b.nearest.distance) return a.nearest.distance < b.nearest.distance;
    if (a.nearest.index != b.nearest.index) return a.nearest.index < b.nearest.index;
    return a.lane->id < b.lane->id;
  });
  if (seeds.front().nearest.distance > options.max_lane_distance) {
    throw Error(ErrorCode::NoLaneInRange, "nearest lane is beyond the search radius");
  }
  seeds.resize(std::min<std::size_t>(seeds.size(), static_cast<std::size_t>(options.seed_lanes)));

  struct Scored
  {
    Centerline line;
    double score;
  };
  std::vector<Scored> scored;
  constexpr std::size_t kMaxChainsPerSeed = 64;
  for (const auto & seed : seeds) {
    const Point2 dir = direction_at(seed.lane->waypoints, seed.nearest.index);
    double cos_gap = 1.0;
    if (heading.norm() > kMinHeadingNorm && dir.norm() > 0.0) {
      cos_gap = heading.dot(dir) / (heading.norm() * dir.norm());
    }
    const double score = -seed.nearest.distance - options.heading_weight * (1.0 - cos_gap);

    std::vector<Centerline> chains;
    // Depth-first over successor chains; each frame carries the chain so far.
    struct Frame
    {
      std::vector<const Lane *> lanes;
      double length;
    };
    std::vector<Frame> stack{{{seed.lane}, polyline_length(seed.lane->waypoints, seed.nearest.index)}};
    while (!stack.empty() && chains.size() < kMaxChainsPerSeed) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      std::vector<const Lane *> next;
      if (f.length < required_length) {
        for (const auto & id : f.lanes.back()->successors) {
          const Lane * succ = graph.find(id);
          if (succ && std::find(f.lanes.begin(), f.lanes.end(), succ) == f.lanes.end()) {
            next.push_back(succ);
          }
        }
      }
      if (next.empty()) {
        Centerline c;
        c.waypoints.resize(0, 2);
        for (const Lane * l : f.lanes) {
          append_waypoints(c.waypoints, l->waypoints);
          c.source_lane_ids.push_back(l->id);
        }
        chains.push_back(std::move(c));
        continue;
      }
      // Reverse push keeps successor order in the depth-first output.
      for (auto it = next.rbegin(); it != next.rend(); ++it) {
        Frame child = f;
        child.lanes.push_back(*it);
        child.length += polyline_length((*it)->waypoints);
        stack.push_back(std::move(child));
      }
    }
    for (auto & c : chains) {
      scored.push_back({std::move(c), score});
    }
  }

  std::stable_sort(scored.begin(), scored.end(), [](const Scored & a, const Scored & b) {
    return a.score > b.score;
  });
  std::vector<Centerline> out;
  for (auto & s : scored) {
    if (static_cast<int>(out.size()) >= max_candidates) {
      break;
    }
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Centerline & kept) {
      return is_suffix(s.line.source_lane_ids, kept.source_lane_ids) ||
             is_suffix(kept.source_lane_ids, s.line.source_lane_ids);
    });
    if (!duplicate) {
      out.push_back(std::move(s.line));
    }
  }
  return out;
}

Centerline truncate_centerline(
  const Centerline & c, const KinematicState & state, const Point2 & last_obs, double horizon)
{
  const Eigen::Index n = c.waypoints.rows();
  if (n < 2) {
    throw Error(ErrorCode::TooShort, "centerline needs at least 2 waypoints");
  }
  const Eigen::Index start = std::min(nearest_waypoint(c.waypoints, last_obs).index, n - 2);
  const double distance = ctra_distance(state, horizon);
  Eigen::Index end = n - 1;
  double accumulated = 0.0;
  for (Eigen::Index p = start + 1; p < n; ++p) {
    accumulated += (c.waypoints.row(p) - c.waypoints.row(p - 1)).norm();
    if (accumulated >= distance) {
      end = p;
      break;
    }
  }
  return {c.waypoints.middleRows(start, end - start + 1), c.source_lane_ids};
}

Polyline resample_cubic(const Polyline & waypoints, int n)
{
  const Eigen::Index m = waypoints.rows();
  if (m < 2) {
    throw Error(ErrorCode::TooShort, "resampling needs at least 2 waypoints");
  }
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument, "resampling needs at least 2 output points");
  }
  Eigen::VectorXd knots(m);
  knots[0] = 0.0;
  for (Eigen::Index i = 1; i < m; ++i) {
    knots[i] = knots[i - 1] + (waypoints.row(i) - waypoints.row(i - 1)).norm();
  }
  const double total = knots[m - 1];
  Polyline out(n, 2);
  if (m >= 4) {
    const NaturalCubicSpline sx(knots, waypoints.col(0));
    const NaturalCubicSpline sy(knots, waypoints.col(1));
    for (int j = 0; j < n; ++j) {
      const double u = total * j / (n - 1);
      out(j, 0) = sx(u);
      out(j, 1) = sy(u);
    }
  } else {
    for (int j = 0; j < n; ++j) {
      const double u = total * j / (n - 1);
      Eigen::Index i = std::upper_bound(knots.data(), knots.data() + m, u) - knots.data() - 1;
      i = std::clamp<Eigen::Index>(i, 0, m - 2);
      const double w = (u - knots[i]) / (knots[i + 1] - knots[i]);
      out.row(j) = (1.0 - w) * waypoints.row(i) + w * waypoints.row(i + 1);
    }
  }
  out.row(0) = waypoints.row(0);
  out.row(n - 1) = waypoints.row(m - 1);
  return out;
}

Polyline sample_plausible_area(
  const std::vector<Polyline> & centerlines, int r, double sigma, std::uint64_t seed)
{
  if (centerlines.empty()) {
    throw Error(ErrorCode::NoValidCenterline, "no valid centerline to sample around");
  }
  if (r < 1) {
    throw Error(ErrorCode::InvalidArgument, "plausible point count must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_line(0, centerlines.size() - 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  Polyline out(r, 2);
  for (int i = 0; i < r; ++i) {
    const Polyline & line = centerlines[pick_line(rng)];
    std::uniform_int_distribution<Eigen::Index> pick_point(0, line.rows() - 1);
    const Eigen::Index j = pick_point(rng);
    const double nx = noise(rng);
    const double ny = noise(rng);
    out(i, 0) = line(j, 0) + sigma * nx;
    out(i, 1) = line(j, 1) + sigma * ny;
  }
  return out;
}

KinematicState estimate_target_state(const Scenario & s, const PriorOptions & options)
{
  KinematicState state = estimate_state(s.target_observed(), s.horizon.dt, options.state);
  if (!options.use_accel) {
    state.accel = 0.0;
  }
  return state;
}

CenterlinePrior build_prior(
  const Scenario & s, const KinematicState & state, const PriorOptions & options)
{
  const int pred_len = s.horizon.pred_len;
  const double horizon = pred_len * s.horizon.dt;
  const Polyline obs = s.target_observed();
  const Point2 last_obs = obs.row(obs.rows() - 1).transpose();

  CenterlinePrior prior;
  prior.state = state;
  prior.rng_seed = options.seed;

  std::vector<Centerline> candidates;
  try {
    candidates = candidate_centerlines(
      s.lane_graph, obs, options.max_candidates, ctra_distance(state, horizon) + options.length_slack,
      options);
  } catch (const Error & e) {
    if (e.code() != ErrorCode::NoLaneInRange) {
      throw;
    }
  }
  std::vector<Polyline> valid_lines;
  for (const auto & c : candidates) {
    const Centerline cut = truncate_centerline(c, state, last_obs, horizon);
    prior.centerlines.push_back(resample_cubic(cut.waypoints, pred_len));
    prior.valid.push_back(true);
    valid_lines.push_back(prior.centerlines.back());
  }
  while (static_cast<int>(prior.centerlines.size()) < options.max_candidates) {
    prior.centerlines.push_back(Polyline::Zero(pred_len, 2));
    prior.valid.push_back(false);
  }
  if (valid_lines.empty()) {
    prior.plausible_points = Polyline::Zero(options.plausible_points, 2);
  } else {
    prior.plausible_points =
      sample_plausible_area(valid_lines, options.plausible_points, options.area_sigma, options.seed);
  }
  return prior;
}

namespace
{

nlohmann::json points_json(const Polyline & p)
{
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    out.push_back({p(i, 0), p(i, 1)});
  }
  return out;
}

Polyline points_from_json(const nlohmann::json & j)
{
  Polyline out(static_cast<Eigen::Index>(j.size()), 2);
  for (std::size_t i = 0; i < j.size(); ++i) {
    out(static_cast<Eigen::Index>(i), 0) = j[i].at(0).get<double>();
    out(static_cast<Eigen::Index>(i), 1) = j[i].at(1).get<double>();
  }
  return out;
}

}  // namespace

std::string prior_to_json(const CenterlinePrior & prior)
{
  nlohmann::json doc;
  doc["centerlines"] = nlohmann::json::array();
  for (const auto & c : prior.centerlines) {
    doc["centerlines"].push_back(points_json(c));
  }
  doc["valid"] = prior.valid;
  doc["area"] = points_json(prior.plausible_points);
  doc["state"] = {{"v", prior.state.speed}, {"a", prior.state.accel}};
  return doc.dump();
}

CenterlinePrior prior_from_json(const std::string & text)
{
  CenterlinePrior prior;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto & c : doc.at("centerlines")) {
      prior.centerlines.push_back(points_from_json(c));
    }
    prior.valid = doc.at("valid").get<std::vector<bool>>();
    prior.plausible_points = points_from_json(doc.at("area"));
    prior.state.speed = doc.at("state").at("v").get<double>();
    prior.state.accel = doc.at("state").at("a").get<double>();
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::MalformedInput, e.what());
  }
  if (prior.valid.size() != prior.centerlines.size()) {
    throw Error(ErrorCode::MalformedInput, "prior 'valid' and 'centerlines' differ in length");
  }
  return prior;
}

}  // namespace trajkit
