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

#include "trajkit/scenario.hpp"

#include "trajkit/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

namespace trajkit
{

using nlohmann::json;

LaneGraph::LaneGraph(std::vector<Lane> lanes) : lanes_(std::move(lanes)) {}

const Lane * LaneGraph::find(std::string_view id) const
{
  for (const auto & lane : lanes_) {
    if (lane.id == id) {
      return &lane;
    }
  }
  return nullptr;
}

void LaneGraph::validate() const
{
  std::unordered_set<std::string> ids;
  for (const auto & lane : lanes_) {
    if (!ids.insert(lane.id).second) {
      throw Error(ErrorCode::MalformedInput, "duplicate lane id '" + lane.id + "'");
    }
  }
  for (const auto & lane : lanes_) {
    if (lane.waypoints.rows() < 2) {
      throw Error(ErrorCode::MalformedInput, "lane '" + lane.id + "' has fewer than 2 waypoints");
    }
    if (!lane.waypoints.allFinite()) {
      throw Error(ErrorCode::MalformedInput, "lane '" + lane.id + "' has non-finite waypoints");
    }
    for (Eigen::Index i = 1; i < lane.waypoints.rows(); ++i) {
      if (lane.waypoints.row(i) == lane.waypoints.row(i - 1)) {
        throw Error(ErrorCode::MalformedInput, "lane '" + lane.id + "' repeats a waypoint");
      }
    }
    for (const auto * refs : {&lane.successors, &lane.predecessors}) {
      for (const auto & ref : *refs) {
        if (!ids.count(ref)) {
          throw Error(
            ErrorCode::MalformedInput, "lane '" + lane.id + "' references unknown lane '" + ref + "'");
        }
      }
    }
  }
}

std::string_view to_string(MotionModel m) noexcept
{
  switch (m) {
    case MotionModel::CV: return "cv";
    case MotionModel::CTRV: return "ctrv";
    case MotionModel::CTRA: return "ctra";
  }
  return "cv";
}

std::string_view to_string(LaneTopology t) noexcept
{
  switch (t) {
    case LaneTopology::Straight: return "straight";
    case LaneTopology::Curve: return "curve";
    case LaneTopology::Fork: return "fork";
  }
  return "straight";
}

MotionModel parse_motion_model(std::string_view s)
{
  if (s == "cv") return MotionModel::CV;
  if (s == "ctrv") return MotionModel::CTRV;
  if (s == "ctra") return MotionModel::CTRA;
  throw Error(ErrorCode::InvalidArgument, "unknown motion model '" + std::string(s) + "'");
}

LaneTopology parse_lane_topology(std::string_view s)
{
  if (s == "straight") return LaneTopology::Straight;
  if (s == "curve") return LaneTopology::Curve;
  if (s == "fork") return LaneTopology::Fork;
  throw Error(ErrorCode::InvalidArgument, "unknown lane topology '" + std::string(s) + "'");
}

ScenarioFormat parse_scenario_format(std::string_view s)
{
  if (s == "native_json") return ScenarioFormat::NativeJson;
  if (s == "argoverse_csv") return ScenarioFormat::ArgoverseCsv;
  throw Error(ErrorCode::InvalidArgument, "unknown scenario format '" + std::string(s) + "'");
}

std::size_t Scenario::target_index() const
{
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].is_target) {
      return i;
    }
  }
  throw Error(ErrorCode::NoTargetAgent, "scenario '" + id + "' has no target agent");
}

int Scenario::frame_count() const
{
  return agents.empty() ? 0 : static_cast<int>(agents.front().xy.rows());
}

Polyline Scenario::target_observed() const
{
  return target().xy.topRows(horizon.obs_len);
}

Polyline Scenario::target_future() const
{
  if (!has_future()) {
    return Polyline(0, 2);
  }
  return target().xy.middleRows(horizon.obs_len, horizon.pred_len);
}

void Scenario::validate() const
{
  const auto n_targets =
    std::count_if(agents.begin(), agents.end(), [](const auto & a) { return a.is_target; });
  if (n_targets == 0) {
    throw Error(ErrorCode::NoTargetAgent, "scenario '" + id + "' has no target agent");
  }
  if (n_targets > 1) {
    throw Error(ErrorCode::MalformedInput, "scenario '" + id + "' has more than one target agent");
  }
  const int frames = frame_count();
  if (frames != horizon.obs_len && frames != horizon.full_len()) {
    throw Error(ErrorCode::InsufficientFrames, "scenario '" + id + "' has an invalid frame count");
  }
  for (const auto & a : agents) {
    if (a.xy.rows() != frames) {
      throw Error(ErrorCode::MalformedInput, "agent '" + a.id + "' frame count differs");
    }
    if (!a.xy.allFinite()) {
      throw Error(ErrorCode::MalformedInput, "agent '" + a.id + "' has non-finite coordinates");
    }
  }
  lane_graph.validate();
}

namespace
{

Polyline polyline_from_json(const json & j)
{
  if (!j.is_array()) {
    throw Error(ErrorCode::MalformedInput, "expected an array of [x, y] pairs");
  }
  Polyline out(static_cast<Eigen::Index>(j.size()), 2);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto & p = j[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorCode::MalformedInput, "expected an [x, y] pair");
    }
    out(static_cast<Eigen::Index>(i), 0) = p[0].get<double>();
    out(static_cast<Eigen::Index>(i), 1) = p[1].get<double>();
  }
  return out;
}

json polyline_to_json(const Polyline & p)
{
  json out = json::array();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    out.push_back({p(i, 0), p(i, 1)});
  }
  return out;
}

/// Resolve the scenario frame count from the target length and drop partial agents.
void apply_horizon(Scenario & s, std::vector<AgentTrack> tracks)
{
  const auto target_it =
    std::find_if(tracks.begin(), tracks.end(), [](const auto & a) { return a.is_target; });
  if (target_it == tracks.end()) {
    throw Error(ErrorCode::NoTargetAgent, "scenario '" + s.id + "' has no target agent");
  }
  const auto target_len = target_it->xy.rows();
  Eigen::Index frames = 0;
  if (target_len >= s.horizon.full_len()) {
    frames = s.horizon.full_len();
  } else if (target_len >= s.horizon.obs_len) {
    frames = s.horizon.obs_len;
  } else {
    throw Error(
      ErrorCode::InsufficientFrames, "target of scenario '" + s.id + "' has only " +
                                       std::to_string(target_len) + " frames");
  }
  s.agents.clear();
  for (auto & t : tracks) {
    if (t.xy.rows() < frames) {
      continue;
    }
    t.xy = Polyline(t.xy.topRows(frames));
    s.agents.push_back(std::move(t));
  }
}

Scenario parse_native(std::string_view text, const Horizon & horizon)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception & e) {
    throw Error(ErrorCode::MalformedInput, e.what());
  }
  Scenario s;
  s.horizon = horizon;
  try {
    s.id = doc.at("scenario_id").get<std::string>();
    std::vector<AgentTrack> tracks;
    for (const auto & a : doc.at("agents")) {
      AgentTrack t;
      t.id = a.at("id").get<std::string>();
      t.is_target = a.value("target", false);
      t.xy = polyline_from_json(a.at("xy"));
      tracks.push_back(std::move(t));
    }
    std::vector<Lane> lanes;
    if (doc.contains("lanes")) {
      for (const auto & l : doc.at("lanes")) {
        Lane lane;
        lane.id = l.at("id").get<std::string>();
        lane.waypoints = polyline_from_json(l.at("waypoints"));
        lane.successors = l.value("successors", std::vector<std::string>{});
        lane.predecessors = l.value("predecessors", std::vector<std::string>{});
        lanes.push_back(std::move(lane));
      }
    }
    s.lane_graph = LaneGraph(std::move(lanes));
    if (doc.contains("city")) {
      s.city = doc.at("city").get<std::string>();
    }
    if (doc.contains("truth")) {
      const auto & t = doc.at("truth");
      MotionTruth truth;
      truth.motion = parse_motion_model(t.at("motion").get<std::string>());
      truth.topology = parse_lane_topology(t.at("topology").get<std::string>());
      truth.speed = t.at("speed").get<double>();
      truth.accel = t.at("accel").get<double>();
      truth.target_lanes = t.value("target_lanes", std::vector<std::string>{});
      s.truth = truth;
    }
    apply_horizon(s, std::move(tracks));
  } catch (const json::exception & e) {
    throw Error(ErrorCode::MalformedInput, e.what());
  }
  s.validate();
  return s;
}

std::vector<std::string> split_csv_line(const std::string & line)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

double parse_number(const std::string & field)
{
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &used);
  } catch (const std::exception &) {
    throw Error(ErrorCode::MalformedInput, "not a number: '" + field + "'");
  }
  if (used != field.size()) {
    throw Error(ErrorCode::MalformedInput, "not a number: '" + field + "'");
  }
  return value;
}

Scenario parse_argoverse_csv(std::string_view text, std::string_view id_hint, const Horizon & horizon)
{
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::MalformedInput, "empty CSV");
  }
  const auto header = split_csv_line(line);
  auto column = [&](const std::string & name) -> int {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int c_time = column("TIMESTAMP");
  const int c_track = column("TRACK_ID");
  const int c_type = column("OBJECT_TYPE");
  const int c_x = column("X");
  const int c_y = column("Y");
  const int c_city = column("CITY_NAME");
  if (c_time < 0 || c_track < 0 || c_type < 0 || c_x < 0 || c_y < 0) {
    throw Error(ErrorCode::MalformedInput, "CSV header lacks a required column");
  }

  struct Obs
  {
    double time;
    double x;
    double y;
  };
  std::map<std::string, std::vector<Obs>> by_track;
  std::vector<std::string> track_order;
  std::string target_id;
  std::optional<std::string> city;
  std::map<double, int> times;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() < header.size()) {
      throw Error(ErrorCode::MalformedInput, "short CSV row: '" + line + "'");
    }
    const double t = parse_number(f[c_time]);
    const auto & track = f[c_track];
    if (!by_track.count(track)) {
      track_order.push_back(track);
    }
    by_track[track].push_back({t, parse_number(f[c_x]), parse_number(f[c_y])});
    times.emplace(t, 0);
    if (f[c_type] == "AGENT") {
      if (!target_id.empty() && target_id != track) {
        throw Error(ErrorCode::MalformedInput, "CSV has more than one AGENT track");
      }
      target_id = track;
    }
    if (c_city >= 0 && !city) {
      city = f[c_city];
    }
  }
  int frame = 0;
  for (auto & [t, idx] : times) {
    idx = frame++;
  }

  Scenario s;
  s.id = std::string(id_hint);
  s.city = city;
  s.horizon = horizon;
  std::vector<AgentTrack> tracks;
  for (const auto & id : track_order) {
    auto obs = by_track[id];
    std::sort(obs.begin(), obs.end(), [](const Obs & a, const Obs & b) { return a.time < b.time; });
    // Keep the contiguous prefix starting at frame 0; later gaps end the track.
    AgentTrack track;
    track.id = id;
    track.is_target = id == target_id;
    std::vector<Obs> prefix;
    for (const auto & o : obs) {
      if (times.at(o.time) != static_cast<int>(prefix.size())) {
        break;
      }
      prefix.push_back(o);
    }
    track.xy.resize(static_cast<Eigen::Index>(prefix.size()), 2);
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      track.xy(static_cast<Eigen::Index>(i), 0) = prefix[i].x;
      track.xy(static_cast<Eigen::Index>(i), 1) = prefix[i].y;
    }
    tracks.push_back(std::move(track));
  }
  apply_horizon(s, std::move(tracks));
  s.validate();
  return s;
}

}  // namespace

Scenario parse_scenario(
  std::string_view text, ScenarioFormat format, std::string_view id_hint, const Horizon & horizon)
{
  switch (format) {
    case ScenarioFormat::NativeJson: return parse_native(text, horizon);
    case ScenarioFormat::ArgoverseCsv: return parse_argoverse_csv(text, id_hint, horizon);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scenario format");
}

std::string to_native_json(const Scenario & s)
{
  json doc;
  doc["scenario_id"] = s.id;
  json agents = json::array();
  for (const auto & a : s.agents) {
    agents.push_back({{"id", a.id}, {"target", a.is_target}, {"xy", polyline_to_json(a.xy)}});
  }
  doc["agents"] = std::move(agents);
  json lanes = json::array();
  for (const auto & l : s.lane_graph.lanes()) {
    lanes.push_back(
      {{"id", l.id},
       {"waypoints", polyline_to_json(l.waypoints)},
       {"successors", l.successors},
       {"predecessors", l.predecessors}});
  }
  doc["lanes"] = std::move(lanes);
  if (s.city) {
    doc["city"] = *s.city;
  }
  if (s.truth) {
    doc["truth"] = {
      {"motion", std::string(to_string(s.truth->motion))},
      {"topology", std::string(to_string(s.truth->topology))},
      {"speed", s.truth->speed},
      {"accel", s.truth->accel},
      {"target_lanes", s.truth->target_lanes}};
  }
  return doc.dump(1);
}

Polyline TargetFrame::to_local(const Polyline & pts) const
{
  Polyline out(pts.rows(), 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    out.row(i) = to_local(Point2(pts.row(i).transpose())).transpose();
  }
  return out;
}

Polyline TargetFrame::to_world(const Polyline & pts) const
{
  Polyline out(pts.rows(), 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    out.row(i) = to_world(Point2(pts.row(i).transpose())).transpose();
  }
  return out;
}

std::pair<Scenario, TargetFrame> to_target_frame(const Scenario & s)
{
  const auto & target = s.target();
  const int last = s.horizon.obs_len - 1;
  TargetFrame frame;
  frame.origin = target.xy.row(last).transpose();
  if (last >= 1) {
    const Point2 heading = (target.xy.row(last) - target.xy.row(last - 1)).transpose();
    const double norm = heading.norm();
    if (norm >= kMinHeadingNorm) {
      // Rotate by (pi/2 - theta) so the heading maps onto +y.
      const double c = heading.y() / norm;
      const double sn = heading.x() / norm;
      frame.rotation << c, -sn, sn, c;
    }
  }

  Scenario out = s;
  for (auto & a : out.agents) {
    a.xy = frame.to_local(a.xy);
  }
  std::vector<Lane> lanes = s.lane_graph.lanes();
  for (auto & l : lanes) {
    l.waypoints = frame.to_local(l.waypoints);
  }
  out.lane_graph = LaneGraph(std::move(lanes));
  return {std::move(out), frame};
}

Polyline relative_displacements(const Polyline & xy)
{
  if (xy.rows() < 2) {
    throw Error(ErrorCode::TooShort, "relative displacements need at least 2 positions");
  }
  return xy.bottomRows(xy.rows() - 1) - xy.topRows(xy.rows() - 1);
}

}  // namespace trajkit
