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


#include "trajkit/error.hpp"
#include "trajkit/scenario.hpp"
#include "trajkit/synthetic.hpp"

#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

using namespace trajkit;

namespace
{

std::string fixture(const std::string & name)
{
  std::ifstream in(std::string(TRAJKIT_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode code_of(const std::function<void()> & f)
{
  try {
    f();
  } catch (const Error & e) {
    return e.code();
  }
  FAIL("expected a trajkit::Error");
  return ErrorCode::InvalidArgument;
}

Scenario random_scene(std::mt19937_64 & rng, int agents)
{
  std::normal_distribution<double> n(0.0, 5.0);
  Scenario s;
  s.id = "random";
  for (int a = 0; a < agents; ++a) {
    AgentTrack t;
    t.id = "a" + std::to_string(a);
    t.is_target = a == 0;
    t.xy.resize(s.horizon.full_len(), 2);
    Point2 p(n(rng), n(rng));
    for (int f = 0; f < s.horizon.full_len(); ++f) {
      p += Point2(n(rng), n(rng)) * 0.1;
      t.xy.row(f) = p.transpose();
    }
    s.agents.push_back(t);
  }
  return s;
}

}  // namespace

TEST_CASE("native json keeps full-history agents only")
{
  const auto s = parse_scenario(fixture("three_agents.json"), ScenarioFormat::NativeJson);
  CHECK(s.agents.size() == 3);
  CHECK(s.frame_count() == 50);
  CHECK(s.target().id == "tgt");
  CHECK(s.lane_graph.size() == 2);
  REQUIRE(s.city.has_value());
  CHECK(*s.city == "desk");
  for (const auto & a : s.agents) CHECK(a.id != "short");
}

TEST_CASE("missing target is reported")
{
  CHECK(
    code_of([] { parse_scenario(fixture("no_target.json"), ScenarioFormat::NativeJson); }) ==
    ErrorCode::NoTargetAgent);
}

TEST_CASE("malformed and short inputs")
{
  CHECK(code_of([] { parse_scenario("{not json", ScenarioFormat::NativeJson); }) ==
        ErrorCode::MalformedInput);
  CHECK(code_of([] { parse_scenario("{\"agents\": []}", ScenarioFormat::NativeJson); }) ==
        ErrorCode::MalformedInput);
  const std::string short_target =
    R"({"scenario_id": "s", "agents": [{"id": "t", "target": true, "xy": [[0,0],[1,1],[2,2]]}], "lanes": []})";
  CHECK(code_of([&] { parse_scenario(short_target, ScenarioFormat::NativeJson); }) ==
        ErrorCode::InsufficientFrames);
  CHECK(code_of([] { parse_scenario("", ScenarioFormat::ArgoverseCsv); }) ==
        ErrorCode::MalformedInput);
  CHECK(code_of([] { parse_scenario("A,B\n1,2\n", ScenarioFormat::ArgoverseCsv); }) ==
        ErrorCode::MalformedInput);
}

TEST_CASE("dangling lane references are rejected")
{
  std::string text = fixture("three_agents.json");
  const auto pos = text.find("\"L1\"");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 4, "\"LX\"");
  CHECK(code_of([&] { parse_scenario(text, ScenarioFormat::NativeJson); }) ==
        ErrorCode::MalformedInput);
}

TEST_CASE("argoverse csv splits a 50-frame track into history and future")
{
  const auto s = parse_scenario(fixture("track_50.csv"), ScenarioFormat::ArgoverseCsv, "csv50");
  CHECK(s.id == "csv50");
  CHECK(s.agents.size() == 2);
  CHECK(s.has_future());
  const auto obs = s.target_observed();
  const auto fut = s.target_future();
  REQUIRE(obs.rows() == 20);
  REQUIRE(fut.rows() == 30);
  // Manual parse of the fixture: x = 100 + 0.5 t, y = 200 + t.
  CHECK(obs(0, 0) == doctest::Approx(100.0));
  CHECK(obs(19, 1) == doctest::Approx(219.0));
  CHECK(fut(0, 0) == doctest::Approx(110.0));
  CHECK(fut(29, 1) == doctest::Approx(249.0));
  CHECK(s.agents[1].id == "av-0");
  CHECK(*s.city == "PIT");
}

TEST_CASE("hand-built 10-row csv")
{
  Horizon h;
  h.obs_len = 3;
  h.pred_len = 4;
  const auto s = parse_scenario(fixture("short_10.csv"), ScenarioFormat::ArgoverseCsv, "tiny", h);
  // Track "b" stops after 3 frames, short of the 7-frame horizon.
  REQUIRE(s.agents.size() == 1);
  const auto obs = s.target_observed();
  const auto fut = s.target_future();
  Polyline expect_obs(3, 2);
  expect_obs << 1.0, 2.0, 1.5, 2.5, 2.0, 3.0;
  Polyline expect_fut(4, 2);
  expect_fut << 2.5, 3.5, 3.0, 4.0, 3.5, 4.5, 4.0, 5.0;
  CHECK(obs.isApprox(expect_obs));
  CHECK(fut.isApprox(expect_fut));
  CHECK(*s.city == "MIA");
}

TEST_CASE("native json round trip is idempotent")
{
  const auto s = parse_scenario(fixture("three_agents.json"), ScenarioFormat::NativeJson);
  const auto once = to_native_json(s);
  const auto twice = to_native_json(parse_scenario(once, ScenarioFormat::NativeJson));
  CHECK(once == twice);

  SynthSpec spec;
  spec.n_agents = 3;
  spec.motion = MotionModel::CTRA;
  spec.lane_topology = LaneTopology::Fork;
  spec.noise_sigma = 0.1;
  spec.seed = 11;
  const auto g = generate_synthetic(spec);
  const auto a = to_native_json(g);
  const auto back = parse_scenario(a, ScenarioFormat::NativeJson);
  CHECK(to_native_json(back) == a);
  REQUIRE(back.truth.has_value());
  CHECK(back.truth->motion == MotionModel::CTRA);
}

TEST_CASE("target frame examples")
{
  Scenario s;
  s.horizon.obs_len = 2;
  s.horizon.pred_len = 0;
  AgentTrack t;
  t.id = "t";
  t.is_target = true;
  t.xy.resize(2, 2);
  t.xy << 0.0, 0.0, 1.0, 0.0;
  s.agents.push_back(t);
  auto [local, frame] = to_target_frame(s);
  // Heading +x needs a +90 degree rotation.
  CHECK(frame.rotation(0, 0) == doctest::Approx(0.0));
  CHECK(frame.rotation(1, 0) == doctest::Approx(1.0));
  CHECK(frame.rotation.determinant() == doctest::Approx(1.0));
  CHECK(local.agents[0].xy.row(1).norm() < 1e-12);
  CHECK(local.agents[0].xy(0, 1) == doctest::Approx(-1.0));

  s.agents[0].xy << 0.0, -1.0, 0.0, 0.0;
  auto [same, identity] = to_target_frame(s);
  CHECK(identity.rotation.isApprox(Eigen::Matrix2d::Identity()));
  CHECK(identity.origin.norm() == 0.0);

  // A stationary target falls back to the identity rotation.
  s.agents[0].xy << 2.0, 3.0, 2.0, 3.0;
  auto [still, fallback] = to_target_frame(s);
  CHECK(fallback.rotation.isApprox(Eigen::Matrix2d::Identity()));
  CHECK(still.agents[0].xy.norm() < 1e-12);
}

TEST_CASE("target frame is a rigid transform")
{
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_scene(rng, 4);
    const auto [local, frame] = to_target_frame(s);
    CHECK((frame.rotation.transpose() * frame.rotation - Eigen::Matrix2d::Identity()).norm() < 1e-9);
    CHECK(std::abs(frame.rotation.determinant() - 1.0) < 1e-9);
    CHECK(local.target().xy.row(s.horizon.obs_len - 1).norm() < 1e-9);
    const Point2 heading = (local.target().xy.row(s.horizon.obs_len - 1) -
                            local.target().xy.row(s.horizon.obs_len - 2)).transpose();
    CHECK(std::abs(heading.x()) < 1e-9);
    CHECK(heading.y() > 0.0);
    // Brute-force distance matrix over every agent and frame pair.
    double worst = 0.0;
    for (std::size_t a = 0; a < s.agents.size(); ++a) {
      for (std::size_t b = 0; b < s.agents.size(); ++b) {
        for (int f = 0; f < s.frame_count(); f += 7) {
          const double d0 = (s.agents[a].xy.row(f) - s.agents[b].xy.row(f)).norm();
          const double d1 = (local.agents[a].xy.row(f) - local.agents[b].xy.row(f)).norm();
          worst = std::max(worst, std::abs(d0 - d1));
        }
      }
    }
    CHECK(worst < 1e-9);
    CHECK((frame.to_world(local.agents[2].xy) - s.agents[2].xy).norm() < 1e-9);
  }
}

TEST_CASE("relative displacements")
{
  Polyline p(3, 2);
  p << 0, 0, 1, 0, 3, 0;
  Polyline expected(2, 2);
  expected << 1, 0, 2, 0;
  CHECK(relative_displacements(p) == expected);

  Polyline still = Polyline::Constant(5, 2, 4.0);
  CHECK(relative_displacements(still).norm() == 0.0);

  CHECK(code_of([] { relative_displacements(Polyline(1, 2)); }) == ErrorCode::TooShort);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  Polyline track(20, 2);
  for (int i = 0; i < 20; ++i) track.row(i) << n(rng), n(rng);
  const auto d = relative_displacements(track);
  REQUIRE(d.rows() == 19);
  Point2 acc = track.row(0).transpose();
  for (int i = 0; i < 19; ++i) {
    acc += d.row(i).transpose();
    CHECK((acc - track.row(i + 1).transpose()).norm() < 1e-12);
  }
}

TEST_CASE("format and enum parsing")
{
  CHECK(parse_scenario_format("native_json") == ScenarioFormat::NativeJson);
  CHECK(parse_scenario_format("argoverse_csv") == ScenarioFormat::ArgoverseCsv);
  CHECK(code_of([] { parse_scenario_format("xml"); }) == ErrorCode::InvalidArgument);
  CHECK(parse_motion_model("ctra") == MotionModel::CTRA);
  CHECK(parse_lane_topology("fork") == LaneTopology::Fork);
}
