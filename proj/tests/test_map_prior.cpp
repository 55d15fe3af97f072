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
#include "trajkit/map_prior.hpp"
#include "trajkit/synthetic.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace trajkit;

namespace
{

constexpr double kPi = 3.14159265358979323846;

Polyline straight_line(double x, double y0, double y1, double step = 1.0)
{
  const int n = static_cast<int>(std::round((y1 - y0) / step)) + 1;
  Polyline p(n, 2);
  for (int i = 0; i < n; ++i) p.row(i) << x, y0 + step * i;
  return p;
}

Polyline heading_up_history()
{
  Polyline obs(20, 2);
  for (int i = 0; i < 20; ++i) obs.row(i) << 0.0, -19.0 + i;
  return obs;
}

double min_distance_to_points(const Point2 & p, const Polyline & pts)
{
  double best = INFINITY;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) best = std::min(best, (pts.row(i).transpose() - p).norm());
  return best;
}

Scenario local_scene(const SynthSpec & spec)
{
  return to_target_frame(generate_synthetic(spec)).first;
}

}  // namespace

TEST_CASE("single straight lane yields one candidate")
{
  LaneGraph g({{"only", straight_line(0.0, -30.0, 80.0), {}, {}}});
  const auto c = candidate_centerlines(g, heading_up_history(), 3, 40.0);
  REQUIRE(c.size() == 1);
  CHECK(c[0].source_lane_ids == std::vector<std::string>{"only"});
}

TEST_CASE("fork yields two candidates sharing a prefix")
{
  SynthSpec spec;
  spec.lane_topology = LaneTopology::Fork;
  spec.seed = 3;
  const auto s = local_scene(spec);
  const auto c = candidate_centerlines(s.lane_graph, s.target_observed(), 3, 60.0);
  REQUIRE(c.size() == 2);
  CHECK(c[0].source_lane_ids.front() == "lane_in");
  CHECK(c[1].source_lane_ids.front() == "lane_in");
  CHECK(c[0].source_lane_ids.back() != c[1].source_lane_ids.back());
  const Eigen::Index shared = s.lane_graph.find("lane_in")->waypoints.rows();
  CHECK(c[0].waypoints.topRows(shared) == c[1].waypoints.topRows(shared));
}

TEST_CASE("aligned lane outranks a nearer opposing lane")
{
  // Lane A is 1.5 m away and aligned; lane B is 1.0 m away but runs against
  // the heading; lane C is aligned but 3 m away.
  Polyline down = straight_line(-1.0, -30.0, 60.0).colwise().reverse();
  LaneGraph g({
    {"A", straight_line(1.5, -30.0, 60.0), {}, {}},
    {"B", down, {}, {}},
    {"C", straight_line(3.0, -30.0, 60.0), {}, {}},
  });
  const auto c = candidate_centerlines(g, heading_up_history(), 3, 40.0);
  // Exhaustive scoring: -d - 2 (1 - cos).
  std::vector<std::pair<double, std::string>> oracle = {
    {-1.5 - 0.0, "A"}, {-1.0 - 2.0 * 2.0, "B"}, {-3.0 - 0.0, "C"}};
  std::sort(oracle.begin(), oracle.end(), std::greater<>());
  REQUIRE(c.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(c[i].source_lane_ids.front() == oracle[i].second);
}

TEST_CASE("candidate search errors")
{
  CHECK_THROWS_AS(candidate_centerlines(LaneGraph{}, heading_up_history(), 3, 10.0), Error);
  LaneGraph far({{"far", straight_line(80.0, 0.0, 10.0), {}, {}}});
  try {
    candidate_centerlines(far, heading_up_history(), 3, 10.0);
    FAIL("expected NoLaneInRange");
  } catch (const Error & e) {
    CHECK(e.code() == ErrorCode::NoLaneInRange);
  }
}

TEST_CASE("truncation examples")
{
  Centerline c{straight_line(0.0, 0.0, 10.0), {"l"}};
  // ctra_distance floors at 25 m, so scale the spacing: 10 m gaps, d = 25 m.
  Centerline wide{straight_line(0.0, 0.0, 100.0, 10.0), {"l"}};
  const auto cut = truncate_centerline(wide, {0.0, 0.0, 0.3}, Point2(0.0, 0.0), 3.0);
  CHECK(cut.waypoints.rows() == 4);
  CHECK(cut.waypoints(3, 1) == doctest::Approx(30.0));

  const auto whole = truncate_centerline(c, {10.0, 0.0, 0.3}, Point2(0.2, 0.1), 3.0);
  CHECK(whole.waypoints.rows() == c.waypoints.rows());

  const auto later = truncate_centerline(wide, {0.0, 0.0, 0.3}, Point2(0.5, 21.0), 3.0);
  CHECK(later.waypoints(0, 1) == doctest::Approx(20.0));
  CHECK(later.waypoints(later.waypoints.rows() - 1, 1) == doctest::Approx(50.0));
}

TEST_CASE("truncation matches a prefix-sum scan")
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> gap(0.3, 4.0), angle(-0.4, 0.4), speed(0.0, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    Polyline p(40, 2);
    Point2 pos(0, 0);
    double heading = 0.0;
    for (int i = 0; i < 40; ++i) {
      p.row(i) = pos.transpose();
      heading += angle(rng);
      pos += gap(rng) * Point2(std::sin(heading), std::cos(heading));
    }
    const KinematicState st{speed(rng), 0.0, 0.3};
    const Point2 last = p.row(trial % 7).transpose() + Point2(0.1, -0.05);
    const auto cut = truncate_centerline({p, {"x"}}, st, last, 3.0);

    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i < p.rows(); ++i) {
      if ((p.row(i).transpose() - last).norm() < (p.row(start).transpose() - last).norm()) start = i;
    }
    std::vector<double> prefix{0.0};
    for (Eigen::Index i = start + 1; i < p.rows(); ++i) prefix.push_back(prefix.back() + (p.row(i) - p.row(i - 1)).norm());
    const double d = std::max(st.speed * 3.0, 25.0);
    Eigen::Index end = p.rows() - 1;
    for (std::size_t k = 1; k < prefix.size(); ++k) {
      if (prefix[k] >= d) {
        end = start + static_cast<Eigen::Index>(k);
        break;
      }
    }
    REQUIRE(cut.waypoints.rows() == end - start + 1);
    CHECK(cut.waypoints == p.middleRows(start, end - start + 1));
    // Never longer than the travel distance plus one gap.
    double length = 0.0;
    double widest = 0.0;
    for (Eigen::Index i = 1; i < cut.waypoints.rows(); ++i) {
      const double g = (cut.waypoints.row(i) - cut.waypoints.row(i - 1)).norm();
      length += g;
      widest = std::max(widest, g);
    }
    CHECK(length <= d + widest + 1e-9);
  }
}

TEST_CASE("resampling a straight segment")
{
  Polyline seg(5, 2);
  seg << 0, 0, 0, 5, 0, 10, 0, 20, 0, 29;
  const auto r = resample_cubic(seg, 30);
  REQUIRE(r.rows() == 30);
  for (int i = 0; i < 30; ++i) {
    CHECK(std::abs(r(i, 0)) < 1e-9);
    CHECK(std::abs(r(i, 1) - i) < 1e-9);
  }
  Polyline two(2, 2);
  two << 1, 1, 4, 5;
  const auto lin = resample_cubic(two, 30);
  CHECK(lin.row(0) == two.row(0));
  CHECK(lin.row(29) == two.row(1));
  CHECK((lin.row(10) - Eigen::RowVector2d(1 + 3.0 * 10 / 29, 1 + 4.0 * 10 / 29)).norm() < 1e-12);
}

TEST_CASE("resampled quarter circle stays near the true arc")
{
  const double radius = 20.0;
  Polyline coarse(12, 2);
  for (int i = 0; i < 12; ++i) {
    const double a = kPi / 2 * i / 11;
    coarse.row(i) << radius * std::cos(a), radius * std::sin(a);
  }
  // Dense piecewise-linear reference at 1000 points; its own chord error
  // bounds the comparison from below.
  Polyline dense(1000, 2);
  for (int i = 0; i < 1000; ++i) {
    const double a = kPi / 2 * i / 999;
    dense.row(i) << radius * std::cos(a), radius * std::sin(a);
  }
  const double coarse_sagitta = radius * (1 - std::cos(kPi / 2 / 11 / 2));
  const auto r = resample_cubic(coarse, 30);
  CHECK(r.row(0) == coarse.row(0));
  CHECK(r.row(29) == coarse.row(11));
  double worst = 0.0;
  for (int i = 0; i < 30; ++i) worst = std::max(worst, min_distance_to_points(r.row(i).transpose(), dense));
  const double dense_spacing = radius * kPi / 2 / 999;
  CHECK(worst < coarse_sagitta + dense_spacing);
  for (int i = 0; i < 30; ++i) CHECK(std::abs(r.row(i).norm() - radius) < coarse_sagitta);

  std::vector<double> gaps;
  for (int i = 1; i < 30; ++i) gaps.push_back((r.row(i) - r.row(i - 1)).norm());
  const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / gaps.size();
  for (double g : gaps) CHECK(std::abs(g - mean) / mean < 0.1);
}

TEST_CASE("plausible area sampling")
{
  const std::vector<Polyline> lines{straight_line(0.0, 0.0, 29.0), straight_line(3.0, 0.0, 29.0)};
  const auto exact = sample_plausible_area(lines, 200, 0.0, 5);
  for (int i = 0; i < 200; ++i) {
    const Point2 p = exact.row(i).transpose();
    CHECK(std::min(min_distance_to_points(p, lines[0]), min_distance_to_points(p, lines[1])) == 0.0);
  }
  CHECK(sample_plausible_area(lines, 50, 0.2, 9) == sample_plausible_area(lines, 50, 0.2, 9));
  CHECK(sample_plausible_area(lines, 50, 0.2, 9) != sample_plausible_area(lines, 50, 0.2, 10));

  // Offsets from the chosen point, recovered with sigma = 0 under the same seed.
  const int n = 100000;
  const auto noisy = sample_plausible_area(lines, n, 0.2, 77);
  const auto base = sample_plausible_area(lines, n, 0.0, 77);
  const Eigen::RowVector2d mean = (noisy - base).colwise().mean();
  CHECK(std::abs(mean(0)) < 0.01);
  CHECK(std::abs(mean(1)) < 0.01);

  CHECK_THROWS_AS(sample_plausible_area({}, 10, 0.2, 1), Error);
}

TEST_CASE("prior on a straight lane at constant velocity")
{
  SynthSpec spec;
  spec.speed = 10.0;
  spec.n_agents = 1;
  const auto s = local_scene(spec);
  const auto state = estimate_target_state(s);
  const auto prior = build_prior(s, state);
  REQUIRE(prior.centerlines.size() == 3);
  CHECK(prior.valid == std::vector<bool>{true, false, false});
  CHECK(prior.num_valid() == 1);
  CHECK((prior.centerlines[0].row(29) - Eigen::RowVector2d(0, 30)).norm() < 0.5);
  CHECK(prior.centerlines[0].rows() == 30);
  CHECK(prior.centerlines[1].isZero());
  CHECK(prior.plausible_points.rows() == 200);
  for (int i = 0; i < 200; ++i) {
    CHECK(min_distance_to_points(prior.plausible_points.row(i).transpose(), prior.centerlines[0]) < 3 * 0.2 + 0.5 + 1.0);
  }
}

TEST_CASE("prior for a stopped agent ends 25 m along the lane")
{
  SynthSpec spec;
  spec.speed = 0.0;
  const auto s = local_scene(spec);
  const auto prior = build_prior(s, estimate_target_state(s));
  REQUIRE(prior.valid[0]);
  CHECK(prior.centerlines[0].row(0).norm() < 1e-9);
  CHECK((prior.centerlines[0].row(29) - Eigen::RowVector2d(0, 25)).norm() < 0.5);
}

TEST_CASE("prior without a lane in range is fully padded")
{
  SynthSpec spec;
  const auto s0 = local_scene(spec);
  Scenario s = s0;
  s.lane_graph = LaneGraph{};
  const auto prior = build_prior(s, estimate_target_state(s));
  CHECK(prior.num_valid() == 0);
  for (const auto & c : prior.centerlines) CHECK(c.isZero());
  CHECK(prior.plausible_points.isZero());
}

TEST_CASE("prior is equivariant to rigid transforms")
{
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthSpec spec;
    spec.lane_topology = seed % 2 ? LaneTopology::Fork : LaneTopology::Curve;
    spec.motion = MotionModel::CTRA;
    spec.noise_sigma = 0.1;
    spec.seed = seed;
    const auto s = local_scene(spec);
    PriorOptions opts;
    opts.area_sigma = 0.0;
    const auto reference = build_prior(s, estimate_target_state(s, opts), opts);

    const Eigen::Matrix2d rot = Eigen::Rotation2Dd(0.4 + 0.3 * static_cast<double>(seed)).toRotationMatrix();
    const Point2 shift(12.0, -7.0);
    auto place = [&](Polyline & pts) {
      for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) = (rot * pts.row(i).transpose() + shift).transpose();
    };
    Scenario moved = s;
    for (auto & a : moved.agents) place(a.xy);
    std::vector<Lane> lanes = s.lane_graph.lanes();
    for (auto & l : lanes) place(l.waypoints);
    moved.lane_graph = LaneGraph(lanes);
    const auto other = build_prior(moved, estimate_target_state(moved, opts), opts);

    REQUIRE(other.valid == reference.valid);
    for (std::size_t m = 0; m < reference.centerlines.size(); ++m) {
      if (!reference.valid[m]) continue;
      Polyline back = other.centerlines[m];
      for (Eigen::Index i = 0; i < back.rows(); ++i) back.row(i) = (rot.transpose() * (back.row(i).transpose() - shift)).transpose();
      CHECK((back - reference.centerlines[m]).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("prior json round trip")
{
  SynthSpec spec;
  spec.lane_topology = LaneTopology::Fork;
  spec.seed = 2;
  const auto s = local_scene(spec);
  PriorOptions opts;
  opts.plausible_points = 20;
  const auto prior = build_prior(s, estimate_target_state(s), opts);
  const auto back = prior_from_json(prior_to_json(prior));
  CHECK(back.valid == prior.valid);
  CHECK(back.plausible_points == prior.plausible_points);
  for (std::size_t m = 0; m < 3; ++m) CHECK(back.centerlines[m] == prior.centerlines[m]);
  CHECK(back.state.speed == prior.state.speed);
  CHECK(back.state.accel == prior.state.accel);
  CHECK(prior_to_json(back) == prior_to_json(prior));
}

TEST_CASE("kinematic truncation ordering on noisy curved scenes")
{
  // Smaller mirror of the end-point comparison: constant-acceleration with
  // filtering beats constant-velocity without it.
  double ctra_ls = 0.0, ctrv_raw = 0.0;
  int n = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SynthSpec spec;
    spec.motion = MotionModel::CTRA;
    spec.lane_topology = LaneTopology::Curve;
    spec.noise_sigma = 0.3;
    spec.seed = seed;
    const auto s = local_scene(spec);
    const Point2 gt = s.target_future().row(29).transpose();
    PriorOptions best;
    PriorOptions worst;
    worst.use_accel = false;
    worst.state.filter = false;
    const auto a = build_prior(s, estimate_target_state(s, best), best);
    const auto b = build_prior(s, estimate_target_state(s, worst), worst);
    if (!a.valid[0] || !b.valid[0]) continue;
    ctra_ls += (a.centerlines[0].row(29).transpose() - gt).norm();
    ctrv_raw += (b.centerlines[0].row(29).transpose() - gt).norm();
    ++n;
  }
  REQUIRE(n > 90);
  CHECK(ctra_ls < ctrv_raw);
}
