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
#include "trajkit/metrics.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

using namespace trajkit;

namespace
{

Polyline line(int n, double vx, double vy)
{
  Polyline p(n, 2);
  for (int i = 0; i < n; ++i) p.row(i) << vx * (i + 1), vy * (i + 1);
  return p;
}

Polyline random_path(int n, std::mt19937_64 & rng)
{
  std::normal_distribution<double> g(0.0, 1.0);
  Polyline p(n, 2);
  Point2 at(g(rng), g(rng));
  for (int i = 0; i < n; ++i) {
    at += Point2(1.0 + 0.3 * g(rng), 0.3 * g(rng));
    p.row(i) = at.transpose();
  }
  return p;
}

/// Mean pointwise error of every subset of size k_eval ranked by confidence, by brute force.
std::pair<double, double> brute_min(
  const Polyline & gt, const std::vector<Polyline> & preds, const Eigen::VectorXd & conf, int k_eval)
{
  std::vector<int> idx(preds.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> chosen;
  for (int r = 0; r < k_eval; ++r) {
    int best = -1;
    for (int m : idx) {
      if (std::find(chosen.begin(), chosen.end(), m) != chosen.end()) continue;
      if (best < 0 || conf[m] > conf[best]) best = m;
    }
    chosen.push_back(best);
  }
  double a = std::numeric_limits<double>::infinity();
  double f = std::numeric_limits<double>::infinity();
  for (int m : chosen) {
    double sum = 0.0;
    for (Eigen::Index t = 0; t < gt.rows(); ++t) {
      sum += std::hypot(gt(t, 0) - preds[m](t, 0), gt(t, 1) - preds[m](t, 1));
    }
    a = std::min(a, sum / static_cast<double>(gt.rows()));
    const auto last = gt.rows() - 1;
    f = std::min(f, std::hypot(gt(last, 0) - preds[m](last, 0), gt(last, 1) - preds[m](last, 1)));
  }
  return {a, f};
}

}  // namespace

TEST_CASE("displacement examples")
{
  const Polyline gt = line(30, 1.0, 0.0);
  const Polyline shifted = gt.rowwise() + Eigen::RowVector2d(0.0, 1.0);
  Polyline end_off = gt;
  end_off.row(29) += Eigen::RowVector2d(3.0, 4.0);
  CHECK(ade(gt, gt) == 0.0);
  CHECK(fde(gt, gt) == 0.0);
  CHECK(ade(gt, shifted) == doctest::Approx(1.0));
  CHECK(fde(gt, shifted) == doctest::Approx(1.0));
  CHECK(fde(gt, end_off) == doctest::Approx(5.0));
  CHECK(ade(gt, end_off) == doctest::Approx(5.0 / 30.0));

  const Eigen::VectorXd conf = (Eigen::VectorXd(3) << 0.2, 0.5, 0.3).finished();
  const std::vector<Polyline> preds{gt, shifted, end_off};
  CHECK(min_ade(gt, preds, conf, 3) == 0.0);
  CHECK(min_ade(gt, preds, conf, 1) == doctest::Approx(1.0));
  CHECK(min_fde(gt, preds, conf, 2) == doctest::Approx(1.0));
  CHECK(min_fde(gt, preds, conf, 3) == 0.0);
}

TEST_CASE("mode selection ranks by confidence")
{
  const Eigen::VectorXd conf = (Eigen::VectorXd(6) << 0.1, 0.3, 0.05, 0.3, 0.2, 0.05).finished();
  CHECK(selected_modes(conf, 1) == std::vector<int>{1});
  CHECK(selected_modes(conf, 2) == std::vector<int>{1, 3});
  CHECK(selected_modes(conf, 6).size() == 6);
  CHECK_THROWS_AS(selected_modes(conf, 0), Error);
  CHECK_THROWS_AS(selected_modes(conf, 7), Error);
}

TEST_CASE("minimum errors match a brute-force scan")
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Polyline gt = random_path(30, rng);
    std::vector<Polyline> preds;
    Eigen::VectorXd conf(6);
    for (int m = 0; m < 6; ++m) {
      preds.push_back(random_path(30, rng));
      conf[m] = u(rng);
    }
    conf /= conf.sum();
    for (int k : {1, 3, 6}) {
      const auto [a, f] = brute_min(gt, preds, conf, k);
      CHECK(min_ade(gt, preds, conf, k) == doctest::Approx(a).epsilon(1e-12));
      CHECK(min_fde(gt, preds, conf, k) == doctest::Approx(f).epsilon(1e-12));
    }
    // More modes can only help.
    CHECK(min_ade(gt, preds, conf, 6) <= min_ade(gt, preds, conf, 1));
    CHECK(min_fde(gt, preds, conf, 6) <= min_fde(gt, preds, conf, 1));
  }
}

TEST_CASE("metrics are invariant to rigid motion and mode order")
{
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Polyline gt = random_path(30, rng);
    std::vector<Polyline> preds;
    Eigen::VectorXd conf(6);
    for (int m = 0; m < 6; ++m) {
      preds.push_back(random_path(30, rng));
      conf[m] = 0.1 + 0.1 * m;
    }
    const Eigen::Matrix2d r = Eigen::Rotation2Dd(u(rng)).toRotationMatrix();
    const Eigen::RowVector2d t(u(rng), u(rng));
    auto move = [&](const Polyline & p) -> Polyline { return (p * r.transpose()).rowwise() + t; };
    std::vector<Polyline> moved;
    for (const auto & p : preds) moved.push_back(move(p));
    for (int k : {1, 6}) {
      CHECK(min_ade(move(gt), moved, conf, k) == doctest::Approx(min_ade(gt, preds, conf, k)).epsilon(1e-10));
      CHECK(min_fde(move(gt), moved, conf, k) == doctest::Approx(min_fde(gt, preds, conf, k)).epsilon(1e-10));
    }
    std::vector<Polyline> reversed(preds.rbegin(), preds.rend());
    const Eigen::VectorXd rconf = conf.reverse();
    for (int k : {1, 6}) {
      CHECK(min_ade(gt, reversed, rconf, k) == min_ade(gt, preds, conf, k));
    }
  }
}

TEST_CASE("summaries")
{
  const auto s = summarize({1.0, 2.0, 9.0});
  CHECK(s.mean == 4.0);
  CHECK(s.median == 2.0);
  CHECK(s.count == 3);
  CHECK(summarize({4.0, 1.0, 3.0, 2.0}).median == 2.5);
  CHECK_THROWS_AS(summarize({}), Error);
}

TEST_CASE("shape mismatches")
{
  const Polyline gt = line(30, 1.0, 0.0);
  CHECK_THROWS_AS(ade(gt, line(29, 1.0, 0.0)), Error);
  const Eigen::VectorXd conf = Eigen::VectorXd::Constant(2, 0.5);
  CHECK_THROWS_AS(min_ade(gt, {gt}, conf, 1), Error);
}

TEST_CASE("running totals")
{
  const Polyline gt = line(30, 1.0, 0.0);
  const Polyline shifted = gt.rowwise() + Eigen::RowVector2d(0.0, 2.0);
  const Eigen::VectorXd conf = (Eigen::VectorXd(2) << 0.9, 0.1).finished();
  MetricTotals totals;
  totals.add(gt, {shifted, gt}, conf);
  totals.add(gt, {gt, shifted}, conf);
  CHECK(totals.n == 2);
  CHECK(totals.mean_ade_k1() == doctest::Approx(1.0));
  CHECK(totals.mean_fde_k1() == doctest::Approx(1.0));
  CHECK(totals.mean_ade_k6() == 0.0);
  CHECK(totals.mean_fde_k6() == 0.0);
}

TEST_CASE("end point error statistics")
{
  CenterlinePrior a;
  a.centerlines = {line(30, 1.0, 0.0), line(30, 0.0, 1.0)};
  a.valid = {true, true};
  CenterlinePrior padded;
  padded.centerlines = {Polyline::Zero(30, 2)};
  padded.valid = {false};
  const std::vector<Point2> ends{Point2(30.0, 2.0), Point2(0.0, 0.0)};
  const auto s = endpoint_error_stats({a, padded}, ends);
  CHECK(s.count == 1);
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK_THROWS_AS(endpoint_error_stats({padded}, {Point2(0.0, 0.0)}), Error);
}
