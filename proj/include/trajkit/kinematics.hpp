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

#ifndef TRAJKIT__KINEMATICS_HPP_
#define TRAJKIT__KINEMATICS_HPP_

#include "trajkit/scenario.hpp"

#include <Eigen/Core>

#include <vector>

namespace trajkit
{

/// Per-axis quadratic x(t) = a0 + a1 t + a2 t^2 fitted by least squares.
struct Poly2Fit
{
  Eigen::Vector3d coeffs_x = Eigen::Vector3d::Zero();
  Eigen::Vector3d coeffs_y = Eigen::Vector3d::Zero();
  double residual_rms = 0.0;

  Point2 evaluate(double t) const;
  Polyline evaluate(const Eigen::VectorXd & timestamps) const;
};

struct KinematicState
{
  double speed = 0.0;  // m/s, >= 0
  double accel = 0.0;  // m/s^2, signed along the direction of travel
  double lambda = 0.3;
};

inline constexpr double kDefaultForgettingFactor = 0.3;
inline constexpr double kMinTravelDistance = 25.0;

Poly2Fit fit_poly2(const Polyline & track, const Eigen::VectorXd & timestamps);

struct FiniteDifferences
{
  Polyline velocities;  // n - 1 rows
  Polyline accels;      // n - 2 rows
};

/// Backward differences V_i = (X_i - X_{i-1}) / dt and A_i = (V_i - V_{i-1}) / dt.
FiniteDifferences finite_difference_rates(const Polyline & positions, double dt);

/**
 * @brief Exponentially forgetting summary of a sequence; the last element
 * carries weight 1 and element t carries lambda^(T - t).
 *
 * With @p normalized the weighted sum is divided by the sum of weights, so a
 * constant sequence maps to itself.
 */
double smooth_forgetting(const std::vector<double> & values, double lambda, bool normalized = true);

/// max(v t + a t^2 / 2, floor).
double ctra_distance(const KinematicState & state, double t, double floor = kMinTravelDistance);

struct StateEstimateOptions
{
  double lambda = kDefaultForgettingFactor;
  /// Fit a quadratic per axis before differencing.
  bool filter = true;
  /// Use the raw weighted sum instead of the normalized average.
  bool raw_sum = false;
};

/**
 * @brief Smoothed speed and signed acceleration at the last observed frame.
 *
 * Signed acceleration is the acceleration vector projected on the direction
 * of the velocity at the same frame.
 */
KinematicState estimate_state(
  const Polyline & observed, double dt, const StateEstimateOptions & options = {});

}  // namespace trajkit

#endif  // TRAJKIT__KINEMATICS_HPP_
