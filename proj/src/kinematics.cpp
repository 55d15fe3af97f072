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

#include "trajkit/kinematics.hpp"

#include "trajkit/error.hpp"

#include <Eigen/QR>

#include <cmath>

namespace trajkit
{

Point2 Poly2Fit::evaluate(double t) const
{
  const Eigen::Vector3d basis(1.0, t, t * t);
  return {coeffs_x.dot(basis), coeffs_y.dot(basis)};
}

Polyline Poly2Fit::evaluate(const Eigen::VectorXd & timestamps) const
{
  Polyline out(timestamps.size(), 2);
  for (Eigen::Index i = 0; i < timestamps.size(); ++i) {
    out.row(i) = evaluate(timestamps[i]).transpose();
  }
  return out;
}

Poly2Fit fit_poly2(const Polyline & track, const Eigen::VectorXd & timestamps)
{
  if (track.rows() != timestamps.size()) {
    throw Error(ErrorCode::ShapeMismatch, "track and timestamps differ in length");
  }
  if (track.rows() < 3) {
    throw Error(ErrorCode::DegenerateDesign, "a quadratic fit needs at least 3 observations");
  }
  for (Eigen::Index i = 1; i < timestamps.size(); ++i) {
    if (!(timestamps[i] > timestamps[i - 1])) {
      throw Error(ErrorCode::DegenerateDesign, "timestamps must be strictly increasing");
    }
  }
  Eigen::MatrixXd design(track.rows(), 3);
  design.col(0).setOnes();
  design.col(1) = timestamps;
  design.col(2) = timestamps.array().square().matrix();

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) {
    throw Error(ErrorCode::DegenerateDesign, "rank-deficient design matrix");
  }
  Poly2Fit fit;
  fit.coeffs_x = qr.solve(track.col(0));
  fit.coeffs_y = qr.solve(track.col(1));
  const Polyline residual = track - fit.evaluate(timestamps);
  fit.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(track.rows()));
  return fit;
}

FiniteDifferences finite_difference_rates(const Polyline & positions, double dt)
{
  if (positions.rows() < 3) {
    throw Error(ErrorCode::TooShort, "finite differences need at least 3 positions");
  }
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  }
  FiniteDifferences out;
  out.velocities = relative_displacements(positions) / dt;
  out.accels = relative_displacements(out.velocities) / dt;
  return out;
}

double smooth_forgetting(const std::vector<double> & values, double lambda, bool normalized)
{
  if (values.empty()) {
    throw Error(ErrorCode::EmptySequence, "cannot smooth an empty sequence");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorCode::LambdaOutOfRange, "forgetting factor must lie in (0, 1)");
  }
  double weighted = 0.0;
  double total = 0.0;
  double w = 1.0;
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    weighted += w * *it;
    total += w;
    w *= lambda;
  }
  return normalized ? weighted / total : weighted;
}

double ctra_distance(const KinematicState & state, double t, double floor)
{
  if (t < 0.0) {
    throw Error(ErrorCode::NegativeHorizon, "horizon must be non-negative");
  }
  return std::max(state.speed * t + 0.5 * state.accel * t * t, floor);
}

KinematicState estimate_state(
  const Polyline & observed, double dt, const StateEstimateOptions & options)
{
  if (observed.rows() < 4) {
    throw Error(ErrorCode::TooShort, "state estimation needs at least 4 observations");
  }
  Polyline positions = observed;
  if (options.filter) {
    const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(observed.rows(), 0.0, dt * (observed.rows() - 1));
    positions = fit_poly2(observed, t).evaluate(t);
  }
  const auto rates = finite_difference_rates(positions, dt);

  std::vector<double> speeds(static_cast<std::size_t>(rates.velocities.rows()));
  for (Eigen::Index i = 0; i < rates.velocities.rows(); ++i) {
    speeds[static_cast<std::size_t>(i)] = rates.velocities.row(i).norm();
  }
  std::vector<double> accels(static_cast<std::size_t>(rates.accels.rows()));
  for (Eigen::Index i = 0; i < rates.accels.rows(); ++i) {
    // accels row i pairs with velocities row i + 1
    const Eigen::RowVector2d v = rates.velocities.row(i + 1);
    const double n = v.norm();
    accels[static_cast<std::size_t>(i)] = n > 1e-9 ? rates.accels.row(i).dot(v) / n : 0.0;
  }

  KinematicState state;
  state.lambda = options.lambda;
  state.speed = std::max(0.0, smooth_forgetting(speeds, options.lambda, !options.raw_sum));
  state.accel = smooth_forgetting(accels, options.lambda, !options.raw_sum);
  return state;
}

}  // namespace trajkit
