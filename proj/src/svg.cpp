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

#include "trajkit/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace trajkit
{
namespace
{

struct View
{
  double min_x = -10, max_x = 10, min_y = -10, max_y = 10;

  void include(const Polyline & p)
  {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      min_x = std::min(min_x, p(i, 0));
      max_x = std::max(max_x, p(i, 0));
      min_y = std::min(min_y, p(i, 1));
      max_y = std::max(max_y, p(i, 1));
    }
  }
};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

/// y is flipped so +y (the heading) points up.
std::string polyline(const Polyline & p, const std::string & style)
{
  std::ostringstream out;
  out << "<polyline fill=\"none\" " << style << " points=\"";
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    out << (i ? " " : "") << fmt(p(i, 0)) << ',' << fmt(-p(i, 1));
  }
  out << "\"/>\n";
  return out.str();
}

}  // namespace

std::string render_svg(
  const SceneSample & sample, const LaneGraph & local_lanes, const PredictionSet & prediction)
{
  View view;
  for (const auto & a : sample.agents) view.include(a);
  for (const auto & t : prediction.trajectories) view.include(t);
  if (sample.has_future()) view.include(sample.future);

  const double margin = 5.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(view.min_x - margin) << ' '
      << fmt(-view.max_y - margin) << ' ' << fmt(view.max_x - view.min_x + 2 * margin) << ' '
      << fmt(view.max_y - view.min_y + 2 * margin) << "\" width=\"800\" height=\"800\">\n";
  svg << "<rect x=\"" << fmt(view.min_x - margin) << "\" y=\"" << fmt(-view.max_y - margin)
      << "\" width=\"" << fmt(view.max_x - view.min_x + 2 * margin) << "\" height=\""
      << fmt(view.max_y - view.min_y + 2 * margin) << "\" fill=\"white\"/>\n";
  for (const auto & lane : local_lanes.lanes()) {
    svg << polyline(lane.waypoints, "stroke=\"#bbbbbb\" stroke-width=\"0.4\"");
  }
  if (sample.prior) {
    for (std::size_t c = 0; c < sample.prior->centerlines.size(); ++c) {
      if (sample.prior->valid[c]) {
        svg << polyline(
          sample.prior->centerlines[c], "stroke=\"#f39c12\" stroke-width=\"0.5\" stroke-dasharray=\"1,1\"");
      }
    }
  }
  for (std::size_t a = 1; a < sample.agents.size(); ++a) {
    svg << polyline(sample.agents[a], "stroke=\"#7f8c8d\" stroke-width=\"0.4\"");
  }
  svg << polyline(sample.agents.front(), "stroke=\"#2c7be5\" stroke-width=\"0.6\"");
  if (sample.has_future()) {
    svg << polyline(sample.future, "stroke=\"#27ae60\" stroke-width=\"0.6\"");
  }
  const double top = prediction.confidences.size() ? prediction.confidences.maxCoeff() : 1.0;
  for (std::size_t m = 0; m < prediction.trajectories.size(); ++m) {
    const double opacity =
      0.25 + 0.75 * (top > 0.0 ? prediction.confidences[static_cast<Eigen::Index>(m)] / top : 1.0);
    svg << polyline(
      prediction.trajectories[m],
      "stroke=\"#e74c3c\" stroke-width=\"0.5\" stroke-opacity=\"" + fmt(opacity) + "\"");
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace trajkit
