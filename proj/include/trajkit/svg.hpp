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

#ifndef TRAJKIT__SVG_HPP_
#define TRAJKIT__SVG_HPP_

#include "trajkit/batch.hpp"
#include "trajkit/predictor.hpp"

#include <string>

namespace trajkit
{

/**
 * @brief Overlay of one scene in its target frame: lanes, agent histories,
 * ground truth when known, prior centerlines and predicted modes (opacity
 * follows confidence).
 */
std::string render_svg(
  const SceneSample & sample, const LaneGraph & local_lanes, const PredictionSet & prediction);

}  // namespace trajkit

#endif  // TRAJKIT__SVG_HPP_
