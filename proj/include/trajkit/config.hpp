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

#ifndef TRAJKIT__CONFIG_HPP_
#define TRAJKIT__CONFIG_HPP_

#include "trajkit/map_prior.hpp"
#include "trajkit/predictor.hpp"
#include "trajkit/training.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace trajkit
{

/// Everything a CLI run can be configured with.
struct RunConfig
{
  ModelConfig model;
  TrainConfig train;
  PriorOptions prior;
  /// Fraction of the data directory held out for validation when no
  /// separate validation directory is given.
  double val_fraction = 0.2;
};

/// Keys accepted in a flat JSON config document.
const std::vector<std::string> & config_keys();

/**
 * @brief Overlay a flat JSON object on @p config. Unknown keys and values of
 * the wrong type throw InvalidArgument. "centerlines" and "plausible_points"
 * set both the model and the prior.
 */
void apply_config_json(RunConfig & config, const std::string & text);

RunConfig load_config_file(const std::filesystem::path & path);

/// Flat JSON with every key, in config_keys() order.
std::string config_to_json(const RunConfig & config);

}  // namespace trajkit

#endif  // TRAJKIT__CONFIG_HPP_
