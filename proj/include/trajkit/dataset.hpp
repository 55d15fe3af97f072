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

#ifndef TRAJKIT__DATASET_HPP_
#define TRAJKIT__DATASET_HPP_

#include "trajkit/batch.hpp"
#include "trajkit/map_prior.hpp"
#include "trajkit/scenario.hpp"
#include "trajkit/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace trajkit
{

/// Scenario files of @p format in @p dir, sorted by name. Derived outputs
/// (*.prior.json, *.pred.json) are skipped.
std::vector<std::filesystem::path> list_scenario_files(
  const std::filesystem::path & dir, ScenarioFormat format);

std::string read_text_file(const std::filesystem::path & path);
void write_text_file(const std::filesystem::path & path, const std::string & text);

/// The file stem names CSV scenarios.
Scenario load_scenario_file(
  const std::filesystem::path & path, ScenarioFormat format, const Horizon & horizon = {});

/// 64-bit FNV-1a, used to derive per-scenario seeds from ids.
std::uint64_t stable_hash(const std::string & text);

/**
 * @brief Target-frame sample; with @p prior_options the map prior is built
 * with a seed derived from the options' seed and the scenario id.
 */
SceneSample prepare_sample(const Scenario & s, const std::optional<PriorOptions> & prior_options);

/// Prior of a raw scenario, in its target frame.
CenterlinePrior prepare_prior(const Scenario & s, const PriorOptions & options);

/// @p n scenarios from @p base, scene i seeded with base.seed * 100000 + i.
std::vector<Scenario> synth_dataset(int n, const SynthSpec & base);

}  // namespace trajkit

#endif  // TRAJKIT__DATASET_HPP_
