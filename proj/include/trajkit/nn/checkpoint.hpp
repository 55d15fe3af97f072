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

#ifndef TRAJKIT__NN__CHECKPOINT_HPP_
#define TRAJKIT__NN__CHECKPOINT_HPP_

#include "trajkit/nn/layers.hpp"

#include <filesystem>
#include <string>

namespace trajkit::nn
{

inline constexpr int kCheckpointFormatVersion = 1;

/// Path of the raw data file accompanying a manifest.
std::filesystem::path checkpoint_data_path(const std::filesystem::path & manifest);

/**
 * @brief Write a JSON manifest at @p manifest and the little-endian raw data
 * of every entry, in registration order, next to it.
 *
 * @param metadata_json serialized JSON object stored under "metadata".
 */
template <typename Scalar>
void save_checkpoint(
  const ParameterSet<Scalar> & params, const std::filesystem::path & manifest,
  const std::string & metadata_json = "{}");

/// The "metadata" object of a manifest, serialized.
std::string read_checkpoint_metadata(const std::filesystem::path & manifest);

/**
 * @brief Load values into an existing set with identical names and shapes.
 * Stored data of either precision is converted to Scalar.
 */
template <typename Scalar>
void load_checkpoint(ParameterSet<Scalar> & params, const std::filesystem::path & manifest);

}  // namespace trajkit::nn

#endif  // TRAJKIT__NN__CHECKPOINT_HPP_
