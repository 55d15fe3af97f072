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

namespace trajkit
{

std::string_view error_name(ErrorCode code) noexcept
{
  switch (code) {
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::NoTargetAgent: return "NoTargetAgent";
    case ErrorCode::InsufficientFrames: return "InsufficientFrames";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::NegativeHorizon: return "NegativeHorizon";
    case ErrorCode::NoLaneInRange: return "NoLaneInRange";
    case ErrorCode::NoValidCenterline: return "NoValidCenterline";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotScalar: return "NotScalar";
    case ErrorCode::SliceMismatch: return "SliceMismatch";
    case ErrorCode::IndivisibleHeads: return "IndivisibleHeads";
    case ErrorCode::MissingPrior: return "MissingPrior";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace trajkit
