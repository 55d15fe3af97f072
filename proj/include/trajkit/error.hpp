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

#ifndef TRAJKIT__ERROR_HPP_
#define TRAJKIT__ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace trajkit
{

enum class ErrorCode {
  MalformedInput,
  NoTargetAgent,
  InsufficientFrames,
  TooShort,
  DegenerateDesign,
  EmptySequence,
  LambdaOutOfRange,
  NegativeHorizon,
  NoLaneInRange,
  NoValidCenterline,
  ShapeMismatch,
  NotScalar,
  SliceMismatch,
  IndivisibleHeads,
  MissingPrior,
  NonFiniteLoss,
  EmptySet,
  InvalidArgument,
  IoError,
};

/// Name used on the diagnostic stream, e.g. "NoTargetAgent".
std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & message)
  : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace trajkit

#endif  // TRAJKIT__ERROR_HPP_
