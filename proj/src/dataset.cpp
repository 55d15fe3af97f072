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

#include "trajkit/dataset.hpp"

#include "trajkit/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace trajkit
{

namespace fs = std::filesystem;

namespace
{

bool ends_with(const std::string & s, const std::string & suffix)
{
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<fs::path> list_scenario_files(const fs::path & dir, ScenarioFormat format)
{
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  }
  const std::string ext = format == ScenarioFormat::NativeJson ? ".json" : ".csv";
  std::vector<fs::path> out;
  for (const auto & entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || !ends_with(name, ext) || ends_with(name, ".prior.json") ||
        ends_with(name, ".pred.json")) {
      continue;
    }
    out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string read_text_file(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot read " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_text_file(const fs::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
}

Scenario load_scenario_file(const fs::path & path, ScenarioFormat format, const Horizon & horizon)
{
  return parse_scenario(read_text_file(path), format, path.stem().string(), horizon);
}

std::uint64_t stable_hash(const std::string & text)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

CenterlinePrior prepare_prior(const Scenario & s, const PriorOptions & options)
{
  const auto local = to_target_frame(s).first;
  PriorOptions opts = options;
  opts.seed = options.seed ^ stable_hash(s.id);
  return build_prior(local, estimate_target_state(local, opts), opts);
}

SceneSample prepare_sample(const Scenario & s, const std::optional<PriorOptions> & prior_options)
{
  std::optional<CenterlinePrior> prior;
  if (prior_options) {
    prior = prepare_prior(s, *prior_options);
  }
  return make_sample(s, std::move(prior));
}

std::vector<Scenario> synth_dataset(int n, const SynthSpec & base)
{
  if (n < 0) {
    throw Error(ErrorCode::InvalidArgument, "scenario count must be non-negative");
  }
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    SynthSpec spec = base;
    spec.seed = base.seed * 100000 + static_cast<std::uint64_t>(i);
    out.push_back(generate_synthetic(spec));
  }
  return out;
}

}  // namespace trajkit
