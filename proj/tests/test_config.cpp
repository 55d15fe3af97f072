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


#include "trajkit/config.hpp"
#include "trajkit/error.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace trajkit;

TEST_CASE("every key is documented and serialized")
{
  const auto & keys = config_keys();
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  for (const char * k : {"variant", "h_social", "h_map", "heads", "modes", "lr", "batch_size", "epochs",
                         "plateau_factor", "plateau_patience", "hard_mining_fraction", "alpha", "beta",
                         "gamma", "epsilon_margin", "seed", "forgetting_factor", "area_sigma"}) {
    CHECK(std::find(keys.begin(), keys.end(), k) != keys.end());
  }
  const auto doc = nlohmann::json::parse(config_to_json(RunConfig{}));
  CHECK(doc.size() == keys.size());
  CHECK(doc["lr"].get<double>() == 1e-3);
  CHECK(doc["batch_size"] == 64);
  CHECK(doc["hard_mining_fraction"].get<double>() == 0.10);
  CHECK(doc["gamma"].get<double>() == 0.65);
  CHECK(doc["variant"] == "social");
}

TEST_CASE("overlay sets fields and leaves the rest")
{
  RunConfig c;
  apply_config_json(c, R"({"variant": "map", "lr": 0.01, "centerlines": 2, "seed": 9, "augment": false})");
  CHECK(c.model.variant == Variant::Map);
  CHECK(c.train.lr == 0.01);
  CHECK(c.model.centerlines == 2);
  CHECK(c.prior.max_candidates == 2);
  CHECK(c.train.seed == 9);
  CHECK(c.prior.seed == 9);
  CHECK_FALSE(c.train.augment);
  CHECK(c.train.batch_size == 64);
  CHECK(c.model.h_social == 64);
}

TEST_CASE("bad documents are rejected")
{
  RunConfig c;
  CHECK_THROWS_AS(apply_config_json(c, R"({"learning_rate": 0.1})"), Error);
  CHECK_THROWS_AS(apply_config_json(c, R"({"lr": "fast"})"), Error);
  CHECK_THROWS_AS(apply_config_json(c, R"({"augment": 3})"), Error);
  CHECK_THROWS_AS(apply_config_json(c, R"({"variant": "lidar"})"), Error);
  CHECK_THROWS_AS(apply_config_json(c, "[1, 2]"), Error);
  CHECK_THROWS_AS(apply_config_json(c, "{"), Error);
  try {
    apply_config_json(c, R"({"nope": 1})");
  } catch (const Error & e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
    CHECK(std::string(e.what()).find("nope") != std::string::npos);
  }
}

TEST_CASE("serialization round trips")
{
  RunConfig c;
  c.model.variant = Variant::Map;
  c.model.heads = 8;
  c.train.lr = 2.5e-4;
  c.train.weights.beta = 0.3;
  c.train.seed = 1234567890123ULL;
  c.prior.area_sigma = 0.25;
  c.prior.state.lambda = 0.5;
  c.val_fraction = 0.1;
  RunConfig back;
  apply_config_json(back, config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(back.train.seed == 1234567890123ULL);
  CHECK(back.prior.state.lambda == 0.5);

  const auto path = std::filesystem::temp_directory_path() / "trajkit_config_test.json";
  std::ofstream(path) << config_to_json(c);
  CHECK(config_to_json(load_config_file(path)) == config_to_json(c));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config_file(path), Error);
}
