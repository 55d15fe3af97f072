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

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace trajkit
{

namespace
{

using nlohmann::json;

json to_json_object(const RunConfig & c)
{
  return json{
    {"variant", std::string(to_string(c.model.variant))},
    {"h_social", c.model.h_social},
    {"h_map", c.model.h_map},
    {"h_decoder_map", c.model.h_decoder_map},
    {"heads", c.model.heads},
    {"gcn_layers", c.model.gcn_layers},
    {"window", c.model.window},
    {"modes", c.model.modes},
    {"obs_len", c.model.obs_len},
    {"pred_len", c.model.pred_len},
    {"centerlines", c.model.centerlines},
    {"plausible_points", c.model.plausible_points},
    {"confidence_hidden", c.model.confidence_hidden},
    {"dropout", c.model.dropout},
    {"lr", c.train.lr},
    {"batch_size", c.train.batch_size},
    {"epochs", c.train.epochs},
    {"stage1_max_epochs", c.train.stage1_max_epochs},
    {"plateau_factor", c.train.plateau_factor},
    {"plateau_patience", c.train.plateau_patience},
    {"hard_mining_fraction", c.train.hard_mining_fraction},
    {"hard_mining_weight", c.train.hard_mining_weight},
    {"augment", c.train.augment},
    {"p_drop", c.train.augment_policy.p_drop},
    {"p_swap", c.train.augment_policy.p_swap},
    {"augment_sigma", c.train.augment_policy.sigma},
    {"alpha", c.train.weights.alpha},
    {"beta", c.train.weights.beta},
    {"gamma", c.train.weights.gamma},
    {"epsilon_margin", c.train.weights.epsilon_margin},
    {"seed", c.train.seed},
    {"area_sigma", c.prior.area_sigma},
    {"forgetting_factor", c.prior.state.lambda},
    {"ls_filter", c.prior.state.filter},
    {"use_accel", c.prior.use_accel},
    {"max_lane_distance", c.prior.max_lane_distance},
    {"val_fraction", c.val_fraction}};
}

template <typename T>
T typed(const json & v, const std::string & key)
{
  try {
    return v.get<T>();
  } catch (const json::exception &) {
    throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' has the wrong type");
  }
}

}  // namespace

const std::vector<std::string> & config_keys()
{
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    const json defaults = to_json_object(RunConfig{});
    for (const auto & [k, v] : defaults.items()) {
      out.push_back(k);
    }
    return out;
  }();
  return keys;
}

void apply_config_json(RunConfig & c, const std::string & text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception & e) {
    throw Error(ErrorCode::MalformedInput, "config: " + std::string(e.what()));
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::MalformedInput, "config must be a JSON object");
  }
  for (const auto & [key, v] : doc.items()) {
    if (key == "variant") c.model.variant = parse_variant(typed<std::string>(v, key));
    else if (key == "h_social") c.model.h_social = typed<int>(v, key);
    else if (key == "h_map") c.model.h_map = typed<int>(v, key);
    else if (key == "h_decoder_map") c.model.h_decoder_map = typed<int>(v, key);
    else if (key == "heads") c.model.heads = typed<int>(v, key);
    else if (key == "gcn_layers") c.model.gcn_layers = typed<int>(v, key);
    else if (key == "window") c.model.window = typed<int>(v, key);
    else if (key == "modes") c.model.modes = typed<int>(v, key);
    else if (key == "obs_len") c.model.obs_len = typed<int>(v, key);
    else if (key == "pred_len") c.model.pred_len = typed<int>(v, key);
    else if (key == "centerlines") {
      c.model.centerlines = typed<int>(v, key);
      c.prior.max_candidates = c.model.centerlines;
    } else if (key == "plausible_points") {
      c.model.plausible_points = typed<int>(v, key);
      c.prior.plausible_points = c.model.plausible_points;
    } else if (key == "confidence_hidden") c.model.confidence_hidden = typed<int>(v, key);
    else if (key == "dropout") c.model.dropout = typed<double>(v, key);
    else if (key == "lr") c.train.lr = typed<double>(v, key);
    else if (key == "batch_size") c.train.batch_size = typed<int>(v, key);
    else if (key == "epochs") c.train.epochs = typed<int>(v, key);
    else if (key == "stage1_max_epochs") c.train.stage1_max_epochs = typed<int>(v, key);
    else if (key == "plateau_factor") c.train.plateau_factor = typed<double>(v, key);
    else if (key == "plateau_patience") c.train.plateau_patience = typed<int>(v, key);
    else if (key == "hard_mining_fraction") c.train.hard_mining_fraction = typed<double>(v, key);
    else if (key == "hard_mining_weight") c.train.hard_mining_weight = typed<double>(v, key);
    else if (key == "augment") c.train.augment = typed<bool>(v, key);
    else if (key == "p_drop") c.train.augment_policy.p_drop = typed<double>(v, key);
    else if (key == "p_swap") c.train.augment_policy.p_swap = typed<double>(v, key);
    else if (key == "augment_sigma") c.train.augment_policy.sigma = typed<double>(v, key);
    else if (key == "alpha") c.train.weights.alpha = typed<double>(v, key);
    else if (key == "beta") c.train.weights.beta = typed<double>(v, key);
    else if (key == "gamma") c.train.weights.gamma = typed<double>(v, key);
    else if (key == "epsilon_margin") c.train.weights.epsilon_margin = typed<double>(v, key);
    else if (key == "seed") {
      c.train.seed = typed<std::uint64_t>(v, key);
      c.prior.seed = c.train.seed;
    } else if (key == "area_sigma") c.prior.area_sigma = typed<double>(v, key);
    else if (key == "forgetting_factor") c.prior.state.lambda = typed<double>(v, key);
    else if (key == "ls_filter") c.prior.state.filter = typed<bool>(v, key);
    else if (key == "use_accel") c.prior.use_accel = typed<bool>(v, key);
    else if (key == "max_lane_distance") c.prior.max_lane_distance = typed<double>(v, key);
    else if (key == "val_fraction") c.val_fraction = typed<double>(v, key);
    else throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  }
}

RunConfig load_config_file(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  }
  std::stringstream text;
  text << in.rdbuf();
  RunConfig c;
  apply_config_json(c, text.str());
  return c;
}

std::string config_to_json(const RunConfig & c)
{
  return to_json_object(c).dump(2);
}

}  // namespace trajkit
