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
#include "trajkit/dataset.hpp"
#include "trajkit/error.hpp"
#include "trajkit/metrics.hpp"
#include "trajkit/nn/checkpoint.hpp"
#include "trajkit/predictor.hpp"
#include "trajkit/svg.hpp"
#include "trajkit/training.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace trajkit;
using nlohmann::json;

namespace
{

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level()
{
  static const LogLevel level = [] {
    const char * env = std::getenv("TRAJKIT_LOG");
    const std::string v = env ? env : "info";
    if (v == "error") return LogLevel::Error;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

void log(LogLevel level, const std::string & msg)
{
  static std::mutex mu;
  if (level <= log_level()) {
    std::lock_guard lock(mu);
    std::cerr << "[trajkit] " << msg << '\n';
  }
}

/// Runs fn(i) for i in [0, n) on up to @p jobs threads; the first error is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn)
{
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto & t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct CommonFlags
{
  std::string config;
  std::string data;
  std::string out;
  std::string variant;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool svg = false;
  std::string format = "native_json";
};

RunConfig resolve_config(const CommonFlags & f)
{
  RunConfig c = f.config.empty() ? RunConfig{} : load_config_file(f.config);
  if (!f.variant.empty()) c.model.variant = parse_variant(f.variant);
  if (f.seed) {
    c.train.seed = *f.seed;
    c.prior.seed = *f.seed;
  }
  c.prior.max_candidates = c.model.centerlines;
  c.prior.plausible_points = c.model.plausible_points;
  return c;
}

Horizon horizon_of(const RunConfig & c)
{
  Horizon h;
  h.obs_len = c.model.obs_len;
  h.pred_len = c.model.pred_len;
  return h;
}

std::vector<Scenario> load_scenarios(const CommonFlags & f, const fs::path & dir, const RunConfig & c)
{
  const auto format = parse_scenario_format(f.format);
  const auto files = list_scenario_files(dir, format);
  std::vector<Scenario> out(files.size());
  parallel_for(files.size(), f.jobs, [&](std::size_t i) {
    out[i] = load_scenario_file(files[i], format, horizon_of(c));
  });
  log(LogLevel::Info, "loaded " + std::to_string(out.size()) + " scenarios from " + dir.string());
  return out;
}

std::vector<SceneSample> to_samples(const std::vector<Scenario> & scenarios, const RunConfig & c, int jobs)
{
  std::optional<PriorOptions> prior;
  if (c.model.variant == Variant::Map) prior = c.prior;
  std::vector<SceneSample> out(scenarios.size());
  parallel_for(scenarios.size(), jobs, [&](std::size_t i) { out[i] = prepare_sample(scenarios[i], prior); });
  return out;
}

void ensure_dir(const std::string & dir)
{
  if (dir.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required");
  fs::create_directories(dir);
}

json trajectories_json(const PredictionSet & p)
{
  json modes = json::array();
  for (const auto & t : p.trajectories) {
    json pts = json::array();
    for (Eigen::Index i = 0; i < t.rows(); ++i) pts.push_back({t(i, 0), t(i, 1)});
    modes.push_back(std::move(pts));
  }
  return modes;
}

PredictionSet prediction_from_json(const json & doc)
{
  PredictionSet p;
  try {
    for (const auto & mode : doc.at("modes")) {
      Polyline t(static_cast<Eigen::Index>(mode.size()), 2);
      for (std::size_t i = 0; i < mode.size(); ++i) {
        t(static_cast<Eigen::Index>(i), 0) = mode[i].at(0).get<double>();
        t(static_cast<Eigen::Index>(i), 1) = mode[i].at(1).get<double>();
      }
      p.trajectories.push_back(std::move(t));
    }
    const auto conf = doc.at("confidences").get<std::vector<double>>();
    p.confidences = Eigen::Map<const Eigen::VectorXd>(conf.data(), static_cast<Eigen::Index>(conf.size()));
  } catch (const json::exception & e) {
    throw Error(ErrorCode::MalformedInput, "prediction file: " + std::string(e.what()));
  }
  return p;
}

int run_synth(const CommonFlags & f, int n, const std::string & motion, const std::string & topology, double sigma, int agents)
{
  ensure_dir(f.out);
  SynthSpec spec;
  spec.n_agents = agents;
  spec.motion = parse_motion_model(motion);
  spec.lane_topology = parse_lane_topology(topology);
  spec.noise_sigma = sigma;
  spec.seed = f.seed.value_or(0);
  const auto scenarios = synth_dataset(n, spec);
  parallel_for(scenarios.size(), f.jobs, [&](std::size_t i) {
    write_text_file(fs::path(f.out) / (scenarios[i].id + ".json"), to_native_json(scenarios[i]));
  });
  log(LogLevel::Info, "wrote " + std::to_string(scenarios.size()) + " scenarios to " + f.out);
  return 0;
}

int run_preprocess(const CommonFlags & f)
{
  const RunConfig c = resolve_config(f);
  ensure_dir(f.out);
  const auto scenarios = load_scenarios(f, f.data, c);
  std::atomic<int> without_lane{0};
  parallel_for(scenarios.size(), f.jobs, [&](std::size_t i) {
    const CenterlinePrior prior = prepare_prior(scenarios[i], c.prior);
    if (prior.num_valid() == 0) ++without_lane;
    write_text_file(fs::path(f.out) / (scenarios[i].id + ".prior.json"), prior_to_json(prior));
  });
  if (without_lane > 0) {
    log(LogLevel::Info, std::to_string(without_lane.load()) + " scenarios have no centerline in range");
  }
  return 0;
}

int run_train(const CommonFlags & f, const std::string & val_dir, std::optional<int> epochs)
{
  RunConfig c = resolve_config(f);
  if (epochs) c.train.epochs = *epochs;
  ensure_dir(f.out);
  const auto scenarios = load_scenarios(f, f.data, c);
  std::vector<SceneSample> all = to_samples(scenarios, c, f.jobs);
  std::vector<SceneSample> train_set, val_set;
  if (!val_dir.empty()) {
    train_set = std::move(all);
    val_set = to_samples(load_scenarios(f, val_dir, c), c, f.jobs);
  } else {
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(c.train.seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_val = static_cast<std::size_t>(c.val_fraction * static_cast<double>(all.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
      (i < n_val ? val_set : train_set).push_back(std::move(all[order[i]]));
    }
  }
  Predictor<float> model(c.model, c.train.seed);
  log(LogLevel::Info, "training " + std::string(to_string(c.model.variant)) + " model with " +
                        std::to_string(model.params().count_params()) + " parameters on " +
                        std::to_string(train_set.size()) + " scenes");
  std::ofstream metrics(fs::path(f.out) / "metrics.jsonl");
  const TrainResult result = train(model, train_set, val_set, c.train, [&](const EpochMetrics & m) {
    metrics << m.to_json() << '\n' << std::flush;
    log(LogLevel::Info, m.to_json());
  });
  json meta = {{"config", json::parse(config_to_json(c))}, {"best_epoch", result.best_epoch}};
  nn::save_checkpoint(model.params(), fs::path(f.out) / "model.json", meta.dump());
  log(LogLevel::Info, "best epoch " + std::to_string(result.best_epoch) + ", val minADE(k=6) " +
                        std::to_string(result.best_val_minade_k6));
  return 0;
}

RunConfig config_from_checkpoint(const fs::path & checkpoint)
{
  const json meta = json::parse(nn::read_checkpoint_metadata(checkpoint));
  RunConfig c;
  if (meta.contains("config")) apply_config_json(c, meta["config"].dump());
  return c;
}

int run_predict(const CommonFlags & f, const std::string & checkpoint)
{
  if (checkpoint.empty()) throw Error(ErrorCode::InvalidArgument, "--checkpoint is required");
  RunConfig c = config_from_checkpoint(checkpoint);
  Predictor<float> model(c.model, 0);
  nn::load_checkpoint(model.params(), checkpoint);
  ensure_dir(f.out);
  const auto scenarios = load_scenarios(f, f.data, c);
  const auto samples = to_samples(scenarios, c, f.jobs);
  const std::size_t bs = static_cast<std::size_t>(c.train.batch_size);
  for (std::size_t start = 0; start < samples.size(); start += bs) {
    std::vector<const SceneSample *> ptrs;
    for (std::size_t i = start; i < std::min(samples.size(), start + bs); ++i) ptrs.push_back(&samples[i]);
    const auto sets = model.predict(make_batch(ptrs, c.model.window));
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const SceneSample & s = *ptrs[i];
      const json doc = {
        {"id", s.id}, {"frame", "target"}, {"modes", trajectories_json(sets[i])},
        {"confidences", std::vector<double>(sets[i].confidences.data(), sets[i].confidences.data() + sets[i].confidences.size())}};
      write_text_file(fs::path(f.out) / (s.id + ".pred.json"), doc.dump());
      if (f.svg) {
        const auto local = to_target_frame(scenarios[start + i]).first;
        write_text_file(fs::path(f.out) / (s.id + ".svg"), render_svg(s, local.lane_graph, sets[i]));
      }
    }
  }
  log(LogLevel::Info, "wrote predictions for " + std::to_string(samples.size()) + " scenarios");
  return 0;
}

int run_eval(const CommonFlags & f, const std::string & predictions)
{
  if (predictions.empty()) throw Error(ErrorCode::InvalidArgument, "--predictions is required");
  RunConfig c = resolve_config(f);
  const auto scenarios = load_scenarios(f, f.data, c);
  std::vector<Polyline> gts(scenarios.size());
  std::vector<PredictionSet> preds(scenarios.size());
  parallel_for(scenarios.size(), f.jobs, [&](std::size_t i) {
    const SceneSample s = make_sample(scenarios[i]);
    if (!s.has_future()) throw Error(ErrorCode::InsufficientFrames, "scenario '" + s.id + "' has no future");
    gts[i] = s.future;
    const fs::path file = fs::path(predictions) / (s.id + ".pred.json");
    try {
      preds[i] = prediction_from_json(json::parse(read_text_file(file)));
    } catch (const json::exception & e) {
      throw Error(ErrorCode::MalformedInput, file.string() + ": " + e.what());
    }
  });
  MetricTotals totals;
  for (std::size_t i = 0; i < scenarios.size(); ++i) totals.add(gts[i], preds[i].trajectories, preds[i].confidences);
  const json doc = {
    {"minade_k1", totals.mean_ade_k1()}, {"minfde_k1", totals.mean_fde_k1()},
    {"minade_k6", totals.mean_ade_k6()}, {"minfde_k6", totals.mean_fde_k6()}, {"n", totals.n}};
  std::cout << doc.dump(2) << '\n';
  if (!f.out.empty()) write_text_file(f.out, doc.dump(2) + "\n");
  return 0;
}

int run_flops(const CommonFlags & f, int agents)
{
  const RunConfig c = resolve_config(f);
  const std::uint64_t flops = count_flops(c.model, agents);
  const json doc = {
    {"variant", std::string(to_string(c.model.variant))},
    {"params", count_params(c.model)},
    {"flops", flops},
    {"gflops", static_cast<double>(flops) * 1e-9},
    {"agents", agents},
    {"centerlines", c.model.centerlines},
    {"convention", "one multiply-accumulate = 1 FLOP; nonlinearities and normalization 1 FLOP per element"}};
  std::cout << doc.dump(2) << '\n';
  if (!f.out.empty()) write_text_file(f.out, doc.dump(2) + "\n");
  return 0;
}

void add_common(CLI::App * cmd, CommonFlags & f, bool data, bool out)
{
  cmd->add_option("--config", f.config, "flat JSON config file")->check(CLI::ExistingFile);
  if (data) cmd->add_option("--data", f.data, "scenario directory")->required()->check(CLI::ExistingDirectory);
  if (out) cmd->add_option("--out", f.out, "output location");
  cmd->add_option("--variant", f.variant, "model variant")->check(CLI::IsMember({"social", "map"}));
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--svg", f.svg, "also write SVG overlays");
  cmd->add_option("--format", f.format, "scenario format")->check(CLI::IsMember({"native_json", "argoverse_csv"}));
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"trajkit: multimodal vehicle trajectory prediction"};
  app.require_subcommand(1);
  CommonFlags f;

  auto * synth = app.add_subcommand("synth", "generate a synthetic scenario directory");
  add_common(synth, f, false, true);
  int n = 100, agents = 3;
  std::string motion = "cv", topology = "straight";
  double sigma = 0.0;
  synth->add_option("--n", n, "number of scenarios")->check(CLI::NonNegativeNumber);
  synth->add_option("--motion", motion, "cv, ctrv or ctra")->check(CLI::IsMember({"cv", "ctrv", "ctra"}));
  synth->add_option("--topology", topology, "straight, curve or fork")->check(CLI::IsMember({"straight", "curve", "fork"}));
  synth->add_option("--sigma", sigma, "position noise (m)")->check(CLI::NonNegativeNumber);
  synth->add_option("--agents", agents, "agents per scene")->check(CLI::PositiveNumber);

  auto * preprocess = app.add_subcommand("preprocess", "build centerline priors");
  add_common(preprocess, f, true, true);

  auto * train_cmd = app.add_subcommand("train", "train a model");
  add_common(train_cmd, f, true, true);
  std::string val_dir;
  std::optional<int> epochs;
  train_cmd->add_option("--val", val_dir, "validation scenario directory")->check(CLI::ExistingDirectory);
  train_cmd->add_option("--epochs", epochs, "override the epoch count")->check(CLI::NonNegativeNumber);

  auto * predict = app.add_subcommand("predict", "predict trajectories");
  add_common(predict, f, true, true);
  std::string checkpoint;
  predict->add_option("--checkpoint", checkpoint, "model manifest written by train")->required()->check(CLI::ExistingFile);

  auto * eval = app.add_subcommand("eval", "score predictions");
  add_common(eval, f, true, true);
  std::string predictions;
  eval->add_option("--predictions", predictions, "prediction directory")->required()->check(CLI::ExistingDirectory);

  auto * flops = app.add_subcommand("flops", "parameter and FLOP report");
  add_common(flops, f, false, true);
  flops->add_option("--agents", agents, "agents in the scene")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth) return run_synth(f, n, motion, topology, sigma, agents);
    if (*preprocess) return run_preprocess(f);
    if (*train_cmd) return run_train(f, val_dir, epochs);
    if (*predict) return run_predict(f, checkpoint);
    if (*eval) return run_eval(f, predictions);
    if (*flops) return run_flops(f, flops->count("--agents") ? agents : 10);
  } catch (const Error & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception & e) {
    std::cerr << "error: IoError: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
