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
#include "trajkit/nn/checkpoint.hpp"
#include "trajkit/training.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace trajkit;
using nlohmann::json;

namespace
{

struct RunResult
{
  int code = -1;
  std::string out;
  std::string err;
};

/// Work directory shared by the cases in this file, removed at exit.
const fs::path & scratch()
{
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("trajkit_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    std::atexit([] { fs::remove_all(fs::temp_directory_path() / ("trajkit_cli_" + std::to_string(::getpid()))); });
    return d;
  }();
  return dir;
}

RunResult run(const std::string & args)
{
  const fs::path err_file = scratch() / "stderr.txt";
  const std::string cmd = std::string(TRAJKIT_CLI_PATH) + " " + args + " 2>" + err_file.string();
  RunResult r;
  FILE * pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_text_file(err_file);
  return r;
}

std::map<std::string, std::string> snapshot(const fs::path & dir)
{
  std::map<std::string, std::string> out;
  for (const auto & e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_text_file(e.path());
  return out;
}

std::string q(const fs::path & p) { return "'" + p.string() + "'"; }

/// A trained checkpoint over a small synthetic set, built once.
const fs::path & trained_run()
{
  static const fs::path dir = [] {
    const fs::path data = scratch() / "train_data";
    const fs::path out = scratch() / "run";
    REQUIRE(run("synth --n 12 --motion cv --seed 3 --out " + q(data)).code == 0);
    RunConfig c;
    c.model.h_social = 16;
    c.model.confidence_hidden = 12;
    c.train.batch_size = 4;
    c.train.epochs = 2;
    write_text_file(scratch() / "tiny.json", config_to_json(c));
    const auto r = run("train --config " + q(scratch() / "tiny.json") + " --data " + q(data) + " --out " + q(out));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    return out;
  }();
  return dir;
}

}  // namespace

TEST_CASE("help and flag errors")
{
  CHECK(run("--help").code == 0);
  CHECK(run("flops --help").code == 0);
  CHECK(run("").code == 2);
  CHECK(run("flops --bogus").code == 2);
  CHECK(run("flops --variant lidar").code == 2);
  CHECK(run("eval --data " + q(scratch() / "missing") + " --predictions .").code == 2);
}

TEST_CASE("module errors exit with 1 and name the error")
{
  write_text_file(scratch() / "bad.json", R"({"learning_rate": 1})");
  auto r = run("flops --config " + q(scratch() / "bad.json"));
  CHECK(r.code == 1);
  CHECK(r.err.find("InvalidArgument") != std::string::npos);

  const fs::path data = scratch() / "err_data";
  REQUIRE(run("synth --n 2 --seed 1 --out " + q(data)).code == 0);
  const fs::path empty = scratch() / "no_preds";
  fs::create_directories(empty);
  r = run("eval --data " + q(data) + " --predictions " + q(empty));
  CHECK(r.code == 1);
  CHECK(r.err.find("IoError") != std::string::npos);
}

TEST_CASE("flops report")
{
  const auto r = run("flops --variant social");
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  const double params = doc["params"].get<double>();
  CHECK(params >= 0.8 * 105000);
  CHECK(params <= 1.2 * 105000);
  CHECK(doc["params"] == count_params(ModelConfig{}));
  CHECK(doc["flops"] == count_flops(ModelConfig{}));

  const auto m = json::parse(run("flops --variant map").out);
  CHECK(m["params"].get<double>() >= 0.8 * 459000);
  CHECK(m["params"].get<double>() <= 1.2 * 459000);
  CHECK(m["flops"].get<double>() > doc["flops"].get<double>());
}

TEST_CASE("flags override the config file")
{
  write_text_file(scratch() / "map.json", R"({"variant": "map"})");
  const auto from_file = json::parse(run("flops --config " + q(scratch() / "map.json")).out);
  CHECK(from_file["variant"] == "map");
  const auto overridden = json::parse(run("flops --config " + q(scratch() / "map.json") + " --variant social").out);
  CHECK(overridden["variant"] == "social");
  CHECK(overridden["params"] == count_params(ModelConfig{}));
}

TEST_CASE("synth is byte-identical across runs and job counts")
{
  const fs::path a = scratch() / "synth_a";
  const fs::path b = scratch() / "synth_b";
  REQUIRE(run("synth --n 200 --motion cv --seed 7 --out " + q(a)).code == 0);
  REQUIRE(run("synth --n 200 --motion cv --seed 7 --jobs 4 --out " + q(b)).code == 0);
  const auto sa = snapshot(a);
  CHECK(sa.size() == 200);
  CHECK(sa == snapshot(b));

  // Every written scenario parses back to the same document.
  for (const auto & [name, text] : sa) {
    CHECK(to_native_json(parse_scenario(text, ScenarioFormat::NativeJson)) == text);
  }
}

TEST_CASE("preprocess writes parseable priors")
{
  const fs::path data = scratch() / "fork_data";
  const fs::path out = scratch() / "priors";
  REQUIRE(run("synth --n 5 --topology fork --seed 2 --out " + q(data)).code == 0);
  const auto r = run("preprocess --data " + q(data) + " --out " + q(out) + " --seed 4 --jobs 2");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto files = snapshot(out);
  CHECK(files.size() == 5);
  for (const auto & [name, text] : files) {
    const auto prior = prior_from_json(text);
    CHECK(prior.num_valid() >= 1);
    CHECK(prior_to_json(prior) == text);
  }
  // Deterministic with the same seed.
  const fs::path again = scratch() / "priors_again";
  REQUIRE(run("preprocess --data " + q(data) + " --out " + q(again) + " --seed 4").code == 0);
  CHECK(snapshot(again) == files);
}

TEST_CASE("train writes a checkpoint and per-epoch metrics")
{
  const fs::path & out = trained_run();
  CHECK(fs::exists(out / "model.json"));
  CHECK(fs::exists(nn::checkpoint_data_path(out / "model.json")));
  std::istringstream lines(read_text_file(out / "metrics.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto m = json::parse(line);
    CHECK(m["epoch"] == ++n);
  }
  CHECK(n == 2);
}

TEST_CASE("predict then eval agrees with in-process evaluation")
{
  const fs::path & run_dir = trained_run();
  const fs::path data = scratch() / "heldout";
  const fs::path preds = scratch() / "preds";
  REQUIRE(run("synth --n 9 --motion ctrv --topology curve --seed 11 --out " + q(data)).code == 0);
  auto r = run("predict --checkpoint " + q(run_dir / "model.json") + " --data " + q(data) + " --out " + q(preds) + " --svg");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  r = run("eval --data " + q(data) + " --predictions " + q(preds) + " --jobs 3");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto cli = json::parse(r.out);

  RunConfig c;
  apply_config_json(c, json::parse(nn::read_checkpoint_metadata(run_dir / "model.json"))["config"].dump());
  Predictor<float> model(c.model, 0);
  nn::load_checkpoint(model.params(), run_dir / "model.json");
  std::vector<SceneSample> samples;
  for (const auto & f : list_scenario_files(data, ScenarioFormat::NativeJson)) {
    samples.push_back(prepare_sample(load_scenario_file(f, ScenarioFormat::NativeJson), std::nullopt));
  }
  const auto totals = evaluate(model, samples, c.train.batch_size);
  CHECK(cli["n"] == 9);
  CHECK(std::abs(cli["minade_k6"].get<double>() - totals.mean_ade_k6()) < 1e-9);
  CHECK(std::abs(cli["minfde_k6"].get<double>() - totals.mean_fde_k6()) < 1e-9);
  CHECK(std::abs(cli["minade_k1"].get<double>() - totals.mean_ade_k1()) < 1e-9);
  CHECK(std::abs(cli["minfde_k1"].get<double>() - totals.mean_fde_k1()) < 1e-9);

  int svgs = 0;
  for (const auto & [name, text] : snapshot(preds)) {
    if (name.ends_with(".svg")) {
      ++svgs;
      CHECK(text.rfind("<svg", 0) == 0);
      continue;
    }
    const auto doc = json::parse(text);
    CHECK(doc["modes"].size() == 6);
    CHECK(doc["modes"][0].size() == 30);
    double total = 0.0;
    for (const auto & v : doc["confidences"]) total += v.get<double>();
    CHECK(std::abs(total - 1.0) < 1e-6);
  }
  CHECK(svgs == 9);

  // A second prediction pass is byte-identical.
  const fs::path preds2 = scratch() / "preds2";
  REQUIRE(run("predict --checkpoint " + q(run_dir / "model.json") + " --data " + q(data) + " --out " + q(preds2) + " --svg").code == 0);
  CHECK(snapshot(preds2) == snapshot(preds));
}

TEST_CASE("CSV scenarios go through the same pipeline")
{
  const fs::path data = scratch() / "csv";
  fs::create_directories(data);
  fs::copy_file(fs::path(TRAJKIT_FIXTURE_DIR) / "track_50.csv", data / "track_50.csv");
  const auto r = run("predict --checkpoint " + q(trained_run() / "model.json") + " --data " + q(data) +
                     " --format argoverse_csv --out " + q(scratch() / "csv_preds"));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(fs::exists(scratch() / "csv_preds" / "track_50.pred.json"));
  const auto e = run("eval --format argoverse_csv --data " + q(data) + " --predictions " + q(scratch() / "csv_preds"));
  REQUIRE_MESSAGE(e.code == 0, e.err);
  CHECK(json::parse(e.out)["n"] == 1);
}
