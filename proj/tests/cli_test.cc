// Copyright 2026 The otrir Authors.
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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "oracles.h"
#include "otrir/audio_io.h"
#include "otrir/convolution.h"
#include "otrir/ism.h"
#include "otrir/results_io.h"

namespace otrir {
namespace {

namespace fs = std::filesystem;

const fs::path& Scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "otrir_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int Run(const std::string& args, const std::string& log = "cli.log") {
  const std::string cmd = std::string(OTRIR_CLI_PATH) + " " + args + " > " +
                          (Scratch() / log).string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string WriteConfig(const std::string& name, const std::string& text) {
  const fs::path p = Scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

// A room small enough that sweeps finish in seconds: the source sits
// near the microphone region so the first reflections fit in 120 taps.
const char* kSmallRoom = R"(
  "room": {"source_m": [2.6, 2.9, 1.2], "rir_length": 120},
  "eval": {"n_realizations": 1, "signal_length": 50, "recording_length": 2000},
  "estimation": {"max_outer_iters": 60, "max_bcd_iters": 20,
                 "use_acceleration": true})";

TEST_CASE("simulate") {
  const std::string out = (Scratch() / "sim").string();
  REQUIRE(Run("simulate --out " + out) == 0);
  const auto taps = ReadCsvSamples(out + "/rir.csv");
  CHECK(taps.size() == 600);
  CHECK(ReadWav(out + "/rir.wav").signal.size() == 600);
  CHECK(ReadWav(out + "/rir.wav").comment.find("config_hash=") !=
        std::string::npos);
  const std::string first = Slurp(out + "/rir.wav") + Slurp(out + "/rir.csv");
  REQUIRE(Run("simulate --out " + out) == 0);
  CHECK(Slurp(out + "/rir.wav") + Slurp(out + "/rir.csv") == first);

  const std::string dry = WriteConfig(
      "dry.json", R"({"room": {"reflection_coeff": 0.0, "round_delays": true}})");
  REQUIRE(Run("simulate --config " + dry + " --out " + out + "_dry") == 0);
  const auto pulse = ReadCsvSamples(out + "_dry/rir.csv");
  int significant = 0;
  for (double v : pulse) significant += std::abs(v) > 1e-6;
  CHECK(significant == 1);
}

TEST_CASE("estimate") {
  std::mt19937_64 rng(61);
  const auto x = oracle::RandomVector(1024, rng);
  RoomModel room;
  room.rir_length = 128;
  const auto h = SimulateRir(room).taps;
  auto y = DirectConvolve(x, h);
  std::normal_distribution<double> noise(0.0, 1e-6);
  for (double& v : y) v += noise(rng);
  const fs::path d = Scratch() / "est";
  fs::create_directories(d);
  WriteCsvSamples((d / "x.csv").string(), x);
  WriteCsvSamples((d / "y.csv").string(), y);
  WriteCsvSamples((d / "h.csv").string(), h);
  const std::string cfg =
      WriteConfig("est.json", R"({"room": {"rir_length": 128}})");
  const std::string files = " --config " + cfg + " --input " +
                            (d / "x.csv").string() + " --observation " +
                            (d / "y.csv").string();

  REQUIRE(Run("estimate" + files + " --regularizer tikhonov --eta 1e-10" +
              " --truth " + (d / "h.csv").string() + " --out " + d.string()) ==
          0);
  const auto report = nlohmann::json::parse(Slurp(d / "report.json"));
  CHECK(report["nmse"].get<double>() < 1e-2);
  CHECK(report["config_hash"].get<std::string>().size() == 16);
  CHECK(report["objective_trace"].size() > 1);
  CHECK(ReadCsvSamples((d / "estimate.csv").string()).size() == 128);

  CHECK(Run("estimate" + files + " --regularizer ot --out " + d.string(),
            "missing_prior.log") == 2);
  CHECK(Slurp(Scratch() / "missing_prior.log").find("prior") !=
        std::string::npos);
  CHECK(Run("estimate" + files + " --regularizer ot --prior " +
            (d / "nope.csv").string() + " --out " + d.string()) == 3);
}

TEST_CASE("exit codes") {
  const std::string bad = WriteConfig("bad.json", R"({"room": {"size": 1}})");
  CHECK(Run("simulate --config " + bad, "bad.log") == 2);
  CHECK(Slurp(Scratch() / "bad.log").find("room.size") != std::string::npos);
  CHECK(Run("simulate --config " + (Scratch() / "absent.json").string()) == 3);
  CHECK(Run("frobnicate") == 2);
  CHECK(Run("simulate --regularizer nonsense") == 2);
  CHECK(Run("--help") == 0);
}

TEST_CASE("sweep table shape, round trip and determinism") {
  const std::string cfg = WriteConfig("sweep.json", std::string("{") + kSmallRoom + R"(,
    "sweep": {"axis": "room_dims",
              "values": [-0.1, -0.08, -0.06, -0.04, -0.02, 0, 0.02, 0.04, 0.06, 0.08, 0.1],
              "eta_grid": {"lo": 0.01, "hi": 1, "count": 2}}})");
  const fs::path a = Scratch() / "sweep_a", b = Scratch() / "sweep_b";
  REQUIRE(Run("sweep --config " + cfg + " --sparkline --out " + a.string()) == 0);
  REQUIRE(Run("sweep --config " + cfg + " --jobs 2 --out " + b.string()) == 0);
  const std::string csv = Slurp(a / "sweep.csv");
  const auto rows = ParseSweepCsv(csv);
  CHECK(rows.size() == 55);
  CHECK(csv == Slurp(b / "sweep.csv"));
  const auto json = nlohmann::json::parse(Slurp(a / "sweep.json"));
  REQUIRE(json["cells"].size() == 55);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].nmse_sum == json["cells"][i]["nmse_sum"].get<double>());
    CHECK(rows[i].method == json["cells"][i]["method"].get<std::string>());
  }
  CHECK(json["config_hash"].get<std::string>() ==
        csv.substr(csv.find('=') + 1, 16));
}

TEST_CASE("a single-cell sweep matches estimate on the same data") {
  const std::string cfg = WriteConfig("single.json", std::string("{") + kSmallRoom + R"(,
    "sweep": {"values": [0.05], "methods": ["l2prior"],
              "eta_grid": {"lo": 0.5, "hi": 0.5, "count": 1}}})");
  const fs::path o = Scratch() / "single";
  REQUIRE(Run("sweep --config " + cfg + " --dump-data --out " + o.string()) == 0);
  const auto rows = ParseSweepCsv(Slurp(o / "sweep.csv"));
  REQUIRE(rows.size() == 1);
  const fs::path data = o / "data";
  REQUIRE(Run("estimate --config " + cfg + " --regularizer l2prior --eta 0.5" +
              " --input " + (data / "input_0.csv").string() +
              " --observation " + (data / "observation_0.csv").string() +
              " --prior " + (data / "prior_0_0.csv").string() + " --truth " +
              (data / "truth_0.csv").string() + " --out " + o.string()) == 0);
  const auto report = nlohmann::json::parse(Slurp(o / "report.json"));
  CHECK(report["nmse"].get<double>() == rows[0].nmse_sum);
}

TEST_CASE("filter-design and selftest") {
  const fs::path o = Scratch() / "misc";
  REQUIRE(Run("filter-design --out " + o.string()) == 0);
  CHECK(ReadCsvSamples((o / "lowpass.csv").string()).size() == 129);
  CHECK(Run("selftest --out " + o.string(), "selftest.log") == 0);
}

}  // namespace
}  // namespace otrir
