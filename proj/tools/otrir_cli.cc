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

// Command-line front end: simulate | estimate | sweep | filter-design |
// selftest. Exit codes: 0 ok, 1 unexpected, 2 config or argument error,
// 3 I/O error, 4 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "otrir/audio_io.h"
#include "otrir/config.h"
#include "otrir/convolution.h"
#include "otrir/ism.h"
#include "otrir/metrics.h"
#include "otrir/results_io.h"
#include "otrir/signals.h"
#include "otrir/solver.h"
#include "otrir/sweep.h"

namespace otrir {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<double> eta;
  std::optional<double> epsilon;
  std::optional<double> cost_scale;
  std::optional<std::string> regularizer;
  std::optional<std::string> cv;
  bool keep_going = false;
  std::optional<std::string> out;
  std::optional<std::string> input, observation, prior, truth;
};

void AddCommonFlags(CLI::App* cmd, Overrides* o) {
  cmd->add_option("--config", o->config_path, "JSON run configuration");
  cmd->add_option("--seed", o->seed, "global RNG seed");
  cmd->add_option("--jobs", o->jobs, "parallel sweep cells");
  cmd->add_option("--eta", o->eta, "regularization weight");
  cmd->add_option("--epsilon", o->epsilon, "entropic weight");
  cmd->add_option("--cost-scale", o->cost_scale, "transport cost delay unit");
  cmd->add_option("--regularizer", o->regularizer,
                  "ot | tikhonov | lasso | l2prior | l1prior");
  cmd->add_option("--cv", o->cv, "oracle | holdout");
  cmd->add_flag("--keep-going", o->keep_going,
                "mark failed sweep cells instead of aborting");
  cmd->add_option("--out", o->out, "output directory");
}

RunConfig Resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? ParseRunConfig("{}")
                                      : LoadRunConfig(o.config_path);
  if (o.seed) c.eval.rng_seed = *o.seed;
  if (o.jobs) c.sweep.jobs = *o.jobs;
  if (o.eta) c.estimation.eta = *o.eta;
  if (o.epsilon) c.estimation.epsilon = *o.epsilon;
  if (o.cost_scale) c.estimation.cost_scale = *o.cost_scale;
  if (o.regularizer) c.estimation.regularizer = ParseRegularizer(*o.regularizer);
  if (o.cv) c.sweep.cv = ParseCvStrategy(*o.cv);
  if (o.keep_going) c.sweep.keep_going = true;
  if (o.out) c.io.out_dir = *o.out;
  if (o.input) c.io.input = *o.input;
  if (o.observation) c.io.observation = *o.observation;
  if (o.prior) c.io.prior = *o.prior;
  if (o.truth) c.io.truth = *o.truth;
  ValidateConfig(c.estimation);
  return c;
}

std::string Provenance(const RunConfig& c) {
  return "config_hash=" + ConfigHash(c) +
         " seed=" + std::to_string(c.eval.rng_seed);
}

fs::path OutDir(const RunConfig& c) {
  fs::path dir(c.io.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

void WriteTextFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void WriteResponse(const fs::path& stem, const ImpulseResponse& rir,
                   const RunConfig& c) {
  Signal s;
  s.samples = rir.taps;
  s.sample_rate_hz = rir.sample_rate_hz;
  WriteWav(stem.string() + ".wav", s, c.io.wav_encoding, Provenance(c));
  WriteCsvSamples(stem.string() + ".csv", rir.taps, Provenance(c));
}

json MetaJson(const RunConfig& c) {
  return {{"config_hash", ConfigHash(c)},
          {"seed", c.eval.rng_seed},
          {"config", json::parse(RunConfigToJson(c, -1))}};
}

int CmdSimulate(const RunConfig& c) {
  const ImpulseResponse rir = SimulateRir(c.room);
  const fs::path dir = OutDir(c);
  WriteResponse(dir / "rir", rir, c);
  json meta = MetaJson(c);
  meta["taps"] = rir.size();
  meta["images"] = EnumerateImages(c.room).size();
  meta["speed_of_sound_m_s"] = SpeedOfSound(c.room.temperature_c);
  WriteTextFile(dir / "simulate.json", meta.dump(2) + "\n");
  std::printf("wrote %s/rir.{wav,csv} (%zu taps)\n", dir.string().c_str(),
              rir.size());
  return kExitOk;
}

Signal LoadRequired(const std::string& path, const std::string& what,
                    double sample_rate_hz) {
  if (path.empty())
    throw InvalidArgumentError("missing input: " + what);
  return ReadSignal(path, sample_rate_hz);
}

json JsonReal(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int CmdEstimate(const RunConfig& c, bool select_eta) {
  const double fs = c.room.sample_rate_hz;
  EstimationProblem p;
  p.input = LoadRequired(c.io.input, "source signal (io.input / --input)", fs);
  p.observation = LoadRequired(
      c.io.observation, "observation (io.observation / --observation)", fs);
  p.rir_length = c.room.rir_length;
  const RegularizerKind kind = c.estimation.regularizer;
  std::vector<double> prior;
  if (kind == RegularizerKind::kOtPrior || kind == RegularizerKind::kL1Prior ||
      kind == RegularizerKind::kL2Prior) {
    prior = LoadRequired(c.io.prior,
                         "prior response (io.prior / --prior), required by "
                         "regularizer '" +
                             std::string(RegularizerName(kind)) + "'",
                         fs)
                .samples;
    if (prior.size() != p.rir_length)
      throw InvalidArgumentError("prior has " + std::to_string(prior.size()) +
                                 " taps, room.rir_length is " +
                                 std::to_string(p.rir_length));
  }
  std::vector<double> truth;
  if (!c.io.truth.empty()) {
    truth = ReadSignal(c.io.truth, fs).samples;
    if (truth.size() != p.rir_length)
      throw InvalidArgumentError("truth length differs from room.rir_length");
  }
  const std::vector<double> lowpass =
      DesignLowpass(c.eval.lowpass_cutoff_hz, fs, c.eval.lowpass_taps);

  json report = MetaJson(c);
  report["regularizer"] = RegularizerName(kind);
  EstimationConfig solve = c.estimation;
  if (select_eta) {
    if (c.sweep.cv == CvStrategy::kOracleNmse && truth.empty())
      throw InvalidArgumentError(
          "oracle eta selection needs a true response (io.truth / --truth); "
          "use --cv holdout otherwise");
    CvCase cv_case{p, truth, prior};
    CvOptions cv;
    cv.strategy = c.sweep.cv;
    cv.holdout_fraction = c.sweep.holdout_fraction;
    cv.lowpass = lowpass;
    const EtaSelection sel =
        SelectEta(std::span(&cv_case, 1), kind, c.sweep.eta_grid, solve, cv);
    solve.eta = sel.best_eta;
    json scores = json::array();
    for (double s : sel.scores) scores.push_back(JsonReal(s));
    report["eta_grid"] = sel.grid;
    report["eta_scores"] = scores;
    report["eta_selected"] = sel.best_eta;
  }
  const Regularizer reg = Regularizer::Make(kind, solve, prior);
  const SolveReport r = Solve(p, reg, solve);
  if (!AllFinite(r.estimate.taps))
    throw NumericalError("estimate: solver produced non-finite taps");
  json trace = json::array();
  for (double v : r.objective_trace) trace.push_back(JsonReal(v));
  report["eta"] = solve.eta;
  report["objective_trace"] = trace;
  report["outer_iterations"] = r.outer_iterations;
  report["converged"] = r.converged;
  report["bcd_iterations_total"] = r.bcd_iterations_total;
  report["bcd_unconverged"] = r.bcd_unconverged;
  report["restarts"] = r.restarts;
  report["lipschitz"] = r.lipschitz;
  if (!truth.empty())
    report["nmse"] = NmseTerm(r.estimate.taps, truth, lowpass);

  const fs::path dir = OutDir(c);
  ImpulseResponse est = r.estimate;
  est.sample_rate_hz = fs;
  WriteResponse(dir / "estimate", est, c);
  WriteTextFile(dir / "report.json", report.dump(2) + "\n");
  std::printf("eta %.6g, %d iterations%s", solve.eta, r.outer_iterations,
              r.converged ? "" : " (not converged)");
  if (report.contains("nmse"))
    std::printf(", nmse %.6g", report["nmse"].get<double>());
  std::printf("\nwrote %s/estimate.{wav,csv} and report.json\n",
              dir.string().c_str());
  return kExitOk;
}

std::string Sparkline(const std::vector<double>& v) {
  static const char* kBlocks[] = {"▁", "▂", "▃", "▄",
                                  "▅", "▆", "▇", "█"};
  double lo = INFINITY, hi = -INFINITY;
  for (double x : v)
    if (std::isfinite(x)) lo = std::min(lo, x), hi = std::max(hi, x);
  std::string out;
  for (double x : v) {
    if (!std::isfinite(x)) {
      out += "?";
      continue;
    }
    const double t = hi > lo ? (x - lo) / (hi - lo) : 0.0;
    out += kBlocks[std::min(7, static_cast<int>(t * 8.0))];
  }
  return out;
}

void DumpSweepData(const RunConfig& c, const fs::path& dir) {
  const fs::path data = dir / "data";
  fs::create_directories(data);
  const auto realizations = MakeRealizations(c.room, c.eval);
  for (std::size_t k = 0; k < realizations.size(); ++k) {
    const Realization& r = realizations[k];
    const std::string tag = std::to_string(k);
    WriteCsvSamples((data / ("input_" + tag + ".csv")).string(),
                    r.input.samples, Provenance(c));
    WriteCsvSamples((data / ("observation_" + tag + ".csv")).string(),
                    r.observation.samples, Provenance(c));
    WriteCsvSamples((data / ("truth_" + tag + ".csv")).string(), r.truth.taps,
                    Provenance(c));
    for (std::size_t i = 0; i < c.sweep.values.size(); ++i) {
      const auto prior = SimulateRir(
          PriorRoom(c.room, c.sweep.axis, c.sweep.values[i], r.mic));
      WriteCsvSamples(
          (data / ("prior_" + std::to_string(i) + "_" + tag + ".csv")).string(),
          prior.taps, Provenance(c));
    }
  }
}

int CmdSweep(const RunConfig& c, bool sparkline, bool dump_data) {
  SweepResult result = RunSweep(c.room, c.sweep, c.eval, c.estimation);
  result.config_hash = ConfigHash(c);
  const fs::path dir = OutDir(c);
  WriteTextFile(dir / "sweep.csv", SweepCsv(result));
  WriteTextFile(dir / "sweep.json", SweepJson(result));
  if (dump_data) DumpSweepData(c, dir);
  int failed = 0;
  for (const SweepCell& cell : result.cells) failed += cell.failed;
  std::printf("%zu cells (%d failed); wrote %s/sweep.{csv,json}\n",
              result.cells.size(), failed, dir.string().c_str());
  if (sparkline) {
    for (RegularizerKind m : c.sweep.methods) {
      std::vector<double> curve;
      for (double v : c.sweep.values) curve.push_back(result.At(v, m).nmse_mean);
      std::printf("%-9s %s\n", std::string(RegularizerName(m)).c_str(),
                  Sparkline(curve).c_str());
    }
  }
  return kExitOk;
}

int CmdFilterDesign(const RunConfig& c) {
  const double fs = c.room.sample_rate_hz;
  const auto taps =
      DesignLowpass(c.eval.lowpass_cutoff_hz, fs, c.eval.lowpass_taps);
  const fs::path dir = OutDir(c);
  WriteCsvSamples((dir / "lowpass.csv").string(), taps, Provenance(c));
  for (double f = 0.0; f <= 0.5 * fs + 1e-9; f += fs / 16.0) {
    const double mag = FrequencyResponse(taps, f, fs);
    std::printf("%8.1f Hz  %8.2f dB\n", f,
                mag > 0.0 ? 20.0 * std::log10(mag) : -INFINITY);
  }
  std::printf("wrote %s/lowpass.csv (%zu taps)\n", dir.string().c_str(),
              taps.size());
  return kExitOk;
}

// End-to-end check on a well-posed synthetic problem.
int CmdSelftest(const RunConfig& c) {
  std::mt19937_64 rng(c.eval.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  EstimationProblem p;
  p.input.samples.resize(2048);
  for (double& v : p.input.samples) v = normal(rng);
  RoomModel room = c.room;
  room.rir_length = std::min<std::size_t>(room.rir_length, 128);
  const ImpulseResponse h = SimulateRir(room);
  p.rir_length = h.size();
  p.observation.samples = DirectConvolve(p.input.samples, h.taps);
  p.observation = AddNoise(p.observation, 60.0, MixSeed(c.eval.rng_seed, 1));
  EstimationConfig solve = c.estimation;
  solve.eta = 1e-8;
  int failures = 0;
  for (RegularizerKind kind :
       {RegularizerKind::kTikhonov, RegularizerKind::kLasso,
        RegularizerKind::kL2Prior, RegularizerKind::kL1Prior,
        RegularizerKind::kOtPrior}) {
    const SolveReport r =
        Solve(p, Regularizer::Make(kind, solve, h.taps), solve);
    const double nmse = NmseTerm(r.estimate.taps, h.taps, {});
    const bool ok = nmse < 1e-2;
    failures += !ok;
    std::printf("%s %-9s nmse %.3g\n", ok ? "PASS" : "FAIL",
                std::string(RegularizerName(kind)).c_str(), nmse);
  }
  return failures == 0 ? kExitOk : kExitNumerical;
}

int Main(int argc, char** argv) {
  CLI::App app{"Room impulse response estimation with an optimal-transport "
               "prior"};
  app.require_subcommand(1);
  Overrides o;
  bool sparkline = false, dump_data = false, select_eta = false;

  CLI::App* simulate = app.add_subcommand("simulate", "simulate a room response");
  CLI::App* estimate = app.add_subcommand("estimate", "estimate a response");
  CLI::App* sweep = app.add_subcommand("sweep", "run a robustness sweep");
  CLI::App* filter =
      app.add_subcommand("filter-design", "design the evaluation low-pass");
  CLI::App* selftest = app.add_subcommand("selftest", "end-to-end self test");
  for (CLI::App* cmd : {simulate, estimate, sweep, filter, selftest})
    AddCommonFlags(cmd, &o);
  estimate->add_option("--input", o.input, "source signal x (WAV or CSV)");
  estimate->add_option("--observation", o.observation,
                       "recorded signal y (WAV or CSV)");
  estimate->add_option("--prior", o.prior, "prior response h0 (WAV or CSV)");
  estimate->add_option("--truth", o.truth, "true response, for the NMSE");
  estimate->add_flag("--select-eta", select_eta,
                     "choose eta over sweep.eta_grid with the --cv strategy");
  sweep->add_flag("--sparkline", sparkline, "print NMSE sparklines");
  sweep->add_flag("--dump-data", dump_data,
                  "write the realizations and priors under OUT/data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig c = Resolve(o);
    if (*simulate) return CmdSimulate(c);
    if (*estimate) return CmdEstimate(c, select_eta);
    if (*sweep) return CmdSweep(c, sparkline, dump_data);
    if (*filter) return CmdFilterDesign(c);
    if (*selftest) return CmdSelftest(c);
  } catch (const InvalidArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitOther;
  }
  return kExitOther;
}

}  // namespace
}  // namespace otrir

int main(int argc, char** argv) { return otrir::Main(argc, argv); }
