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

#include "otrir/sweep.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <thread>

#include "otrir/convolution.h"
#include "otrir/metrics.h"
#include "otrir/signals.h"

namespace otrir {
namespace {

constexpr std::uint64_t kRecordingStream = 0x5eed5eedULL;
constexpr std::uint64_t kNoiseStream = 7;
constexpr int kSectionTries = 64;

std::string CellLabel(SweepAxis axis, double value, RegularizerKind method) {
  std::ostringstream os;
  os << "cell (" << AxisName(axis) << "=" << value
     << ", method=" << RegularizerName(method) << "): ";
  return os.str();
}

[[noreturn]] void RethrowWithPrefix(std::exception_ptr error,
                                    const std::string& prefix) {
  try {
    std::rethrow_exception(error);
  } catch (const InvalidArgumentError& e) {
    throw InvalidArgumentError(prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const std::exception& e) {
    throw Error(prefix + e.what());
  }
}

}  // namespace

void ValidateEvalConfig(const EvalConfig& config, double sample_rate_hz) {
  if (!(config.lowpass_cutoff_hz > 0.0) ||
      config.lowpass_cutoff_hz >= 0.5 * sample_rate_hz)
    throw InvalidArgumentError("eval: low-pass cutoff must be below Nyquist");
  if (config.n_realizations < 1)
    throw InvalidArgumentError("eval: n_realizations must be >= 1");
  if (config.signal_length < 1)
    throw InvalidArgumentError("eval: signal_length must be >= 1");
  if (config.recording_length < config.signal_length)
    throw InvalidArgumentError(
        "eval: recording_length must cover signal_length");
  if (!(config.mic_side >= 0.0))
    throw InvalidArgumentError("eval: mic_side must be >= 0");
}

std::string AxisName(SweepAxis axis) {
  return axis == SweepAxis::kRoomDims ? "room_dims_delta_m" : "temperature_c";
}

const SweepCell& SweepResult::At(double axis_value,
                                 RegularizerKind method) const {
  for (const SweepCell& c : cells)
    if (c.axis_value == axis_value && c.method == method) return c;
  throw InvalidArgumentError("sweep result: no such cell");
}

Realization MakeRealization(const RoomModel& room, const EvalConfig& eval,
                            std::span<const double> recording, int index) {
  Realization r;
  r.seed = MixSeed(eval.rng_seed, static_cast<std::uint64_t>(index));
  std::mt19937_64 rng(r.seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  for (int a = 0; a < 3; ++a)
    r.mic[a] = eval.mic_center[a] + eval.mic_side * unit(rng);

  // A section carrying speech rather than a pause.
  const std::size_t len = eval.signal_length;
  const std::size_t span = recording.size() - len + 1;
  std::uniform_int_distribution<std::size_t> pick(0, span - 1);
  std::size_t offset = 0;
  for (int t = 0; t < kSectionTries; ++t) {
    offset = pick(rng);
    if (MeanPower(recording.subspan(offset, len)) >= 0.25) break;
  }
  r.input.sample_rate_hz = room.sample_rate_hz;
  r.input.samples.assign(recording.begin() + static_cast<std::ptrdiff_t>(offset),
                         recording.begin() +
                             static_cast<std::ptrdiff_t>(offset + len));

  RoomModel true_room = room;
  true_room.receiver = r.mic;
  r.truth = SimulateRir(true_room);
  Signal clean;
  clean.sample_rate_hz = room.sample_rate_hz;
  clean.samples = DirectConvolve(r.input.samples, r.truth.taps);
  r.observation = AddNoise(clean, eval.snr_db, MixSeed(r.seed, kNoiseStream));
  return r;
}

std::vector<Realization> MakeRealizations(const RoomModel& room,
                                          const EvalConfig& eval) {
  ValidateRoom(room);
  ValidateEvalConfig(eval, room.sample_rate_hz);
  const Signal recording =
      SynthSpeechLike(eval.recording_length, room.sample_rate_hz,
                      MixSeed(eval.rng_seed, kRecordingStream));
  std::vector<Realization> out;
  for (int k = 0; k < eval.n_realizations; ++k)
    out.push_back(MakeRealization(room, eval, recording.samples, k));
  return out;
}

RoomModel PriorRoom(const RoomModel& room, SweepAxis axis, double value,
                    const Vec3& mic) {
  RoomModel base = room;
  base.receiver = mic;
  if (axis == SweepAxis::kRoomDims) return PerturbRoom(base, value, 0.0);
  return PerturbRoom(base, 0.0, value - room.temperature_c);
}

SweepCell RunCell(const RoomModel& room, const SweepSpec& spec,
                  const EvalConfig& eval, const EstimationConfig& solve,
                  std::span<const Realization> realizations,
                  double axis_value, RegularizerKind method) {
  SweepCell cell;
  cell.axis_value = axis_value;
  cell.method = method;
  cell.seed = eval.rng_seed;
  cell.n_realizations = static_cast<int>(realizations.size());

  std::vector<CvCase> cases;
  for (const Realization& r : realizations) {
    CvCase c;
    c.problem.input = r.input;
    c.problem.observation = r.observation;
    c.problem.rir_length = room.rir_length;
    c.truth = r.truth.taps;
    if (method == RegularizerKind::kOtPrior ||
        method == RegularizerKind::kL2Prior ||
        method == RegularizerKind::kL1Prior)
      c.prior = SimulateRir(PriorRoom(room, spec.axis, axis_value, r.mic)).taps;
    cases.push_back(std::move(c));
  }
  CvOptions cv;
  cv.strategy = spec.cv;
  cv.holdout_fraction = spec.holdout_fraction;
  cv.lowpass = DesignLowpass(eval.lowpass_cutoff_hz, room.sample_rate_hz,
                             eval.lowpass_taps);
  const EtaSelection sel = SelectEta(cases, method, spec.eta_grid, solve, cv);
  cell.eta_selected = sel.best_eta;
  cell.eta_scores = sel.scores;

  // The reported figure of merit is always the filtered NMSE.
  std::vector<ImpulseResponse> truths;
  for (const Realization& r : realizations) truths.push_back(r.truth);
  cell.nmse_sum = Nmse(sel.estimates, truths, cv.lowpass);
  cell.nmse_mean = cell.nmse_sum / static_cast<double>(realizations.size());
  return cell;
}

SweepResult RunSweep(const RoomModel& room, const SweepSpec& spec,
                     const EvalConfig& eval, const EstimationConfig& solve) {
  if (spec.values.empty())
    throw InvalidArgumentError("sweep: no axis values");
  if (spec.methods.empty()) throw InvalidArgumentError("sweep: no methods");
  ValidateConfig(solve);
  const std::vector<Realization> realizations = MakeRealizations(room, eval);

  SweepResult result;
  result.axis = spec.axis;
  result.cv_strategy =
      spec.cv == CvStrategy::kOracleNmse ? "oracle" : "holdout";
  result.seed = eval.rng_seed;
  result.eta_grid = spec.eta_grid;
  for (double v : spec.values)
    for (RegularizerKind m : spec.methods) {
      SweepCell c;
      c.axis_value = v;
      c.method = m;
      result.cells.push_back(c);
    }

  std::vector<std::exception_ptr> errors(result.cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < result.cells.size(); i = next++) {
      const double v = result.cells[i].axis_value;
      const RegularizerKind m = result.cells[i].method;
      try {
        result.cells[i] = RunCell(room, spec, eval, solve, realizations, v, m);
      } catch (...) {
        errors[i] = std::current_exception();
        result.cells[i].failed = true;
        result.cells[i].seed = eval.rng_seed;
        result.cells[i].n_realizations = eval.n_realizations;
        try {
          std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
          result.cells[i].error = e.what();
        }
      }
    }
  };
  const int jobs = std::max(1, spec.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!spec.keep_going) {
    for (std::size_t i = 0; i < errors.size(); ++i)
      if (errors[i])
        RethrowWithPrefix(errors[i], CellLabel(spec.axis,
                                               result.cells[i].axis_value,
                                               result.cells[i].method));
  }
  return result;
}

SweepResult RunDimSweep(const RoomModel& room, std::vector<double> deltas,
                        const EvalConfig& eval, const EstimationConfig& solve,
                        SweepSpec spec) {
  spec.axis = SweepAxis::kRoomDims;
  spec.values = std::move(deltas);
  return RunSweep(room, spec, eval, solve);
}

SweepResult RunTempSweep(const RoomModel& room, std::vector<double> temps,
                         const EvalConfig& eval, const EstimationConfig& solve,
                         SweepSpec spec) {
  spec.axis = SweepAxis::kTemperature;
  spec.values = std::move(temps);
  return RunSweep(room, spec, eval, solve);
}

}  // namespace otrir
