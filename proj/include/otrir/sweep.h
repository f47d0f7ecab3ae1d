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

// Robustness sweeps: the observed data come from the nominal room, the prior
// from a room whose dimensions or temperature are perturbed. Every method
// sees the same realizations (microphone position, source section, noise).

#ifndef OTRIR_SWEEP_H_
#define OTRIR_SWEEP_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "otrir/ism.h"
#include "otrir/solver.h"
#include "otrir/types.h"

namespace otrir {

struct EvalConfig {
  double lowpass_cutoff_hz = 3000.0;
  std::size_t lowpass_taps = 129;
  double snr_db = 5.0;
  int n_realizations = 10;
  std::uint64_t rng_seed = 1;
  Vec3 mic_center = {2.0, 2.0, 1.5};
  double mic_side = 1.0;
  // Source section length; 100 samples is 12.5 ms at 8 kHz.
  std::size_t signal_length = 100;
  // Length of the synthetic recording the sections are cut from.
  std::size_t recording_length = 16000;
};

void ValidateEvalConfig(const EvalConfig& config, double sample_rate_hz);

enum class SweepAxis { kRoomDims, kTemperature };

std::string AxisName(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kRoomDims;
  // delta in meters (kRoomDims) or absolute prior temperature in degrees C
  // (kTemperature).
  std::vector<double> values;
  std::vector<RegularizerKind> methods = {
      RegularizerKind::kOtPrior, RegularizerKind::kL2Prior,
      RegularizerKind::kL1Prior, RegularizerKind::kTikhonov,
      RegularizerKind::kLasso};
  std::vector<double> eta_grid = EtaGrid();
  CvStrategy cv = CvStrategy::kOracleNmse;
  double holdout_fraction = 0.25;
  int jobs = 1;
  bool keep_going = false;
};

// Data shared by every cell for one realization index.
struct Realization {
  Vec3 mic;
  Signal input;
  Signal observation;
  ImpulseResponse truth;
  std::uint64_t seed = 0;
};

struct SweepCell {
  double axis_value = 0.0;
  RegularizerKind method = RegularizerKind::kOtPrior;
  double eta_selected = 0.0;
  double nmse_sum = 0.0;
  double nmse_mean = 0.0;
  int n_realizations = 0;
  std::uint64_t seed = 0;
  std::vector<double> eta_scores;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kRoomDims;
  std::string cv_strategy;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<double> eta_grid;
  // Ordered by axis value, then method, in the order requested.
  std::vector<SweepCell> cells;

  const SweepCell& At(double axis_value, RegularizerKind method) const;
};

// Realization `index` of the nominal room: a microphone drawn uniformly in
// the cube, a fresh section of the recording, noise at the target SNR.
Realization MakeRealization(const RoomModel& room, const EvalConfig& eval,
                            std::span<const double> recording, int index);

std::vector<Realization> MakeRealizations(const RoomModel& room,
                                          const EvalConfig& eval);

// Prior room for an axis value (receiver set to the realization's mic).
RoomModel PriorRoom(const RoomModel& room, SweepAxis axis, double value,
                    const Vec3& mic);

// One (axis value, method) cell; a pure function of its arguments.
SweepCell RunCell(const RoomModel& room, const SweepSpec& spec,
                  const EvalConfig& eval, const EstimationConfig& solve,
                  std::span<const Realization> realizations,
                  double axis_value, RegularizerKind method);

SweepResult RunSweep(const RoomModel& room, const SweepSpec& spec,
                     const EvalConfig& eval, const EstimationConfig& solve);

SweepResult RunDimSweep(const RoomModel& room, std::vector<double> deltas,
                        const EvalConfig& eval, const EstimationConfig& solve,
                        SweepSpec spec = {});
SweepResult RunTempSweep(const RoomModel& room, std::vector<double> temps,
                         const EvalConfig& eval, const EstimationConfig& solve,
                         SweepSpec spec = {});

}  // namespace otrir

#endif  // OTRIR_SWEEP_H_
