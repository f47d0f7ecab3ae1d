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
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "otrir/convolution.h"
#include "otrir/metrics.h"
#include "otrir/signals.h"
#include "otrir/sweep.h"

namespace otrir {
namespace {

double DirectNmse(const std::vector<double>& est, const std::vector<double>& truth,
                  const std::vector<double>& z) {
  const Eigen::MatrixXd Z = oracle::ConvolutionMatrix(z, truth.size());
  const Eigen::VectorXd a = Z * oracle::ToEigen(est);
  const Eigen::VectorXd b = Z * oracle::ToEigen(truth);
  return (a - b).squaredNorm() / b.squaredNorm();
}

TEST_CASE("lowpass design") {
  const auto z = DesignLowpass(3000.0, 8000.0, 129);
  REQUIRE(z.size() == 129);
  double sum = 0.0;
  for (double v : z) sum += v;
  CHECK(std::abs(sum - 1.0) <= 1e-10);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == z[z.size() - 1 - i]);
  for (double f = 0.0; f <= 2700.0; f += 10.0)
    CHECK(20.0 * std::log10(FrequencyResponse(z, f, 8000.0)) >= -1.0);
  for (double f = 3300.0; f <= 4000.0; f += 10.0)
    CHECK(20.0 * std::log10(FrequencyResponse(z, f, 8000.0)) <= -40.0);
  const auto allpass = DesignLowpass(4000.0, 8000.0, 129);
  for (std::size_t i = 0; i < allpass.size(); ++i)
    CHECK(allpass[i] == (i == 64 ? 1.0 : 0.0));
  CHECK_THROWS_AS(DesignLowpass(0.0, 8000.0, 129), InvalidArgumentError);
  CHECK_THROWS_AS(DesignLowpass(4500.0, 8000.0, 129), InvalidArgumentError);
  CHECK_THROWS_AS(DesignLowpass(3000.0, 8000.0, 128), InvalidArgumentError);
}

TEST_CASE("nmse identities") {
  std::mt19937_64 rng(51);
  const auto z = DesignLowpass(3000.0, 8000.0, 129);
  std::vector<ImpulseResponse> truths(3), zeros(3);
  for (int k = 0; k < 3; ++k) {
    truths[k].taps = oracle::RandomVector(50, rng);
    zeros[k].taps.assign(50, 0.0);
  }
  CHECK(Nmse(truths, truths, z) == 0.0);
  CHECK(Nmse(zeros, truths, z) == 3.0);
  CHECK(Nmse(zeros, truths, {}) == 3.0);
  const auto est = oracle::RandomVector(50, rng);
  CHECK(NmseTerm(est, truths[0].taps, z) ==
        doctest::Approx(DirectNmse(est, truths[0].taps, z)).epsilon(1e-12));
  CHECK_THROWS_AS(NmseTerm(est, std::vector<double>(50, 0.0), z),
                  InvalidArgumentError);
  CHECK_THROWS_AS(NmseTerm(est, std::vector<double>(49, 1.0), z),
                  InvalidArgumentError);
  CHECK_THROWS_AS(Nmse(std::span(zeros).first(2), truths, z),
                  InvalidArgumentError);
}

TEST_CASE("lowpass forgives a one-sample delay") {
  RoomModel room;
  const auto h = SimulateRir(room).taps;
  std::vector<double> shifted(h.size(), 0.0);
  for (std::size_t i = 1; i < h.size(); ++i) shifted[i] = h[i - 1];
  const auto z = DesignLowpass(3000.0, 8000.0, 129);
  CHECK(NmseTerm(shifted, h, z) < NmseTerm(shifted, h, {}));
}

TEST_CASE("noise injection") {
  Signal y;
  y.samples = SynthSpeechLike(20000, 8000.0, 3).samples;
  CHECK(AddNoise(y, std::numeric_limits<double>::infinity(), 1).samples ==
        y.samples);
  for (double snr : {0.0, 5.0, 20.0}) {
    const Signal noisy = AddNoise(y, snr, 9);
    std::vector<double> n(y.size());
    for (std::size_t i = 0; i < n.size(); ++i)
      n[i] = noisy.samples[i] - y.samples[i];
    const double measured = 10.0 * std::log10(MeanPower(y.samples) / MeanPower(n));
    CHECK(std::abs(measured - snr) <= 0.1);
  }
  CHECK(AddNoise(y, 5.0, 9).samples == AddNoise(y, 5.0, 9).samples);
  CHECK(AddNoise(y, 5.0, 9).samples != AddNoise(y, 5.0, 10).samples);
  Signal silent;
  silent.samples.assign(10, 0.0);
  CHECK_THROWS_AS(AddNoise(silent, 5.0, 1), InvalidArgumentError);
}

TEST_CASE("speech-like source") {
  const auto a = SynthSpeechLike(4000, 8000.0, 4).samples;
  CHECK(a == SynthSpeechLike(4000, 8000.0, 4).samples);
  CHECK(a != SynthSpeechLike(4000, 8000.0, 5).samples);
  CHECK(AllFinite(a));
  std::mt19937_64 rng(5);
  const auto white = oracle::RandomVector(4000, rng);
  CHECK(SpectralFlatness(a) < SpectralFlatness(white));
  CHECK(SynthSpeechLike(static_cast<std::size_t>(0.0125 * 8000.0), 8000.0, 1)
            .size() == 100);
  CHECK_THROWS_AS(SynthSpeechLike(0, 8000.0, 1), InvalidArgumentError);
}

TEST_CASE("eval config validation") {
  EvalConfig ok;
  CHECK_NOTHROW(ValidateEvalConfig(ok, 8000.0));
  EvalConfig bad = ok;
  bad.lowpass_cutoff_hz = 4000.0;
  CHECK_THROWS_AS(ValidateEvalConfig(bad, 8000.0), InvalidArgumentError);
  bad = ok;
  bad.n_realizations = 0;
  CHECK_THROWS_AS(ValidateEvalConfig(bad, 8000.0), InvalidArgumentError);
}

struct SmallSweep {
  RoomModel room;
  EvalConfig eval;
  EstimationConfig solve;
  SweepSpec spec;
  SmallSweep() {
    room.rir_length = 150;
    eval.n_realizations = 2;
    eval.signal_length = 60;
    eval.recording_length = 4000;
    eval.rng_seed = 17;
    solve.max_outer_iters = 150;
    solve.max_bcd_iters = 20;
    solve.use_acceleration = true;
    spec.eta_grid = EtaGrid(1e-2, 1e2, 3);
    spec.methods = {RegularizerKind::kOtPrior, RegularizerKind::kL2Prior,
                    RegularizerKind::kTikhonov};
  }
};

bool SameCell(const SweepCell& a, const SweepCell& b) {
  return a.axis_value == b.axis_value && a.method == b.method &&
         a.eta_selected == b.eta_selected && a.nmse_sum == b.nmse_sum &&
         a.nmse_mean == b.nmse_mean && a.seed == b.seed &&
         a.eta_scores == b.eta_scores;
}

TEST_CASE("sweep determinism and cell isolation") {
  SmallSweep s;
  const SweepResult a = RunDimSweep(s.room, {0.0, 0.05}, s.eval, s.solve, s.spec);
  REQUIRE(a.cells.size() == 6);
  for (const SweepCell& c : a.cells) {
    CHECK_FALSE(c.failed);
    CHECK(c.nmse_sum >= 0.0);
    CHECK(c.nmse_mean == c.nmse_sum / 2.0);
  }
  const SweepResult b = RunDimSweep(s.room, {0.0, 0.05}, s.eval, s.solve, s.spec);
  for (std::size_t i = 0; i < a.cells.size(); ++i)
    CHECK(SameCell(a.cells[i], b.cells[i]));

  SmallSweep parallel;
  parallel.spec.jobs = 3;
  const SweepResult p = RunDimSweep(parallel.room, {0.0, 0.05}, parallel.eval,
                                    parallel.solve, parallel.spec);
  for (std::size_t i = 0; i < a.cells.size(); ++i)
    CHECK(SameCell(a.cells[i], p.cells[i]));

  SweepSpec dim = s.spec;
  dim.axis = SweepAxis::kRoomDims;
  const auto realizations = MakeRealizations(s.room, s.eval);
  const SweepCell alone = RunCell(s.room, dim, s.eval, s.solve, realizations,
                                  0.05, RegularizerKind::kL2Prior);
  CHECK(SameCell(alone, a.At(0.05, RegularizerKind::kL2Prior)));

  // The temperature axis at the true temperature is the undisturbed column.
  const SweepResult t = RunTempSweep(s.room, {s.room.temperature_c}, s.eval,
                                     s.solve, s.spec);
  for (RegularizerKind m : s.spec.methods) {
    CHECK(t.At(s.room.temperature_c, m).nmse_sum == a.At(0.0, m).nmse_sum);
    CHECK(t.At(s.room.temperature_c, m).eta_selected ==
          a.At(0.0, m).eta_selected);
  }
}

TEST_CASE("realizations share data across methods and vary across indices") {
  SmallSweep s;
  const auto r = MakeRealizations(s.room, s.eval);
  REQUIRE(r.size() == 2);
  CHECK(r[0].input.samples != r[1].input.samples);
  CHECK(r[0].mic != r[1].mic);
  for (const Realization& x : r) {
    CHECK(x.input.size() == 60);
    CHECK(x.observation.size() == 60 + 150 - 1);
    CHECK(x.truth.size() == 150);
    for (int a = 0; a < 3; ++a)
      CHECK(std::abs(x.mic[a] - s.eval.mic_center[a]) <= 0.5 * s.eval.mic_side);
  }
  const auto again = MakeRealizations(s.room, s.eval);
  CHECK(again[1].observation.samples == r[1].observation.samples);
  CHECK(PriorRoom(s.room, SweepAxis::kRoomDims, 0.0, r[0].mic).receiver ==
        r[0].mic);
}

TEST_CASE("failing cells are reported with coordinates") {
  SmallSweep s;
  s.spec.methods = {RegularizerKind::kL2Prior};
  CHECK_THROWS_WITH_AS(RunDimSweep(s.room, {-2.5}, s.eval, s.solve, s.spec),
                       doctest::Contains("cell (room_dims_delta_m=-2.5, method=l2prior)"),
                       InvalidArgumentError);
  s.spec.keep_going = true;
  const SweepResult r = RunDimSweep(s.room, {-2.5, 0.0}, s.eval, s.solve, s.spec);
  REQUIRE(r.cells.size() == 2);
  CHECK(r.cells[0].failed);
  CHECK_FALSE(r.cells[0].error.empty());
  CHECK_FALSE(r.cells[1].failed);
}

}  // namespace
}  // namespace otrir
