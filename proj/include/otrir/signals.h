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

#ifndef OTRIR_SIGNALS_H_
#define OTRIR_SIGNALS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "otrir/types.h"

namespace otrir {

double MeanPower(std::span<const double> v);

// Adds white Gaussian noise whose empirical power is exactly
// MeanPower(y) / 10^(snr_db / 10). snr_db == +inf returns y unchanged.
// Throws InvalidArgumentError for a silent input.
Signal AddNoise(const Signal& y, double snr_db, std::uint64_t seed);

// Deterministic pseudo-speech: voiced syllables (harmonic source with
// drifting pitch through time-varying formant resonators) alternating with
// unvoiced noise bursts and short pauses. Unit RMS.
Signal SynthSpeechLike(std::size_t n_samples, double sample_rate_hz,
                       std::uint64_t seed);

// Ratio of geometric to arithmetic mean of the periodogram (bins 1..n/2-1).
double SpectralFlatness(std::span<const double> v);

// SplitMix64-based combination for per-cell seeds.
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

}  // namespace otrir

#endif  // OTRIR_SIGNALS_H_
