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

#ifndef OTRIR_METRICS_H_
#define OTRIR_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "otrir/types.h"

namespace otrir {

// Linear-phase Blackman-windowed sinc low-pass with unit DC gain.
// Requires 0 < cutoff_hz <= sample_rate_hz / 2 and odd n_taps; at
// cutoff == fs / 2 the result is a unit impulse.
std::vector<double> DesignLowpass(double cutoff_hz, double sample_rate_hz,
                                  std::size_t n_taps);

// |H(f)| of an FIR filter.
double FrequencyResponse(std::span<const double> taps, double frequency_hz,
                         double sample_rate_hz);

// One term ||(est - truth) * z||^2 / ||truth * z||^2. An empty filter means
// no filtering. Throws InvalidArgumentError on zero-energy truth.
double NmseTerm(std::span<const double> estimate, std::span<const double> truth,
                std::span<const double> filter);

// Sum of NmseTerm over realizations (not divided by the count).
double Nmse(std::span<const ImpulseResponse> estimates,
            std::span<const ImpulseResponse> truths,
            std::span<const double> filter);

}  // namespace otrir

#endif  // OTRIR_METRICS_H_
