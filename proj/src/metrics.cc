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

#include "otrir/metrics.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "otrir/convolution.h"

namespace otrir {

std::vector<double> DesignLowpass(double cutoff_hz, double sample_rate_hz,
                                  std::size_t n_taps) {
  if (!(sample_rate_hz > 0.0))
    throw InvalidArgumentError("lowpass: sample rate must be > 0");
  if (!(cutoff_hz > 0.0) || cutoff_hz > 0.5 * sample_rate_hz)
    throw InvalidArgumentError("lowpass: cutoff must be in (0, fs/2]");
  if (n_taps % 2 == 0)
    throw InvalidArgumentError("lowpass: tap count must be odd");
  const double fc = cutoff_hz / sample_rate_hz;  // cycles per sample
  const auto half = static_cast<std::ptrdiff_t>(n_taps / 2);
  std::vector<double> taps(n_taps);
  for (std::ptrdiff_t i = 0; i <= half; ++i) {
    const double t = static_cast<double>(i);
    const double sinc =
        i == 0 ? 2.0 * fc
               : std::sin(2.0 * std::numbers::pi * fc * t) / (std::numbers::pi * t);
    double window = 1.0;
    if (n_taps > 1) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(half - i) /
                           static_cast<double>(n_taps - 1);
      window = 0.42 - 0.5 * std::cos(phase) + 0.08 * std::cos(2.0 * phase);
    }
    taps[static_cast<std::size_t>(half + i)] = sinc * window;
    taps[static_cast<std::size_t>(half - i)] = sinc * window;
  }
  double sum = 0.0;
  for (double t : taps) sum += t;
  for (double& t : taps) t /= sum;
  if (cutoff_hz == 0.5 * sample_rate_hz) {
    // sin(pi t) vanishes at every nonzero integer; drop the rounding residue.
    for (std::size_t i = 0; i < taps.size(); ++i)
      taps[i] = static_cast<std::ptrdiff_t>(i) == half ? 1.0 : 0.0;
  }
  return taps;
}

double FrequencyResponse(std::span<const double> taps, double frequency_hz,
                         double sample_rate_hz) {
  const double w = 2.0 * std::numbers::pi * frequency_hz / sample_rate_hz;
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < taps.size(); ++i)
    acc += taps[i] * std::polar(1.0, -w * static_cast<double>(i));
  return std::abs(acc);
}

double NmseTerm(std::span<const double> estimate, std::span<const double> truth,
                std::span<const double> filter) {
  if (estimate.size() != truth.size())
    throw InvalidArgumentError("nmse: estimate has " +
                               std::to_string(estimate.size()) +
                               " taps, truth has " +
                               std::to_string(truth.size()));
  std::vector<double> diff(truth.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = estimate[i] - truth[i];
  std::vector<double> ref(truth.begin(), truth.end());
  if (!filter.empty()) {
    diff = DirectConvolve(diff, filter);
    ref = DirectConvolve(ref, filter);
  }
  double num = 0.0, den = 0.0;
  for (double d : diff) num += d * d;
  for (double r : ref) den += r * r;
  if (!(den > 0.0)) throw InvalidArgumentError("nmse: zero-energy truth");
  return num / den;
}

double Nmse(std::span<const ImpulseResponse> estimates,
            std::span<const ImpulseResponse> truths,
            std::span<const double> filter) {
  if (estimates.size() != truths.size())
    throw InvalidArgumentError("nmse: estimate and truth counts differ");
  double total = 0.0;
  for (std::size_t k = 0; k < truths.size(); ++k)
    total += NmseTerm(estimates[k].taps, truths[k].taps, filter);
  return total;
}

}  // namespace otrir
