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

#include "otrir/signals.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

namespace otrir {
namespace {

// Two-pole resonator, coefficients recomputed per sample so the centre
// frequency can glide.
class Resonator {
 public:
  double Process(double x, double freq_hz, double bandwidth_hz, double fs) {
    const double r = std::exp(-std::numbers::pi * bandwidth_hz / fs);
    const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq_hz / fs);
    const double a2 = -r * r;
    const double gain = 1.0 - r;
    const double y = gain * x + a1 * y1_ + a2 * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double y1_ = 0.0;
  double y2_ = 0.0;
};

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double MeanPower(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double e : v) s += e * e;
  return s / static_cast<double>(v.size());
}

Signal AddNoise(const Signal& y, double snr_db, std::uint64_t seed) {
  if (snr_db == std::numeric_limits<double>::infinity()) return y;
  if (std::isnan(snr_db)) throw InvalidArgumentError("add noise: NaN SNR");
  const double signal_power = MeanPower(y.samples);
  if (!(signal_power > 0.0))
    throw InvalidArgumentError("add noise: input signal is silent");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noise(y.size());
  for (double& e : noise) e = normal(rng);
  const double drawn = MeanPower(noise);
  const double target = signal_power / std::pow(10.0, snr_db / 10.0);
  const double scale = drawn > 0.0 ? std::sqrt(target / drawn) : 0.0;
  Signal out = y;
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] += scale * noise[i];
  return out;
}

Signal SynthSpeechLike(std::size_t n_samples, double sample_rate_hz,
                       std::uint64_t seed) {
  if (n_samples < 1)
    throw InvalidArgumentError("speech: need at least one sample");
  if (!(sample_rate_hz > 0.0))
    throw InvalidArgumentError("speech: sample rate must be positive");
  const double fs = sample_rate_hz;
  const double nyquist = 0.5 * fs;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Signal out;
  out.sample_rate_hz = fs;
  out.samples.reserve(n_samples);
  Resonator f1, f2, f3, fric;
  double phase = Uniform(rng, 0.0, 1.0);

  while (out.samples.size() < n_samples) {
    const double kind = Uniform(rng, 0.0, 1.0);
    std::size_t len;
    if (kind < 0.7) {
      // Voiced syllable.
      len = static_cast<std::size_t>(Uniform(rng, 0.08, 0.22) * fs);
      const double f0_start = Uniform(rng, 95.0, 230.0);
      const double f0_end = f0_start * Uniform(rng, 0.8, 1.25);
      const double a1 = Uniform(rng, 300.0, 800.0), b1 = Uniform(rng, 300.0, 800.0);
      const double a2 = Uniform(rng, 900.0, 2200.0), b2 = Uniform(rng, 900.0, 2200.0);
      const double a3 = Uniform(rng, 2300.0, 3200.0), b3 = Uniform(rng, 2300.0, 3200.0);
      const double level = Uniform(rng, 0.5, 1.0);
      for (std::size_t i = 0; i < len && out.samples.size() < n_samples; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(len);
        const double f0 = f0_start + (f0_end - f0_start) * s;
        phase += f0 / fs;
        phase -= std::floor(phase);
        // Band-limited sawtooth glottal source.
        double source = 0.0;
        const int harmonics = static_cast<int>(nyquist / f0);
        for (int k = 1; k <= harmonics; ++k)
          source += std::sin(2.0 * std::numbers::pi * k * phase) / k;
        const double env = std::sin(std::numbers::pi * s);
        double v = f1.Process(source, a1 + (b1 - a1) * s, 90.0, fs) +
                   0.6 * f2.Process(source, a2 + (b2 - a2) * s, 120.0, fs) +
                   0.3 * f3.Process(source, a3 + (b3 - a3) * s, 160.0, fs);
        out.samples.push_back(level * env * v);
      }
    } else if (kind < 0.9) {
      // Unvoiced fricative.
      len = static_cast<std::size_t>(Uniform(rng, 0.03, 0.09) * fs);
      const double centre = Uniform(rng, 0.55, 0.85) * nyquist;
      const double level = Uniform(rng, 0.1, 0.3);
      for (std::size_t i = 0; i < len && out.samples.size() < n_samples; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(len);
        const double env = std::sin(std::numbers::pi * s);
        out.samples.push_back(level * env *
                              fric.Process(normal(rng), centre, 600.0, fs));
      }
    } else {
      // Pause with a faint noise floor.
      len = static_cast<std::size_t>(Uniform(rng, 0.02, 0.06) * fs);
      for (std::size_t i = 0; i < len && out.samples.size() < n_samples; ++i)
        out.samples.push_back(1e-3 * normal(rng));
    }
  }
  const double rms = std::sqrt(MeanPower(out.samples));
  if (rms > 0.0)
    for (double& v : out.samples) v /= rms;
  return out;
}

double SpectralFlatness(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n < 4) return 1.0;
  double log_sum = 0.0, sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    std::complex<double> acc = 0.0;
    const double w = -2.0 * std::numbers::pi * static_cast<double>(k) / n;
    for (std::size_t t = 0; t < n; ++t)
      acc += v[t] * std::polar(1.0, w * static_cast<double>(t));
    const double p = std::norm(acc) + 1e-300;
    log_sum += std::log(p);
    sum += p;
    ++count;
  }
  return std::exp(log_sum / count) / (sum / count);
}

}  // namespace otrir
