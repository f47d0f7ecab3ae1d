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

// Shoebox image-source simulator with a frequency-independent reflection
// coefficient. Each image contributes beta^I / (4 pi d) at delay d / c,
// rendered with an 81-tap Hann-windowed sinc (or rounded to the nearest
// sample).

#ifndef OTRIR_ISM_H_
#define OTRIR_ISM_H_

#include <array>
#include <cstddef>
#include <vector>

#include "otrir/types.h"

namespace otrir {

using Vec3 = std::array<double, 3>;

inline constexpr int kFractionalDelayTaps = 81;

struct RoomModel {
  Vec3 dims = {7.0, 5.0, 3.0};  // meters
  double reflection_coeff = 0.5;
  double temperature_c = 19.6;
  Vec3 source = {5.0, 4.0, 1.0};
  Vec3 receiver = {2.0, 2.0, 1.5};
  double sample_rate_hz = 8000.0;
  std::size_t rir_length = 600;
  // Maximum reflection count; negative selects it automatically (amplitude
  // factor beta^I below 1e-4, or every image inside the response length).
  int max_order = -1;
  // Nearest-sample rendering instead of the windowed sinc.
  bool round_delays = false;
};

struct ImageSource {
  Vec3 position;
  int reflection_count = 0;
  double distance = 0.0;  // meters to the receiver
  double delay_s = 0.0;
  double amplitude = 0.0;
};

// c = 331.3 sqrt(1 + T / 273.15) m/s.
double SpeedOfSound(double temperature_c);

void ValidateRoom(const RoomModel& room);

int EffectiveMaxOrder(const RoomModel& room);

// Images up to the effective order whose delay is within the response
// length, in deterministic lattice order.
std::vector<ImageSource> EnumerateImages(const RoomModel& room);

// Throws InvalidArgumentError when source and receiver coincide.
ImpulseResponse SimulateRir(const RoomModel& room);

// dims += delta per axis, temperature += delta_temp_c.
RoomModel PerturbRoom(const RoomModel& room, const Vec3& delta_dims,
                      double delta_temp_c);
RoomModel PerturbRoom(const RoomModel& room, double delta_dims,
                      double delta_temp_c);

// Adds amplitude * (windowed sinc or rounded pulse) at fractional tap
// `center` into `taps`.
void AddDelayedPulse(double center, double amplitude, bool round_delay,
                     std::vector<double>* taps);

}  // namespace otrir

#endif  // OTRIR_ISM_H_
