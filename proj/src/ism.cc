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

#include "otrir/ism.h"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

namespace otrir {
namespace {

constexpr double kAbsoluteZeroC = -273.15;
constexpr double kAmplitudeFloor = 1e-4;
constexpr int kHalfTaps = kFractionalDelayTaps / 2;

double Distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool StrictlyInside(const Vec3& p, const Vec3& dims) {
  for (int a = 0; a < 3; ++a)
    if (!(p[a] > 0.0 && p[a] < dims[a])) return false;
  return true;
}

}  // namespace

double SpeedOfSound(double temperature_c) {
  if (!(temperature_c > kAbsoluteZeroC))
    throw InvalidArgumentError("speed of sound: temperature below absolute "
                               "zero");
  return 331.3 * std::sqrt(1.0 + temperature_c / 273.15);
}

void ValidateRoom(const RoomModel& room) {
  for (int a = 0; a < 3; ++a)
    if (!(room.dims[a] > 0.0) || !std::isfinite(room.dims[a]))
      throw InvalidArgumentError("room: dimensions must be positive");
  if (!(room.reflection_coeff >= 0.0 && room.reflection_coeff <= 1.0))
    throw InvalidArgumentError("room: reflection coefficient must be in [0,1]");
  if (!StrictlyInside(room.source, room.dims))
    throw InvalidArgumentError("room: source is not strictly inside the room");
  if (!StrictlyInside(room.receiver, room.dims))
    throw InvalidArgumentError(
        "room: receiver is not strictly inside the room");
  if (!(room.sample_rate_hz > 0.0))
    throw InvalidArgumentError("room: sample rate must be positive");
  if (room.rir_length < 1)
    throw InvalidArgumentError("room: rir_length must be >= 1");
  SpeedOfSound(room.temperature_c);
}

int EffectiveMaxOrder(const RoomModel& room) {
  if (room.max_order >= 0) return room.max_order;
  const double beta = room.reflection_coeff;
  if (beta <= 0.0) return 0;
  // Order at which the lattice leaves the response length along the
  // shortest axis bounds every case, including beta == 1.
  const double max_dist =
      SpeedOfSound(room.temperature_c) *
      static_cast<double>(room.rir_length) / room.sample_rate_hz;
  double min_dim = room.dims[0];
  for (double d : room.dims) min_dim = std::min(min_dim, d);
  const int delay_order =
      3 * (static_cast<int>(std::ceil(max_dist / min_dim)) + 2);
  if (beta >= 1.0) return delay_order;
  const int amp_order =
      static_cast<int>(std::ceil(std::log(kAmplitudeFloor) / std::log(beta)));
  return std::min(amp_order, delay_order);
}

std::vector<ImageSource> EnumerateImages(const RoomModel& room) {
  ValidateRoom(room);
  const double c = SpeedOfSound(room.temperature_c);
  const double max_delay =
      static_cast<double>(room.rir_length) / room.sample_rate_hz;
  const double max_dist = c * max_delay;
  const int order = EffectiveMaxOrder(room);
  std::array<int, 3> span{};
  for (int a = 0; a < 3; ++a) {
    const int by_delay =
        static_cast<int>(std::ceil(max_dist / (2.0 * room.dims[a]))) + 1;
    span[a] = std::min(by_delay, order / 2 + 1);
  }

  std::vector<ImageSource> images;
  for (int nx = -span[0]; nx <= span[0]; ++nx)
    for (int qx = 0; qx <= 1; ++qx)
      for (int ny = -span[1]; ny <= span[1]; ++ny)
        for (int qy = 0; qy <= 1; ++qy)
          for (int nz = -span[2]; nz <= span[2]; ++nz)
            for (int qz = 0; qz <= 1; ++qz) {
              const std::array<int, 3> n = {nx, ny, nz};
              const std::array<int, 3> q = {qx, qy, qz};
              ImageSource img;
              img.reflection_count = 0;
              for (int a = 0; a < 3; ++a) {
                img.position[a] = (1 - 2 * q[a]) * room.source[a] +
                                  2.0 * n[a] * room.dims[a];
                img.reflection_count += std::abs(n[a] - q[a]) + std::abs(n[a]);
              }
              if (img.reflection_count > order) continue;
              img.distance = Distance(img.position, room.receiver);
              img.delay_s = img.distance / c;
              if (img.delay_s > max_delay) continue;
              if (img.distance > 0.0)
                img.amplitude =
                    std::pow(room.reflection_coeff, img.reflection_count) /
                    (4.0 * std::numbers::pi * img.distance);
              images.push_back(img);
            }
  return images;
}

void AddDelayedPulse(double center, double amplitude, bool round_delay,
                     std::vector<double>* taps) {
  const auto n = static_cast<std::ptrdiff_t>(taps->size());
  if (round_delay) {
    const auto k = static_cast<std::ptrdiff_t>(std::lround(center));
    if (k >= 0 && k < n) (*taps)[static_cast<std::size_t>(k)] += amplitude;
    return;
  }
  const auto mid = static_cast<std::ptrdiff_t>(std::lround(center));
  const double window_half = kHalfTaps + 1.0;
  for (std::ptrdiff_t k = mid - kHalfTaps; k <= mid + kHalfTaps; ++k) {
    if (k < 0 || k >= n) continue;
    const double t = static_cast<double>(k) - center;
    const double sinc =
        t == 0.0 ? 1.0
                 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
    const double window =
        0.5 * (1.0 + std::cos(std::numbers::pi * t / window_half));
    (*taps)[static_cast<std::size_t>(k)] += amplitude * sinc * window;
  }
}

ImpulseResponse SimulateRir(const RoomModel& room) {
  ValidateRoom(room);
  if (Distance(room.source, room.receiver) == 0.0)
    throw InvalidArgumentError("simulate: source and receiver coincide");
  ImpulseResponse rir;
  rir.sample_rate_hz = room.sample_rate_hz;
  rir.taps.assign(room.rir_length, 0.0);
  for (const ImageSource& img : EnumerateImages(room)) {
    if (img.amplitude == 0.0) continue;
    AddDelayedPulse(img.delay_s * room.sample_rate_hz, img.amplitude,
                    room.round_delays, &rir.taps);
  }
  return rir;
}

RoomModel PerturbRoom(const RoomModel& room, const Vec3& delta_dims,
                      double delta_temp_c) {
  RoomModel out = room;
  for (int a = 0; a < 3; ++a) out.dims[a] += delta_dims[a];
  out.temperature_c += delta_temp_c;
  for (int a = 0; a < 3; ++a)
    if (!(out.dims[a] > 0.0))
      throw InvalidArgumentError("perturb: dimension became non-positive");
  if (!StrictlyInside(out.source, out.dims) ||
      !StrictlyInside(out.receiver, out.dims))
    throw InvalidArgumentError(
        "perturb: source or receiver falls outside the perturbed room");
  SpeedOfSound(out.temperature_c);
  return out;
}

RoomModel PerturbRoom(const RoomModel& room, double delta_dims,
                      double delta_temp_c) {
  return PerturbRoom(room, Vec3{delta_dims, delta_dims, delta_dims},
                     delta_temp_c);
}

}  // namespace otrir
