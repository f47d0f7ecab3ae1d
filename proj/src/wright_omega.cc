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

#include "otrir/wright_omega.h"

#include <cmath>
#include <limits>

#include "otrir/types.h"

namespace otrir {
namespace {

constexpr int kMaxIters = 12;

// Newton in y = log(w) on g(y) = y + exp(y) - x. Used for x < -2, where w is
// tiny and the log-space iterate never underflows.
double LogOmegaNegative(double x) {
  double y = x - std::exp(x);
  for (int i = 0; i < kMaxIters; ++i) {
    const double ey = std::exp(y);
    const double step = (y + ey - x) / (1.0 + ey);
    y -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(y))) break;
  }
  return y;
}

// Fritsch-Shafer-Crowley iteration on w + log(w) = x; cubically convergent.
double OmegaFritsch(double x, double w) {
  for (int i = 0; i < kMaxIters; ++i) {
    const double r = x - w - std::log(w);
    const double a = (1.0 + w) * (1.0 + w + 2.0 / 3.0 * r);
    const double next = w * (1.0 + r / (1.0 + w) * (a - 0.5 * r) / (a - r));
    const bool done = std::abs(next - w) <= 1e-16 * next;
    w = next;
    if (done) break;
  }
  return w;
}

double InitialGuess(double x) {
  if (x > 2.0) return x - std::log(x);
  // Cubic fit of omega on [-2, 2].
  return 0.5671432904097838 +
         x * (0.3618 + x * (0.0519 + x * (-0.0044)));
}

}  // namespace

double WrightOmega(double x) {
  if (std::isnan(x)) throw InvalidArgumentError("WrightOmega: NaN argument");
  if (x == std::numeric_limits<double>::infinity()) return x;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  if (x < -2.0) return std::exp(LogOmegaNegative(x));
  if (x > 1e15) {
    // The iteration's correction is below double resolution here.
    const double l = std::log(x);
    return x - l + l / x;
  }
  return OmegaFritsch(x, InitialGuess(x));
}

double LogWrightOmega(double x) {
  if (std::isnan(x))
    throw InvalidArgumentError("LogWrightOmega: NaN argument");
  if (x == -std::numeric_limits<double>::infinity()) return x;
  if (x < -2.0) return LogOmegaNegative(x);
  return std::log(WrightOmega(x));
}

}  // namespace otrir
