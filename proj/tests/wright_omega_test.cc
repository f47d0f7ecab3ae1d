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

#include "doctest.h"
#include "oracles.h"
#include "otrir/types.h"
#include "otrir/wright_omega.h"

namespace otrir {
namespace {

double Residual(double x) {
  const double w = WrightOmega(x);
  return std::abs(w + std::log(w) - x);
}

TEST_CASE("omega at simple points") {
  CHECK(WrightOmega(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  const double omega_constant = oracle::Bisect(
      [](double w) { return w + std::log(w); }, 0.1, 1.0);
  CHECK(std::abs(WrightOmega(0.0) - omega_constant) <= 1e-12);
  CHECK(std::abs(WrightOmega(0.0) - 0.567143290409784) <= 1e-14);
  const double w50 = WrightOmega(50.0);
  CHECK(Residual(50.0) <= 1e-10 * 50.0);
  const double w50_oracle = oracle::Bisect(
      [](double w) { return w + std::log(w) - 50.0; }, 40.0, 50.0);
  CHECK(std::abs(w50 - w50_oracle) <= 1e-12 * w50_oracle);
  CHECK(std::abs(w50 - (50.0 - std::log(50.0))) < 0.1);
}

TEST_CASE("defining identity on a dense grid") {
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = -700.0 + 1400.0 * i / (n - 1);
    const double w = WrightOmega(x);
    REQUIRE(w > 0.0);
    CHECK(std::abs(w + std::log(w) - x) <= 1e-10 * std::max(1.0, std::abs(x)));
  }
}

TEST_CASE("omega is strictly increasing") {
  double prev = WrightOmega(-60.0);
  for (double x = -59.9; x < 60.0; x += 0.1) {
    const double w = WrightOmega(x);
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("asymptotic regimes") {
  for (double x = -700.0; x <= -30.0; x += 7.3)
    CHECK(std::abs(WrightOmega(x) - std::exp(x)) <= std::exp(2.0 * x));
  for (double x = 30.0; x <= 1e6; x *= 1.7)
    CHECK(std::abs(WrightOmega(x) - (x - std::log(x))) <=
          2.0 * std::log(x) / x);
}

TEST_CASE("extreme and invalid arguments") {
  CHECK_THROWS_AS(WrightOmega(std::numeric_limits<double>::quiet_NaN()),
                  InvalidArgumentError);
  CHECK(WrightOmega(-800.0) >= 0.0);
  CHECK(WrightOmega(-std::numeric_limits<double>::infinity()) == 0.0);
  CHECK(std::isinf(WrightOmega(std::numeric_limits<double>::infinity())));
  CHECK(Residual(1e20) <= 1e-10 * 1e20);
  CHECK(std::isfinite(WrightOmega(1e300)));
}

TEST_CASE("log omega stays finite where omega underflows") {
  for (double x : {-745.0, -1000.0, -1e5}) {
    const double lw = LogWrightOmega(x);
    CHECK(std::isfinite(lw));
    CHECK(std::abs(std::exp(lw) + lw - x) <= 1e-10 * std::abs(x));
  }
  for (double x : {-5.0, 0.0, 3.0, 100.0})
    CHECK(LogWrightOmega(x) ==
          doctest::Approx(std::log(WrightOmega(x))).epsilon(1e-14));
}

}  // namespace
}  // namespace otrir
