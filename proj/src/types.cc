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

#include "otrir/types.h"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace otrir {

std::string_view RegularizerName(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::kOtPrior:
      return "ot";
    case RegularizerKind::kTikhonov:
      return "tikhonov";
    case RegularizerKind::kLasso:
      return "lasso";
    case RegularizerKind::kL2Prior:
      return "l2prior";
    case RegularizerKind::kL1Prior:
      return "l1prior";
  }
  return "unknown";
}

RegularizerKind ParseRegularizer(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "ot" || lower == "otprior") return RegularizerKind::kOtPrior;
  if (lower == "tikhonov") return RegularizerKind::kTikhonov;
  if (lower == "lasso") return RegularizerKind::kLasso;
  if (lower == "l2prior" || lower == "l2") return RegularizerKind::kL2Prior;
  if (lower == "l1prior" || lower == "l1") return RegularizerKind::kL1Prior;
  throw InvalidArgumentError("unknown regularizer '" + std::string(name) +
                             "' (expected ot, tikhonov, lasso, l2prior, "
                             "l1prior)");
}

bool AllFinite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

void ValidateSignal(const Signal& signal, std::string_view what) {
  if (!(signal.sample_rate_hz > 0.0) || !std::isfinite(signal.sample_rate_hz))
    throw InvalidArgumentError(std::string(what) +
                               ": sample rate must be positive");
  if (!AllFinite(signal.samples))
    throw InvalidArgumentError(std::string(what) + ": non-finite sample");
}

void ValidateImpulseResponse(const ImpulseResponse& rir,
                             std::string_view what) {
  if (rir.taps.empty())
    throw InvalidArgumentError(std::string(what) + ": no taps");
  if (!(rir.sample_rate_hz > 0.0) || !std::isfinite(rir.sample_rate_hz))
    throw InvalidArgumentError(std::string(what) +
                               ": sample rate must be positive");
  if (!AllFinite(rir.taps))
    throw InvalidArgumentError(std::string(what) + ": non-finite tap");
}

void ValidateConfig(const EstimationConfig& config) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(config.eta)) throw InvalidArgumentError("eta must be > 0");
  if (!positive(config.epsilon))
    throw InvalidArgumentError("epsilon must be > 0");
  if (!positive(config.outer_tol) || !positive(config.bcd_tol))
    throw InvalidArgumentError("tolerances must be > 0");
  if (!positive(config.cost_scale))
    throw InvalidArgumentError("cost_scale must be > 0");
  if (config.max_outer_iters < 1 || config.max_bcd_iters < 1)
    throw InvalidArgumentError("iteration caps must be >= 1");
}

const EstimationProblem& ValidateProblem(const EstimationProblem& problem) {
  ValidateSignal(problem.input, "input");
  ValidateSignal(problem.observation, "observation");
  if (problem.rir_length < 1)
    throw InvalidArgumentError("rir_length must be >= 1");
  if (problem.input.samples.empty())
    throw InvalidArgumentError("input: no samples");
  const std::size_t expected =
      problem.input.size() + problem.rir_length - 1;
  if (problem.observation.size() != expected)
    throw InvalidArgumentError(
        "observation length " + std::to_string(problem.observation.size()) +
        " does not match input length + rir_length - 1 = " +
        std::to_string(expected));
  if (problem.input.sample_rate_hz != problem.observation.sample_rate_hz)
    throw InvalidArgumentError(
        "input and observation sample rates differ; resampling is not "
        "supported");
  return problem;
}

}  // namespace otrir
