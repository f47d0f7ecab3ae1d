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

#ifndef OTRIR_TYPES_H_
#define OTRIR_TYPES_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace otrir {

// Error hierarchy. The CLI maps each subclass to a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, shape mismatches, malformed configuration.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Divergence, non-finite values, infeasible numerical states.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A sampled real signal (source input x, observation y, noise e).
struct Signal {
  std::vector<double> samples;
  double sample_rate_hz = 8000.0;

  std::size_t size() const { return samples.size(); }
};

// A finite tap vector. Used for true, prior and estimated responses alike.
struct ImpulseResponse {
  std::vector<double> taps;
  double sample_rate_hz = 8000.0;

  std::size_t size() const { return taps.size(); }
};

// y = x * h + e with full linear convolution, so
// observation.size() == input.size() + rir_length - 1.
struct EstimationProblem {
  Signal input;
  Signal observation;
  std::size_t rir_length = 0;
};

enum class RegularizerKind { kOtPrior, kTikhonov, kLasso, kL2Prior, kL1Prior };

std::string_view RegularizerName(RegularizerKind kind);
// Accepts the canonical names ("ot", "tikhonov", "lasso", "l2prior",
// "l1prior") case-insensitively.
RegularizerKind ParseRegularizer(std::string_view name);

struct EstimationConfig {
  double eta = 1.0;
  double epsilon = 0.1;
  int max_outer_iters = 2000;
  double outer_tol = 1e-7;
  int max_bcd_iters = 500;
  double bcd_tol = 1e-9;
  bool use_acceleration = false;
  // Delay unit of the transport cost: C[k][l] = (cost_scale * (k - l))^2.
  double cost_scale = 1.0;
  RegularizerKind regularizer = RegularizerKind::kOtPrior;
};

void ValidateSignal(const Signal& signal, std::string_view what);
void ValidateImpulseResponse(const ImpulseResponse& rir, std::string_view what);
void ValidateConfig(const EstimationConfig& config);

// Returns the problem unchanged if every invariant holds, throws
// InvalidArgumentError otherwise.
const EstimationProblem& ValidateProblem(const EstimationProblem& problem);

bool AllFinite(std::span<const double> values);

}  // namespace otrir

#endif  // OTRIR_TYPES_H_
