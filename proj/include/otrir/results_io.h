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

#ifndef OTRIR_RESULTS_IO_H_
#define OTRIR_RESULTS_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "otrir/sweep.h"

namespace otrir {

// One row of the plot-ready sweep table.
struct SweepRow {
  std::string axis_name;
  double axis_value = 0.0;
  std::string method;
  double eta_selected = 0.0;
  double nmse_sum = 0.0;
  double nmse_mean = 0.0;
  int n_realizations = 0;
  std::uint64_t seed = 0;

  bool operator==(const SweepRow&) const = default;
};

std::vector<SweepRow> SweepRows(const SweepResult& result);

// Columns: axis_name, axis_value, method, eta_selected, nmse_sum, nmse_mean,
// n_realizations, seed. Reals use 17 significant digits; failed cells carry
// "nan". Leading '#' lines hold provenance (config hash, seed, cv strategy).
std::string SweepCsv(const SweepResult& result);
std::vector<SweepRow> ParseSweepCsv(const std::string& text);

// Full metadata, including per-eta scores and failures.
std::string SweepJson(const SweepResult& result);

}  // namespace otrir

#endif  // OTRIR_RESULTS_IO_H_
