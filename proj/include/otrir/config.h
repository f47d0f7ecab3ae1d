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

// Versionable run configuration (JSON). Every field is optional; unknown
// keys are rejected. Units are in the key names where they apply.

#ifndef OTRIR_CONFIG_H_
#define OTRIR_CONFIG_H_

#include <string>

#include "otrir/audio_io.h"
#include "otrir/ism.h"
#include "otrir/sweep.h"
#include "otrir/types.h"

namespace otrir {

struct EtaGridSpec {
  double lo = 1e-6;
  double hi = 1e6;
  int count = 30;  // 1 with lo == hi selects that single value
};

struct IoPaths {
  std::string input;        // source signal x
  std::string observation;  // recorded signal y
  std::string prior;        // prior response h0
  std::string truth;        // optional true response, for NMSE reports
  std::string out_dir = ".";
  WavEncoding wav_encoding = WavEncoding::kFloat32;
};

struct RunConfig {
  RoomModel room;
  EstimationConfig estimation;
  EvalConfig eval;
  SweepSpec sweep;  // eta_grid is derived from eta_grid_spec
  EtaGridSpec eta_grid_spec;
  IoPaths io;
};

// Throws InvalidArgumentError naming the offending key.
RunConfig ParseRunConfig(const std::string& json_text);
RunConfig LoadRunConfig(const std::string& path);

// Canonical JSON (sorted keys, every field present).
std::string RunConfigToJson(const RunConfig& config, int indent = 2);

// 16 hex digits of FNV-1a over the canonical compact JSON, leaving out
// sweep.jobs and io.out_dir (they do not change any result).
std::string ConfigHash(const RunConfig& config);

SweepAxis ParseSweepAxis(const std::string& name);  // "room_dims", "temperature"
CvStrategy ParseCvStrategy(const std::string& name);  // "oracle", "holdout"

}  // namespace otrir

#endif  // OTRIR_CONFIG_H_
