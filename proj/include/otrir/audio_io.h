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

// Single-channel WAV (16/24-bit PCM, 32-bit float) and headerless CSV
// sample files.

#ifndef OTRIR_AUDIO_IO_H_
#define OTRIR_AUDIO_IO_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otrir/types.h"

namespace otrir {

enum class WavEncoding { kPcm16, kPcm24, kFloat32 };

WavEncoding ParseWavEncoding(std::string_view name);  // "pcm16", "pcm24", "float32"

struct WavFile {
  Signal signal;
  WavEncoding encoding = WavEncoding::kFloat32;
  // Text of a LIST/INFO ICMT chunk, empty when absent.
  std::string comment;
};

// PCM samples are clipped to [-1, 1) and scaled by 2^(bits-1).
void WriteWav(const std::string& path, const Signal& signal,
              WavEncoding encoding, std::string_view comment = {});
WavFile ReadWav(const std::string& path);

// One sample per line, written with 17 significant digits. '#' starts a
// comment; blank lines are skipped. Parse errors report the line number.
void WriteCsvSamples(const std::string& path, std::span<const double> samples,
                     std::string_view comment = {});
std::vector<double> ReadCsvSamples(const std::string& path);

// Dispatches on the extension (.wav, otherwise CSV). CSV files take their
// sample rate from csv_sample_rate_hz.
Signal ReadSignal(const std::string& path, double csv_sample_rate_hz);

}  // namespace otrir

#endif  // OTRIR_AUDIO_IO_H_
