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

#include "otrir/audio_io.h"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace otrir {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

void PutU16(std::string* out, std::uint16_t v) {
  out->push_back(static_cast<char>(v & 0xFF));
  out->push_back(static_cast<char>(v >> 8));
}

void PutU32(std::string* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

std::uint32_t GetU32(const std::string& b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i)
    v = (v << 8) | static_cast<unsigned char>(b[at + i]);
  return v;
}

std::uint16_t GetU16(const std::string& b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

int BitsOf(WavEncoding e) {
  switch (e) {
    case WavEncoding::kPcm16:
      return 16;
    case WavEncoding::kPcm24:
      return 24;
    case WavEncoding::kFloat32:
      return 32;
  }
  return 32;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::int32_t Quantize(double x, int bits) {
  const double full = std::ldexp(1.0, bits - 1);
  const double q = std::nearbyint(x * full);
  return static_cast<std::int32_t>(std::clamp(q, -full, full - 1.0));
}

std::string Trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

WavEncoding ParseWavEncoding(std::string_view name) {
  if (name == "pcm16") return WavEncoding::kPcm16;
  if (name == "pcm24") return WavEncoding::kPcm24;
  if (name == "float32") return WavEncoding::kFloat32;
  throw InvalidArgumentError("unknown WAV encoding '" + std::string(name) +
                             "' (expected pcm16, pcm24 or float32)");
}

void WriteWav(const std::string& path, const Signal& signal,
              WavEncoding encoding, std::string_view comment) {
  ValidateSignal(signal, "wav output");
  const double rate = std::nearbyint(signal.sample_rate_hz);
  if (rate != signal.sample_rate_hz || rate > 4294967295.0)
    throw InvalidArgumentError("wav output: sample rate must be an integer");
  const int bits = BitsOf(encoding);
  const int bytes_per = bits / 8;
  const std::uint64_t data_bytes =
      static_cast<std::uint64_t>(signal.samples.size()) * bytes_per;

  std::string data;
  data.reserve(data_bytes);
  for (double x : signal.samples) {
    if (encoding == WavEncoding::kFloat32) {
      const std::uint32_t raw = std::bit_cast<std::uint32_t>(
          static_cast<float>(x));
      PutU32(&data, raw);
    } else {
      const std::uint32_t q = static_cast<std::uint32_t>(Quantize(x, bits));
      for (int i = 0; i < bytes_per; ++i)
        data.push_back(static_cast<char>(q >> (8 * i)));
    }
  }

  std::string list;
  if (!comment.empty()) {
    std::string text(comment);
    text.push_back('\0');
    if (text.size() % 2) text.push_back('\0');
    list = "INFO";
    list += "ICMT";
    PutU32(&list, static_cast<std::uint32_t>(text.size()));
    list += text;
  }

  std::string out = "RIFF";
  const std::uint64_t riff_size = 4 + (8 + 16) + (8 + data.size()) +
                                  (list.empty() ? 0 : 8 + list.size()) +
                                  (data.size() % 2);
  if (riff_size > 0xFFFFFFFFull) throw IoError("wav output too large");
  PutU32(&out, static_cast<std::uint32_t>(riff_size));
  out += "WAVEfmt ";
  PutU32(&out, 16);
  PutU16(&out, encoding == WavEncoding::kFloat32 ? kFormatFloat : kFormatPcm);
  PutU16(&out, 1);
  PutU32(&out, static_cast<std::uint32_t>(rate));
  PutU32(&out, static_cast<std::uint32_t>(rate) * bytes_per);
  PutU16(&out, static_cast<std::uint16_t>(bytes_per));
  PutU16(&out, static_cast<std::uint16_t>(bits));
  if (!list.empty()) {
    out += "LIST";
    PutU32(&out, static_cast<std::uint32_t>(list.size()));
    out += list;
  }
  out += "data";
  PutU32(&out, static_cast<std::uint32_t>(data.size()));
  out += data;
  if (data.size() % 2) out.push_back('\0');
  WriteFile(path, out);
}

WavFile ReadWav(const std::string& path) {
  const std::string b = ReadFile(path);
  auto corrupt = [&](const std::string& why) {
    return IoError("corrupt WAV '" + path + "': " + why);
  };
  if (b.size() < 12 || b.compare(0, 4, "RIFF") != 0 ||
      b.compare(8, 4, "WAVE") != 0)
    throw corrupt("missing RIFF/WAVE header");

  WavFile wav;
  bool have_fmt = false, have_data = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_at = 0, data_len = 0;
  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    const std::string id = b.substr(at, 4);
    const std::size_t len = GetU32(b, at + 4);
    const std::size_t body = at + 8;
    if (len > b.size() - body) throw corrupt("chunk '" + id + "' overruns file");
    if (id == "fmt ") {
      if (len < 16) throw corrupt("short fmt chunk");
      format = GetU16(b, body);
      channels = GetU16(b, body + 2);
      rate = GetU32(b, body + 4);
      bits = GetU16(b, body + 14);
      if (format == kFormatExtensible) {
        if (len < 40) throw corrupt("short extensible fmt chunk");
        format = GetU16(b, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data_at = body;
      data_len = len;
      have_data = true;
    } else if (id == "LIST" && len >= 4 && b.compare(body, 4, "INFO") == 0) {
      std::size_t sub = body + 4;
      while (sub + 8 <= body + len) {
        const std::size_t sub_len = GetU32(b, sub + 4);
        if (sub_len > body + len - sub - 8) break;
        if (b.compare(sub, 4, "ICMT") == 0) {
          std::string text = b.substr(sub + 8, sub_len);
          wav.comment = text.substr(0, text.find('\0'));
        }
        sub += 8 + sub_len + (sub_len % 2);
      }
    }
    at = body + len + (len % 2);
  }
  if (!have_fmt) throw corrupt("no fmt chunk");
  if (!have_data) throw corrupt("no data chunk");
  if (channels != 1)
    throw IoError("unsupported WAV '" + path + "': " +
                  std::to_string(channels) + " channels (expected mono)");
  if (rate == 0) throw corrupt("zero sample rate");
  if (format == kFormatPcm && (bits == 16 || bits == 24)) {
    wav.encoding = bits == 16 ? WavEncoding::kPcm16 : WavEncoding::kPcm24;
  } else if (format == kFormatFloat && bits == 32) {
    wav.encoding = WavEncoding::kFloat32;
  } else {
    throw IoError("unsupported WAV codec in '" + path + "': format " +
                  std::to_string(format) + ", " + std::to_string(bits) +
                  " bits");
  }
  const std::size_t bytes_per = bits / 8;
  if (data_len % bytes_per) throw corrupt("partial sample in data chunk");

  wav.signal.sample_rate_hz = rate;
  wav.signal.samples.resize(data_len / bytes_per);
  for (std::size_t i = 0; i < wav.signal.samples.size(); ++i) {
    const std::size_t p = data_at + i * bytes_per;
    if (wav.encoding == WavEncoding::kFloat32) {
      wav.signal.samples[i] = std::bit_cast<float>(GetU32(b, p));
    } else {
      std::uint32_t raw = 0;
      for (std::size_t k = 0; k < bytes_per; ++k)
        raw |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[p + k]))
               << (8 * k);
      const int shift = 32 - bits;
      const std::int32_t v = static_cast<std::int32_t>(raw << shift) >> shift;
      wav.signal.samples[i] = std::ldexp(static_cast<double>(v), 1 - bits);
    }
  }
  if (!AllFinite(wav.signal.samples))
    throw corrupt("non-finite sample values");
  return wav;
}

void WriteCsvSamples(const std::string& path, std::span<const double> samples,
                     std::string_view comment) {
  std::string out;
  if (!comment.empty()) {
    std::istringstream lines{std::string(comment)};
    for (std::string line; std::getline(lines, line);) out += "# " + line + "\n";
  }
  char buf[40];
  for (double x : samples) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", x);
    out += buf;
  }
  WriteFile(path, out);
}

std::vector<double> ReadCsvSamples(const std::string& path) {
  std::istringstream in(ReadFile(path));
  std::vector<double> out;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string t = Trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
      throw IoError(path + ":" + std::to_string(line_no) +
                    ": not a finite number: '" + t + "'");
    out.push_back(v);
  }
  return out;
}

Signal ReadSignal(const std::string& path, double csv_sample_rate_hz) {
  const auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == "wav") return ReadWav(path).signal;
  Signal s;
  s.samples = ReadCsvSamples(path);
  s.sample_rate_hz = csv_sample_rate_hz;
  return s;
}

}  // namespace otrir
