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

#include "otrir/config.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace otrir {
namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object())
      throw InvalidArgumentError("config: '" + name_ + "' must be an object");
  }
  ~Section() = default;

  template <typename T>
  void Get(const char* key, T* out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      *out = it->template get<T>();
    } catch (const json::exception& e) {
      throw InvalidArgumentError("config: " + Path(key) + ": " + e.what());
    }
  }

  void GetVec3(const char* key, Vec3* out) {
    std::vector<double> v;
    Get(key, &v);
    if (j_.contains(key)) {
      if (v.size() != 3)
        throw InvalidArgumentError("config: " + Path(key) +
                                   " must have 3 entries");
      *out = {v[0], v[1], v[2]};
    }
  }

  // Number or the string "inf".
  void GetExtendedReal(const char* key, double* out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_string() && it->get<std::string>() == "inf") {
      *out = std::numeric_limits<double>::infinity();
    } else if (it->is_number()) {
      *out = it->get<double>();
    } else {
      throw InvalidArgumentError("config: " + Path(key) +
                                 " must be a number or \"inf\"");
    }
  }

  bool Has(const char* key) const { return j_.contains(key); }
  const json& At(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string Path(const std::string& key) const { return name_ + "." + key; }

  void RejectUnknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw InvalidArgumentError("config: unknown key '" + Path(it.key()) +
                                   "'");
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

std::string AxisKey(SweepAxis axis) {
  return axis == SweepAxis::kRoomDims ? "room_dims" : "temperature";
}

std::string EncodingName(WavEncoding e) {
  switch (e) {
    case WavEncoding::kPcm16:
      return "pcm16";
    case WavEncoding::kPcm24:
      return "pcm24";
    case WavEncoding::kFloat32:
      return "float32";
  }
  return "float32";
}

json ExtendedReal(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  return v;
}

json ToJsonObject(const RunConfig& c) {
  json j;
  const RoomModel& r = c.room;
  j["room"] = {{"dims_m", r.dims},
               {"reflection_coeff", r.reflection_coeff},
               {"temperature_c", r.temperature_c},
               {"source_m", r.source},
               {"receiver_m", r.receiver},
               {"sample_rate_hz", r.sample_rate_hz},
               {"rir_length", r.rir_length},
               {"max_order", r.max_order},
               {"round_delays", r.round_delays}};
  const EstimationConfig& e = c.estimation;
  j["estimation"] = {{"eta", e.eta},
                     {"epsilon", e.epsilon},
                     {"max_outer_iters", e.max_outer_iters},
                     {"outer_tol", e.outer_tol},
                     {"max_bcd_iters", e.max_bcd_iters},
                     {"bcd_tol", e.bcd_tol},
                     {"use_acceleration", e.use_acceleration},
                     {"cost_scale", e.cost_scale},
                     {"regularizer", std::string(RegularizerName(e.regularizer))}};
  const EvalConfig& v = c.eval;
  j["eval"] = {{"lowpass_cutoff_hz", v.lowpass_cutoff_hz},
               {"lowpass_taps", v.lowpass_taps},
               {"snr_db", ExtendedReal(v.snr_db)},
               {"n_realizations", v.n_realizations},
               {"rng_seed", v.rng_seed},
               {"mic_center_m", v.mic_center},
               {"mic_side_m", v.mic_side},
               {"signal_length", v.signal_length},
               {"recording_length", v.recording_length}};
  std::vector<std::string> methods;
  for (RegularizerKind m : c.sweep.methods)
    methods.emplace_back(RegularizerName(m));
  j["sweep"] = {{"axis", AxisKey(c.sweep.axis)},
                {"values", c.sweep.values},
                {"methods", methods},
                {"eta_grid",
                 {{"lo", c.eta_grid_spec.lo},
                  {"hi", c.eta_grid_spec.hi},
                  {"count", c.eta_grid_spec.count}}},
                {"cv", c.sweep.cv == CvStrategy::kOracleNmse ? "oracle"
                                                             : "holdout"},
                {"holdout_fraction", c.sweep.holdout_fraction},
                {"jobs", c.sweep.jobs},
                {"keep_going", c.sweep.keep_going}};
  j["io"] = {{"input", c.io.input},
             {"observation", c.io.observation},
             {"prior", c.io.prior},
             {"truth", c.io.truth},
             {"out_dir", c.io.out_dir},
             {"wav_encoding", EncodingName(c.io.wav_encoding)}};
  return j;
}

}  // namespace

SweepAxis ParseSweepAxis(const std::string& name) {
  if (name == "room_dims") return SweepAxis::kRoomDims;
  if (name == "temperature") return SweepAxis::kTemperature;
  throw InvalidArgumentError("unknown sweep axis '" + name +
                             "' (expected room_dims or temperature)");
}

CvStrategy ParseCvStrategy(const std::string& name) {
  if (name == "oracle") return CvStrategy::kOracleNmse;
  if (name == "holdout") return CvStrategy::kHoldoutResidual;
  throw InvalidArgumentError("unknown cv strategy '" + name +
                             "' (expected oracle or holdout)");
}

RunConfig ParseRunConfig(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgumentError(std::string("config: malformed JSON: ") +
                               e.what());
  }
  RunConfig c;
  Section top(root, "config");
  if (top.Has("room")) {
    Section s(top.At("room"), "room");
    s.GetVec3("dims_m", &c.room.dims);
    s.Get("reflection_coeff", &c.room.reflection_coeff);
    s.Get("temperature_c", &c.room.temperature_c);
    s.GetVec3("source_m", &c.room.source);
    s.GetVec3("receiver_m", &c.room.receiver);
    s.Get("sample_rate_hz", &c.room.sample_rate_hz);
    s.Get("rir_length", &c.room.rir_length);
    s.Get("max_order", &c.room.max_order);
    s.Get("round_delays", &c.room.round_delays);
    s.RejectUnknown();
  }
  if (top.Has("estimation")) {
    Section s(top.At("estimation"), "estimation");
    EstimationConfig& e = c.estimation;
    s.Get("eta", &e.eta);
    s.Get("epsilon", &e.epsilon);
    s.Get("max_outer_iters", &e.max_outer_iters);
    s.Get("outer_tol", &e.outer_tol);
    s.Get("max_bcd_iters", &e.max_bcd_iters);
    s.Get("bcd_tol", &e.bcd_tol);
    s.Get("use_acceleration", &e.use_acceleration);
    s.Get("cost_scale", &e.cost_scale);
    std::string reg(RegularizerName(e.regularizer));
    s.Get("regularizer", &reg);
    e.regularizer = ParseRegularizer(reg);
    s.RejectUnknown();
  }
  if (top.Has("eval")) {
    Section s(top.At("eval"), "eval");
    EvalConfig& v = c.eval;
    s.Get("lowpass_cutoff_hz", &v.lowpass_cutoff_hz);
    s.Get("lowpass_taps", &v.lowpass_taps);
    s.GetExtendedReal("snr_db", &v.snr_db);
    s.Get("n_realizations", &v.n_realizations);
    s.Get("rng_seed", &v.rng_seed);
    s.GetVec3("mic_center_m", &v.mic_center);
    s.Get("mic_side_m", &v.mic_side);
    s.Get("signal_length", &v.signal_length);
    s.Get("recording_length", &v.recording_length);
    s.RejectUnknown();
  }
  if (top.Has("sweep")) {
    Section s(top.At("sweep"), "sweep");
    SweepSpec& w = c.sweep;
    std::string axis = AxisKey(w.axis);
    s.Get("axis", &axis);
    w.axis = ParseSweepAxis(axis);
    s.Get("values", &w.values);
    if (s.Has("methods")) {
      std::vector<std::string> names;
      s.Get("methods", &names);
      w.methods.clear();
      for (const std::string& n : names) w.methods.push_back(ParseRegularizer(n));
    }
    if (s.Has("eta_grid")) {
      Section g(s.At("eta_grid"), "sweep.eta_grid");
      g.Get("lo", &c.eta_grid_spec.lo);
      g.Get("hi", &c.eta_grid_spec.hi);
      g.Get("count", &c.eta_grid_spec.count);
      g.RejectUnknown();
    }
    std::string cv = w.cv == CvStrategy::kOracleNmse ? "oracle" : "holdout";
    s.Get("cv", &cv);
    w.cv = ParseCvStrategy(cv);
    s.Get("holdout_fraction", &w.holdout_fraction);
    s.Get("jobs", &w.jobs);
    s.Get("keep_going", &w.keep_going);
    s.RejectUnknown();
  }
  if (top.Has("io")) {
    Section s(top.At("io"), "io");
    s.Get("input", &c.io.input);
    s.Get("observation", &c.io.observation);
    s.Get("prior", &c.io.prior);
    s.Get("truth", &c.io.truth);
    s.Get("out_dir", &c.io.out_dir);
    std::string enc = EncodingName(c.io.wav_encoding);
    s.Get("wav_encoding", &enc);
    c.io.wav_encoding = ParseWavEncoding(enc);
    s.RejectUnknown();
  }
  top.RejectUnknown();
  const EtaGridSpec& g = c.eta_grid_spec;
  if (g.count == 1 && g.lo == g.hi && g.lo > 0.0)
    c.sweep.eta_grid = {g.lo};
  else
    c.sweep.eta_grid = EtaGrid(g.lo, g.hi, g.count);
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str());
}

std::string RunConfigToJson(const RunConfig& config, int indent) {
  return ToJsonObject(config).dump(indent);
}

std::string ConfigHash(const RunConfig& config) {
  json j = ToJsonObject(config);
  j["sweep"].erase("jobs");
  j["io"].erase("out_dir");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace otrir
