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

#include "otrir/results_io.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace otrir {
namespace {

constexpr const char* kHeader =
    "axis_name,axis_value,method,eta_selected,nmse_sum,nmse_mean,"
    "n_realizations,seed";

std::string Real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseReal(const std::string& field, int line) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE)
    throw InvalidArgumentError("sweep csv line " + std::to_string(line) +
                               ": bad number '" + field + "'");
  return v;
}

std::uint64_t ParseUnsigned(const std::string& field, int line) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(field.c_str(), &end, 10);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE)
    throw InvalidArgumentError("sweep csv line " + std::to_string(line) +
                               ": bad integer '" + field + "'");
  return v;
}

nlohmann::json JsonReal(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::vector<SweepRow> SweepRows(const SweepResult& result) {
  std::vector<SweepRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const SweepCell& c : result.cells) {
    SweepRow r;
    r.axis_name = AxisName(result.axis);
    r.axis_value = c.axis_value;
    r.method = RegularizerName(c.method);
    r.eta_selected = c.failed ? nan : c.eta_selected;
    r.nmse_sum = c.failed ? nan : c.nmse_sum;
    r.nmse_mean = c.failed ? nan : c.nmse_mean;
    r.n_realizations = c.n_realizations;
    r.seed = c.seed;
    rows.push_back(r);
  }
  return rows;
}

std::string SweepCsv(const SweepResult& result) {
  std::ostringstream os;
  os << "# config_hash=" << result.config_hash << " seed=" << result.seed
     << " cv=" << result.cv_strategy << "\n";
  os << kHeader << "\n";
  for (const SweepRow& r : SweepRows(result)) {
    os << r.axis_name << ',' << Real(r.axis_value) << ',' << r.method << ','
       << Real(r.eta_selected) << ',' << Real(r.nmse_sum) << ','
       << Real(r.nmse_mean) << ',' << r.n_realizations << ',' << r.seed
       << "\n";
  }
  return os.str();
}

std::vector<SweepRow> ParseSweepCsv(const std::string& text) {
  std::istringstream in(text);
  std::vector<SweepRow> rows;
  bool header = false;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kHeader)
        throw InvalidArgumentError("sweep csv line " + std::to_string(line_no) +
                                   ": unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string field; std::getline(ls, field, ',');) f.push_back(field);
    if (f.size() != 8)
      throw InvalidArgumentError("sweep csv line " + std::to_string(line_no) +
                                 ": expected 8 fields");
    SweepRow r;
    r.axis_name = f[0];
    r.axis_value = ParseReal(f[1], line_no);
    r.method = f[2];
    r.eta_selected = ParseReal(f[3], line_no);
    r.nmse_sum = ParseReal(f[4], line_no);
    r.nmse_mean = ParseReal(f[5], line_no);
    r.n_realizations = static_cast<int>(ParseUnsigned(f[6], line_no));
    r.seed = ParseUnsigned(f[7], line_no);
    rows.push_back(r);
  }
  if (!header) throw InvalidArgumentError("sweep csv: missing header");
  return rows;
}

std::string SweepJson(const SweepResult& result) {
  nlohmann::json j;
  j["axis_name"] = AxisName(result.axis);
  j["cv_strategy"] = result.cv_strategy;
  j["seed"] = result.seed;
  j["config_hash"] = result.config_hash;
  j["eta_grid"] = result.eta_grid;
  j["cells"] = nlohmann::json::array();
  for (const SweepCell& c : result.cells) {
    nlohmann::json cell;
    cell["axis_value"] = c.axis_value;
    cell["method"] = RegularizerName(c.method);
    cell["failed"] = c.failed;
    cell["n_realizations"] = c.n_realizations;
    cell["seed"] = c.seed;
    if (c.failed) {
      cell["error"] = c.error;
    } else {
      cell["eta_selected"] = c.eta_selected;
      cell["nmse_sum"] = c.nmse_sum;
      cell["nmse_mean"] = c.nmse_mean;
      nlohmann::json scores = nlohmann::json::array();
      for (double s : c.eta_scores) scores.push_back(JsonReal(s));
      cell["eta_scores"] = scores;
    }
    j["cells"].push_back(cell);
  }
  return j.dump(2);
}

}  // namespace otrir
