// SPDX-License-Identifier: Apache-2.0
//
// mxl-mac: matrix exponential learning for the Gaussian vector MAC
// Copyright (C) 2026 The mxl-mac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MXL_TRACE_HPP
#define MXL_TRACE_HPP

#include "mxl/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mxl {

/// One logged iteration. Rates are in nats.
struct TraceRecord {
  long n = 0;
  double rate = 0.0;          // R_n
  double average_rate = 0.0;  // Rbar_n
  double throughput = 0.0;    // r_n = R_n / Runif_n
  double fw_gap = 0.0;
  double fenchel = 0.0;       // sum_k P_k F(Q*_k / P_k, Y_k); NaN when undefined
  double wall_ms = 0.0;
  double rate_max = 0.0;      // capacity of the current channel (NaN if not computed)
  double rate_uniform = 0.0;  // sum rate of the uniform profile on the current channel
};

struct Trace {
  std::string scenario;  // serialized Scenario
  double rate_max = std::numeric_limits<double>::quiet_NaN();
  double rate_uniform = std::numeric_limits<double>::quiet_NaN();  // R_0
  double lipschitz = std::numeric_limits<double>::quiet_NaN();
  double gamma0 = std::numeric_limits<double>::quiet_NaN();
  std::vector<TraceRecord> records;
};

inline constexpr const char* kTraceColumns = "n,R_n,Rbar_n,r_n,fw_gap,fenchel,wall_ms,Rmax_n,Runif_n";

namespace detail {

inline bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace detail

inline bool operator==(const TraceRecord& a, const TraceRecord& b) {
  using detail::same_double;
  return a.n == b.n && same_double(a.rate, b.rate) && same_double(a.average_rate, b.average_rate) &&
         same_double(a.throughput, b.throughput) && same_double(a.fw_gap, b.fw_gap) &&
         same_double(a.fenchel, b.fenchel) && same_double(a.wall_ms, b.wall_ms) &&
         same_double(a.rate_max, b.rate_max) && same_double(a.rate_uniform, b.rate_uniform);
}

inline bool operator==(const Trace& a, const Trace& b) {
  using detail::same_double;
  return a.scenario == b.scenario && same_double(a.rate_max, b.rate_max) &&
         same_double(a.rate_uniform, b.rate_uniform) && same_double(a.lipschitz, b.lipschitz) &&
         same_double(a.gamma0, b.gamma0) && a.records == b.records;
}

/// Header comments ("# key = value", scenario lines prefixed with "scenario."),
/// then the column line, then one row per record.
inline std::string to_csv(const Trace& t) {
  std::ostringstream o;
  o << "# mxl trace v1\n";
  std::istringstream sc(t.scenario);
  std::string line;
  while (std::getline(sc, line))
    if (!line.empty()) o << "# scenario." << line << '\n';
  o << "# R_max = " << format_double(t.rate_max) << '\n';
  o << "# R_0 = " << format_double(t.rate_uniform) << '\n';
  o << "# L = " << format_double(t.lipschitz) << '\n';
  o << "# gamma_0 = " << format_double(t.gamma0) << '\n';
  o << kTraceColumns << '\n';
  for (const auto& r : t.records) {
    o << r.n << ',' << format_double(r.rate) << ',' << format_double(r.average_rate) << ','
      << format_double(r.throughput) << ',' << format_double(r.fw_gap) << ',' << format_double(r.fenchel) << ','
      << format_double(r.wall_ms) << ',' << format_double(r.rate_max) << ',' << format_double(r.rate_uniform)
      << '\n';
  }
  return o.str();
}

inline Trace parse_csv(const std::string& text) {
  Trace t;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = detail::trim(line.substr(1));
      const auto eq = body.find(" = ");
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 3);
      if (key.rfind("scenario.", 0) == 0) t.scenario += key.substr(9) + " = " + value + '\n';
      else if (key == "R_max") t.rate_max = parse_double(key, value);
      else if (key == "R_0") t.rate_uniform = parse_double(key, value);
      else if (key == "L") t.lipschitz = parse_double(key, value);
      else if (key == "gamma_0") t.gamma0 = parse_double(key, value);
      continue;
    }
    if (!header) {
      if (line != kTraceColumns) throw std::runtime_error("trace: unexpected column header '" + line + "'");
      header = true;
      continue;
    }
    const auto f = detail::split(line, ',');
    if (f.size() != 9) throw std::runtime_error("trace: line " + std::to_string(lineno) + " has " +
                                                std::to_string(f.size()) + " fields, expected 9");
    TraceRecord r;
    r.n = parse_integer<long>("n", f[0]);
    r.rate = parse_double("R_n", f[1]);
    r.average_rate = parse_double("Rbar_n", f[2]);
    r.throughput = parse_double("r_n", f[3]);
    r.fw_gap = parse_double("fw_gap", f[4]);
    r.fenchel = parse_double("fenchel", f[5]);
    r.wall_ms = parse_double("wall_ms", f[6]);
    r.rate_max = parse_double("Rmax_n", f[7]);
    r.rate_uniform = parse_double("Runif_n", f[8]);
    t.records.push_back(r);
  }
  if (!header) throw std::runtime_error("trace: missing column header");
  return t;
}

inline void export_trace(const Trace& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace " + path);
  out << to_csv(t);
}

inline Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

/// First n with R_n >= fraction * Rmax_n, or -1.
inline long iterations_to_fraction(const Trace& t, double fraction) {
  for (const auto& r : t.records)
    if (!std::isnan(r.rate_max) && r.rate >= fraction * r.rate_max) return r.n;
  return -1;
}

namespace detail {

inline nlohmann::json json_number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace detail

inline nlohmann::json summary_json(const Trace& t) {
  nlohmann::json scenario = nlohmann::json::object();
  std::istringstream sc(t.scenario);
  std::string line;
  while (std::getline(sc, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) scenario[line.substr(0, eq)] = line.substr(eq + 3);
  }
  nlohmann::json j;
  j["scenario"] = scenario;
  j["R_max"] = detail::json_number(t.rate_max);
  j["R_0"] = detail::json_number(t.rate_uniform);
  j["L"] = detail::json_number(t.lipschitz);
  j["gamma_0"] = detail::json_number(t.gamma0);
  j["records"] = t.records.size();
  const long hit = iterations_to_fraction(t, 0.99);
  j["iterations_to_99"] = hit >= 0 ? nlohmann::json(hit) : nlohmann::json(nullptr);
  if (!t.records.empty()) {
    const auto& r = t.records.back();
    j["final"] = {{"n", r.n},
                  {"R_n", detail::json_number(r.rate)},
                  {"Rbar_n", detail::json_number(r.average_rate)},
                  {"r_n", detail::json_number(r.throughput)},
                  {"fw_gap", detail::json_number(r.fw_gap)},
                  {"fenchel", detail::json_number(r.fenchel)}};
  }
  return j;
}

}  // namespace mxl

#endif  // MXL_TRACE_HPP
