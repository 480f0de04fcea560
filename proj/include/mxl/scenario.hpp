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

#ifndef MXL_SCENARIO_HPP
#define MXL_SCENARIO_HPP

#include "mxl/estimation.hpp"
#include "mxl/learners.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mxl {

enum class Algorithm { mxl, mxl_async, mxl_eig, iwf, swf };
enum class ChannelMode { fixed, jakes, iid };

/// Bad scenario field; what() reads "<key>: <reason>".
class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(const std::string& key, const std::string& reason)
      : std::invalid_argument(key + ": " + reason), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Antenna counts: an explicit per-user list, or a range [lo, hi] drawn per user.
struct AntennaSpec {
  Index lo = 2;
  Index hi = 2;
  std::vector<Index> list;

  bool operator==(const AntennaSpec&) const = default;
};

struct Scenario {
  static constexpr int kFormatVersion = 1;

  std::string name = "scenario";
  Algorithm algorithm = Algorithm::mxl;

  Index users = 2;
  Index rx_antennas = 4;
  AntennaSpec tx_antennas;
  std::vector<double> powers{1.0};  // one value for everyone, or one per user

  ChannelMode channel = ChannelMode::fixed;
  double velocity_mps = 5.0;
  double carrier_hz = 2e9;
  double update_period_s = 5e-3;
  int oscillators = 16;

  StepSchedule::Kind step = StepSchedule::Kind::constant;
  std::optional<double> step_gamma;  // empty: derived from the Lipschitz estimate
  double step_exponent = 0.5;
  double step_rho = 0.1;

  NoiseModel::Kind noise = NoiseModel::Kind::none;
  double noise_eta = 0.0;
  NoiseLaw noise_law = NoiseLaw::gaussian_symmetric;
  int samples = 64;
  double channel_error_std = 0.0;

  UpdateKernel kernel = UpdateKernel::all_users;
  int max_delay = 0;
  double stickiness = 0.5;
  double bernoulli_rate = 0.5;

  long iterations = 100;
  double stop_gap = 0.0;  // early stop once fw_gap <= stop_gap (0 disables)
  int lipschitz_draws = 100;
  bool oracle = true;
  bool record_wall_time = false;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> channel_seed;  // empty: same as seed

  std::uint64_t topology_seed() const { return channel_seed.value_or(seed); }

  bool operator==(const Scenario&) const = default;
};

// ---------------------------------------------------------------------------
// Enum names

namespace detail {

template <class E>
struct EnumName {
  E value;
  const char* name;
};

inline constexpr EnumName<Algorithm> kAlgorithms[] = {{Algorithm::mxl, "mxl"},
                                                      {Algorithm::mxl_async, "mxl-a"},
                                                      {Algorithm::mxl_eig, "mxl-eig"},
                                                      {Algorithm::iwf, "iwf"},
                                                      {Algorithm::swf, "swf"}};
inline constexpr EnumName<ChannelMode> kChannels[] = {
    {ChannelMode::fixed, "static"}, {ChannelMode::jakes, "jakes"}, {ChannelMode::iid, "iid"}};
inline constexpr EnumName<StepSchedule::Kind> kSteps[] = {{StepSchedule::Kind::constant, "constant"},
                                                          {StepSchedule::Kind::power_law, "power"},
                                                          {StepSchedule::Kind::adaptive_drop, "adaptive"}};
inline constexpr EnumName<NoiseModel::Kind> kNoises[] = {{NoiseModel::Kind::none, "none"},
                                                         {NoiseModel::Kind::synthetic, "synthetic"},
                                                         {NoiseModel::Kind::pipeline, "pipeline"}};
inline constexpr EnumName<NoiseLaw> kLaws[] = {{NoiseLaw::gaussian_symmetric, "gaussian"},
                                               {NoiseLaw::bounded_uniform, "bounded"}};
inline constexpr EnumName<UpdateKernel> kKernels[] = {{UpdateKernel::all_users, "all"},
                                                      {UpdateKernel::uniform_single, "uniform"},
                                                      {UpdateKernel::sticky_single, "sticky"},
                                                      {UpdateKernel::bernoulli, "bernoulli"}};

template <class E, std::size_t N>
const char* enum_name(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  throw std::logic_error("enum_name: unknown value");
}

template <class E, std::size_t N>
E enum_parse(const EnumName<E> (&table)[N], const std::string& key, const std::string& text) {
  for (const auto& e : table)
    if (text == e.name) return e.value;
  std::string options;
  for (const auto& e : table) options += (options.empty() ? "" : ", ") + std::string(e.name);
  throw ScenarioError(key, "unknown value '" + text + "' (expected one of " + options + ")");
}

}  // namespace detail

inline const char* to_string(Algorithm a) { return detail::enum_name(detail::kAlgorithms, a); }
inline const char* to_string(ChannelMode c) { return detail::enum_name(detail::kChannels, c); }
inline const char* to_string(StepSchedule::Kind k) { return detail::enum_name(detail::kSteps, k); }
inline const char* to_string(NoiseModel::Kind k) { return detail::enum_name(detail::kNoises, k); }
inline const char* to_string(NoiseLaw l) { return detail::enum_name(detail::kLaws, l); }
inline const char* to_string(UpdateKernel k) { return detail::enum_name(detail::kKernels, k); }

inline Algorithm parse_algorithm(const std::string& s) { return detail::enum_parse(detail::kAlgorithms, "algorithm", s); }

// ---------------------------------------------------------------------------
// Number formatting that survives a round trip

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& key, std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), x);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw ScenarioError(key, "'" + std::string(text) + "' is not a number");
  }
  return x;
}

template <class Int>
Int parse_integer(const std::string& key, std::string_view text) {
  Int x{};
  const auto r = std::from_chars(text.data(), text.data() + text.size(), x);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw ScenarioError(key, "'" + std::string(text) + "' is not an integer");
  }
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ScenarioError(key, "'" + text + "' is not a boolean (true/false)");
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

inline std::string join_doubles(const std::vector<double>& xs) {
  std::string s;
  for (double x : xs) s += (s.empty() ? "" : ",") + format_double(x);
  return s;
}

}  // namespace detail

inline std::string format_antennas(const AntennaSpec& a) {
  if (!a.list.empty()) {
    std::string s;
    for (Index m : a.list) s += (s.empty() ? "" : ",") + std::to_string(m);
    return s;
  }
  if (a.lo == a.hi) return std::to_string(a.lo);
  return std::to_string(a.lo) + ".." + std::to_string(a.hi);
}

inline AntennaSpec parse_antennas(const std::string& key, const std::string& text) {
  AntennaSpec a;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    a.lo = parse_integer<Index>(key, detail::trim(text.substr(0, dots)));
    a.hi = parse_integer<Index>(key, detail::trim(text.substr(dots + 2)));
    return a;
  }
  const auto parts = detail::split(text, ',');
  if (parts.size() == 1) {
    a.lo = a.hi = parse_integer<Index>(key, parts[0]);
    return a;
  }
  for (const auto& p : parts) a.list.push_back(parse_integer<Index>(key, p));
  return a;
}

// ---------------------------------------------------------------------------
// Validation

inline void validate(const Scenario& s) {
  auto require = [](bool ok, const char* key, const std::string& why) {
    if (!ok) throw ScenarioError(key, why);
  };
  require(!s.name.empty() && s.name.find_first_of("\n#") == std::string::npos && detail::trim(s.name) == s.name,
          "name", "must be a non-empty single line without '#' or surrounding blanks");
  require(s.users >= 1, "users", "must be at least 1");
  require(s.rx_antennas >= 1, "rx_antennas", "must be at least 1");
  if (s.tx_antennas.list.empty()) {
    require(s.tx_antennas.lo >= 1 && s.tx_antennas.hi >= s.tx_antennas.lo, "tx_antennas",
            "range must satisfy 1 <= lo <= hi");
  } else {
    require(static_cast<Index>(s.tx_antennas.list.size()) == s.users, "tx_antennas",
            "list length must equal users");
    for (Index m : s.tx_antennas.list) require(m >= 1, "tx_antennas", "counts must be positive");
  }
  require(s.powers.size() == 1 || static_cast<Index>(s.powers.size()) == s.users, "power",
          "give one value or one per user");
  for (double p : s.powers) require(p > 0.0 && std::isfinite(p), "power", "must be positive and finite");

  if (s.channel == ChannelMode::jakes) {
    require(s.velocity_mps >= 0.0 && std::isfinite(s.velocity_mps), "velocity_mps", "must be nonnegative");
    require(s.carrier_hz > 0.0 && std::isfinite(s.carrier_hz), "carrier_hz", "must be positive");
    require(s.update_period_s > 0.0 && std::isfinite(s.update_period_s), "update_period_s", "must be positive");
    require(s.oscillators >= 16, "oscillators", "must be at least 16");
  }

  if (s.step_gamma) require(*s.step_gamma > 0.0 && std::isfinite(*s.step_gamma), "step_gamma", "must be positive or auto");
  require(s.step_exponent > 0.0 && s.step_exponent <= 1.0, "step_exponent", "must be in (0, 1]");
  require(s.step_rho > 0.0 && s.step_rho < 1.0, "step_rho", "must be in (0, 1)");

  if (s.noise == NoiseModel::Kind::synthetic) require(s.noise_eta >= 0.0 && std::isfinite(s.noise_eta), "noise_eta", "must be nonnegative");
  if (s.noise == NoiseModel::Kind::pipeline) {
    require(s.samples >= 2 && s.samples > s.rx_antennas + 1, "samples", "must exceed rx_antennas + 1");
    require(s.channel_error_std >= 0.0 && std::isfinite(s.channel_error_std), "channel_error_std", "must be nonnegative");
  }
  require(!(s.algorithm == Algorithm::mxl_eig && s.noise != NoiseModel::Kind::none), "noise",
          "mxl-eig runs on exact gradients only");

  require(s.max_delay >= 0, "max_delay", "must be nonnegative");
  require(s.stickiness >= 0.0 && s.stickiness <= 1.0, "stickiness", "must be in [0, 1]");
  require(s.bernoulli_rate > 0.0 && s.bernoulli_rate <= 1.0, "bernoulli_rate", "must be in (0, 1]");
  if (s.algorithm != Algorithm::mxl_async) {
    require(s.kernel == UpdateKernel::all_users && s.max_delay == 0, "kernel",
            "update kernels and delays apply to mxl-a only");
  }

  require(s.iterations >= 0, "iterations", "must be nonnegative");
  require(s.stop_gap >= 0.0, "stop_gap", "must be nonnegative");
  require(s.lipschitz_draws >= 1, "lipschitz_draws", "must be at least 1");
}

// ---------------------------------------------------------------------------
// Text format: "key = value" lines, '#' comments, format_version first.

inline std::string serialize(const Scenario& s) {
  std::ostringstream o;
  auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
  kv("format_version", std::to_string(Scenario::kFormatVersion));
  kv("name", s.name);
  kv("algorithm", to_string(s.algorithm));
  kv("users", std::to_string(s.users));
  kv("rx_antennas", std::to_string(s.rx_antennas));
  kv("tx_antennas", format_antennas(s.tx_antennas));
  kv("power", detail::join_doubles(s.powers));
  kv("channel", to_string(s.channel));
  kv("velocity_mps", format_double(s.velocity_mps));
  kv("carrier_hz", format_double(s.carrier_hz));
  kv("update_period_s", format_double(s.update_period_s));
  kv("oscillators", std::to_string(s.oscillators));
  kv("step", to_string(s.step));
  kv("step_gamma", s.step_gamma ? format_double(*s.step_gamma) : "auto");
  kv("step_exponent", format_double(s.step_exponent));
  kv("step_rho", format_double(s.step_rho));
  kv("noise", to_string(s.noise));
  kv("noise_eta", format_double(s.noise_eta));
  kv("noise_law", to_string(s.noise_law));
  kv("samples", std::to_string(s.samples));
  kv("channel_error_std", format_double(s.channel_error_std));
  kv("kernel", to_string(s.kernel));
  kv("max_delay", std::to_string(s.max_delay));
  kv("stickiness", format_double(s.stickiness));
  kv("bernoulli_rate", format_double(s.bernoulli_rate));
  kv("iterations", std::to_string(s.iterations));
  kv("stop_gap", format_double(s.stop_gap));
  kv("lipschitz_draws", std::to_string(s.lipschitz_draws));
  kv("oracle", s.oracle ? "true" : "false");
  kv("record_wall_time", s.record_wall_time ? "true" : "false");
  kv("seed", std::to_string(s.seed));
  kv("channel_seed", s.channel_seed ? std::to_string(*s.channel_seed) : "auto");
  return o.str();
}

/// Applies one "key = value" assignment to s.
inline void set_field(Scenario& s, const std::string& key, const std::string& v) {
  using namespace detail;
  if (key == "name") s.name = v;
  else if (key == "algorithm") s.algorithm = enum_parse(kAlgorithms, key, v);
  else if (key == "users") s.users = parse_integer<Index>(key, v);
  else if (key == "rx_antennas") s.rx_antennas = parse_integer<Index>(key, v);
  else if (key == "tx_antennas") s.tx_antennas = parse_antennas(key, v);
  else if (key == "power") {
    s.powers.clear();
    for (const auto& p : split(v, ',')) s.powers.push_back(parse_double(key, p));
  }
  else if (key == "channel") s.channel = enum_parse(kChannels, key, v);
  else if (key == "velocity_mps") s.velocity_mps = parse_double(key, v);
  else if (key == "carrier_hz") s.carrier_hz = parse_double(key, v);
  else if (key == "update_period_s") s.update_period_s = parse_double(key, v);
  else if (key == "oscillators") s.oscillators = parse_integer<int>(key, v);
  else if (key == "step") s.step = enum_parse(kSteps, key, v);
  else if (key == "step_gamma") s.step_gamma = v == "auto" ? std::nullopt : std::optional<double>(parse_double(key, v));
  else if (key == "step_exponent") s.step_exponent = parse_double(key, v);
  else if (key == "step_rho") s.step_rho = parse_double(key, v);
  else if (key == "noise") s.noise = enum_parse(kNoises, key, v);
  else if (key == "noise_eta") s.noise_eta = parse_double(key, v);
  else if (key == "noise_law") s.noise_law = enum_parse(kLaws, key, v);
  else if (key == "samples") s.samples = parse_integer<int>(key, v);
  else if (key == "channel_error_std") s.channel_error_std = parse_double(key, v);
  else if (key == "kernel") s.kernel = enum_parse(kKernels, key, v);
  else if (key == "max_delay") s.max_delay = parse_integer<int>(key, v);
  else if (key == "stickiness") s.stickiness = parse_double(key, v);
  else if (key == "bernoulli_rate") s.bernoulli_rate = parse_double(key, v);
  else if (key == "iterations") s.iterations = parse_integer<long>(key, v);
  else if (key == "stop_gap") s.stop_gap = parse_double(key, v);
  else if (key == "lipschitz_draws") s.lipschitz_draws = parse_integer<int>(key, v);
  else if (key == "oracle") s.oracle = parse_bool(key, v);
  else if (key == "record_wall_time") s.record_wall_time = parse_bool(key, v);
  else if (key == "seed") s.seed = parse_integer<std::uint64_t>(key, v);
  else if (key == "channel_seed")
    s.channel_seed = v == "auto" ? std::nullopt : std::optional<std::uint64_t>(parse_integer<std::uint64_t>(key, v));
  else throw ScenarioError(key, "unknown key");
}

/// Parses and validates a scenario. Missing keys keep their defaults; keys
/// may appear at most once; format_version must be present and supported.
inline Scenario parse_scenario(const std::string& text) {
  Scenario s;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool versioned = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string value = detail::trim(body.substr(eq + 1));
    if (key.empty()) throw ScenarioError("line " + std::to_string(lineno), "missing key");
    if (seen.count(key)) {
      throw ScenarioError(key, "duplicate (lines " + std::to_string(seen[key]) + " and " + std::to_string(lineno) + ")");
    }
    seen[key] = lineno;
    if (key == "format_version") {
      const int v = parse_integer<int>(key, value);
      if (v != Scenario::kFormatVersion) {
        throw ScenarioError(key, "unsupported version " + value + " (this build reads " +
                                     std::to_string(Scenario::kFormatVersion) + ")");
      }
      versioned = true;
      continue;
    }
    set_field(s, key, value);
  }
  if (!versioned) throw ScenarioError("format_version", "missing");
  validate(s);
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file " + path);
  out << serialize(s);
}

}  // namespace mxl

#endif  // MXL_SCENARIO_HPP
