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

#ifndef MXL_PLOTS_HPP
#define MXL_PLOTS_HPP

#include "mxl/scenario.hpp"
#include "mxl/trace.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace mxl {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

namespace detail {

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

inline std::string tick_label(double v) {
  std::ostringstream o;
  o.precision(3);
  o << v;
  return o.str();
}

/// Roughly five round ticks covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    step = f * mag;
    if (step >= raw) break;
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(v);
  return t;
}

}  // namespace detail

/// Standalone SVG line chart.
inline std::string render_svg(const Chart& c) {
  constexpr double W = 720, H = 440, left = 70, right = 170, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;
  auto ty = [&](double y) { return c.log_y ? std::log10(std::max(y, 1e-16)) : y; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : c.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };
  auto pyt = [&](double t) { return top + (1.0 - (t - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << detail::xml_escape(c.title) << "</text>\n";

  for (double t : detail::nice_ticks(x0, x1)) {
    o << "<line x1=\"" << px(t) << "\" y1=\"" << top << "\" x2=\"" << px(t) << "\" y2=\"" << top + ph
      << "\" stroke=\"#e5e5e5\"/>\n";
    o << "<text x=\"" << px(t) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << detail::tick_label(t)
      << "</text>\n";
  }
  for (double t : detail::nice_ticks(y0, y1)) {
    o << "<line x1=\"" << left << "\" y1=\"" << pyt(t) << "\" x2=\"" << left + pw << "\" y2=\"" << pyt(t)
      << "\" stroke=\"#e5e5e5\"/>\n";
    const std::string label = c.log_y ? "1e" + detail::tick_label(t) : detail::tick_label(t);
    o << "<text x=\"" << left - 6 << "\" y=\"" << pyt(t) + 4 << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 14 << "\" text-anchor=\"middle\">"
    << detail::xml_escape(c.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << detail::xml_escape(c.y_label) << "</text>\n";

  for (std::size_t i = 0; i < c.series.size(); ++i) {
    const auto& s = c.series[i];
    const char* color = detail::kPalette[i % std::size(detail::kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\""
      << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (std::size_t j = 0; j < s.x.size() && j < s.y.size(); ++j) {
      if (std::isfinite(s.x[j]) && std::isfinite(s.y[j])) o << px(s.x[j]) << ',' << py(s.y[j]) << ' ';
    }
    o << "\"/>\n";
    const double ly = top + 14 + 18 * static_cast<double>(i);
    o << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
      << "/>\n";
    o << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << detail::xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

namespace detail {

inline std::string echo_value(const Trace& t, const std::string& key) {
  std::istringstream in(t.scenario);
  std::string line;
  const std::string prefix = key + " = ";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return {};
}

inline std::string trace_label(const Trace& t) {
  const std::string alg = echo_value(t, "algorithm");
  const std::string name = echo_value(t, "name");
  return name.empty() || name == "scenario" ? alg : name + " (" + alg + ")";
}

template <class F>
Series column(const Trace& t, const std::string& label, F&& f, double x_scale = 1.0) {
  Series s;
  s.label = label;
  for (const auto& r : t.records) {
    s.x.push_back(static_cast<double>(r.n) * x_scale);
    s.y.push_back(f(r));
  }
  return s;
}

}  // namespace detail

/// Chart layouts for a set of traces:
///   throughput.svg  r_n per trace (convergence comparison)
///   rate.svg        R_n in bits per trace, with R_max dashed
///   gap.svg         fw_gap on a log axis
///   tracking-<i>.svg  for time-varying channels: R_n, per-step capacity
///                     and the uniform profile's rate against time
/// Returns the written paths.
inline std::vector<std::string> emit_plots(const std::vector<Trace>& traces, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const double bits = 1.0 / std::numbers::ln2;
  std::vector<std::string> written;
  auto write = [&](const std::string& file, const Chart& c) {
    const auto path = (fs::path(dir) / file).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write plot " + path);
    out << render_svg(c);
    written.push_back(path);
  };

  Chart throughput{"Normalized throughput gain", "iteration n", "r_n = R_n / R_0", false, {}};
  Chart rate{"Sum rate", "iteration n", "sum rate (bits/s/Hz)", false, {}};
  Chart gap{"Optimality gap", "iteration n", "Frank-Wolfe gap (nats)", true, {}};
  bool any_gap = false;
  for (const auto& t : traces) {
    const std::string label = detail::trace_label(t);
    throughput.series.push_back(detail::column(t, label, [](const TraceRecord& r) { return r.throughput; }));
    rate.series.push_back(detail::column(t, label, [&](const TraceRecord& r) { return r.rate * bits; }));
    gap.series.push_back(detail::column(t, label, [](const TraceRecord& r) { return r.fw_gap; }));
    for (const auto& r : t.records) any_gap = any_gap || std::isfinite(r.fw_gap);
  }
  for (const auto& t : traces) {
    if (std::isfinite(t.rate_max)) {
      Series cap = detail::column(t, "R_max", [&](const TraceRecord&) { return t.rate_max * bits; });
      cap.dashed = true;
      rate.series.push_back(std::move(cap));
      break;
    }
  }
  write("throughput.svg", throughput);
  write("rate.svg", rate);
  if (any_gap) write("gap.svg", gap);

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    if (detail::echo_value(t, "channel") != "jakes") continue;
    const std::string period = detail::echo_value(t, "update_period_s");
    const double dt = period.empty() ? 1.0 : std::stod(period);
    Chart c{"Tracking: " + detail::trace_label(t), "time (s)", "sum rate (bits/s/Hz)", false, {}};
    c.series.push_back(detail::column(t, "R_n", [&](const TraceRecord& r) { return r.rate * bits; }, dt));
    Series cap = detail::column(t, "capacity", [&](const TraceRecord& r) { return r.rate_max * bits; }, dt);
    cap.dashed = true;
    c.series.push_back(std::move(cap));
    c.series.push_back(
        detail::column(t, "uniform", [&](const TraceRecord& r) { return r.rate_uniform * bits; }, dt));
    write("tracking-" + std::to_string(i) + ".svg", c);
  }
  return written;
}

}  // namespace mxl

#endif  // MXL_PLOTS_HPP
