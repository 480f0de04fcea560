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

// mxl-sim: run, sweep, compare and plot covariance-learning scenarios.

#include "mxl/mxl.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace mxl;

namespace {

void apply_overrides(Scenario& s, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ScenarioError(kv, "override must be key=value");
    set_field(s, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
  }
  validate(s);
}

/// "5" -> 1..5, "3..9" -> 3..9, "1,4,7" -> list.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto lo = parse_integer<std::uint64_t>("seeds", detail::trim(text.substr(0, dots)));
    const auto hi = parse_integer<std::uint64_t>("seeds", detail::trim(text.substr(dots + 2)));
    if (hi < lo) throw ScenarioError("seeds", "empty range");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  const auto parts = detail::split(text, ',');
  if (parts.size() == 1) {
    const auto n = parse_integer<std::uint64_t>("seeds", detail::trim(parts[0]));
    for (std::uint64_t s = 1; s <= n; ++s) out.push_back(s);
    return out;
  }
  for (const auto& p : parts) out.push_back(parse_integer<std::uint64_t>("seeds", detail::trim(p)));
  return out;
}

std::string run_stem(const Scenario& s) {
  return s.name + "-" + to_string(s.algorithm) + "-s" + std::to_string(s.seed);
}

struct Outcome {
  Scenario scenario;
  std::string label;  // grid point, "" without a parameter grid
  Trace trace;
};

/// Runs every scenario, `jobs` at a time. Results keep input order.
std::vector<Outcome> run_all(std::vector<Outcome> work, int jobs) {
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < work.size();) {
      work[i].trace = run_scenario(work[i].scenario);
      std::lock_guard lock(io);
      std::cerr << "  done " << run_stem(work[i].scenario) << (work[i].label.empty() ? "" : " [" + work[i].label + "]")
                << '\n';
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::max(1, jobs); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return work;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

double final_or_nan(const Trace& t, double TraceRecord::*field) {
  return t.records.empty() ? std::numeric_limits<double>::quiet_NaN() : t.records.back().*field;
}

/// Per-run table plus per-group statistics (median/mean/std of the final metrics).
std::string summary_table(const std::vector<Outcome>& runs, const std::string& group_header) {
  std::ostringstream o;
  o << group_header << ",seed,n,R_n,Rbar_n,r_n,fw_gap,R_max,iterations_to_99\n";
  for (const auto& r : runs) {
    const auto& t = r.trace;
    o << r.label << ',' << r.scenario.seed << ',' << (t.records.empty() ? 0 : t.records.back().n) << ','
      << format_double(final_or_nan(t, &TraceRecord::rate)) << ','
      << format_double(final_or_nan(t, &TraceRecord::average_rate)) << ','
      << format_double(final_or_nan(t, &TraceRecord::throughput)) << ','
      << format_double(final_or_nan(t, &TraceRecord::fw_gap)) << ',' << format_double(t.rate_max) << ','
      << iterations_to_fraction(t, 0.99) << '\n';
  }
  return o.str();
}

void print_stats(const std::vector<Outcome>& runs) {
  std::vector<std::string> groups;
  for (const auto& r : runs)
    if (std::find(groups.begin(), groups.end(), r.label) == groups.end()) groups.push_back(r.label);
  std::printf("%-24s %6s %12s %12s %12s %12s\n", "group", "runs", "med R_n", "med Rbar_n", "med fw_gap",
              "mean r_n");
  for (const auto& g : groups) {
    std::vector<double> rate, avg, gap, thr;
    for (const auto& r : runs) {
      if (r.label != g) continue;
      rate.push_back(final_or_nan(r.trace, &TraceRecord::rate));
      avg.push_back(final_or_nan(r.trace, &TraceRecord::average_rate));
      gap.push_back(final_or_nan(r.trace, &TraceRecord::fw_gap));
      thr.push_back(final_or_nan(r.trace, &TraceRecord::throughput));
    }
    std::printf("%-24s %6zu %12.6g %12.6g %12.6g %12.6g\n", g.c_str(), rate.size(), summarize(rate).median,
                summarize(avg).median, summarize(gap).median, summarize(thr).mean);
  }
}

void save_runs(const std::vector<Outcome>& runs, const fs::path& dir, bool traces) {
  fs::create_directories(dir);
  if (!traces) return;
  for (const auto& r : runs) {
    std::string stem = run_stem(r.scenario);
    if (!r.label.empty() && r.label != to_string(r.scenario.algorithm)) stem += "-" + r.label;
    for (char& c : stem)
      if (c == '=' || c == '/' || c == ' ') c = '_';
    export_trace(r.trace, (dir / (stem + ".csv")).string());
  }
}

void print_run(const Trace& t) {
  if (t.records.empty()) {
    std::printf("no iterations\n");
    return;
  }
  const auto& r = t.records.back();
  std::printf("n = %ld  R_n = %.6f  Rbar_n = %.6f  r_n = %.4f  fw_gap = %.3e  R_max = %.6f  R_0 = %.6f\n", r.n,
              r.rate, r.average_rate, r.throughput, r.fw_gap, t.rate_max, t.rate_uniform);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix exponential learning on the Gaussian vector multiple access channel"};
  app.require_subcommand(1);

  std::vector<std::string> sets;
  std::string scenario_path, out, json_out, seeds_text = "10", grid_key, grid_values, algorithms = "mxl,iwf,swf";
  std::vector<std::string> trace_paths;
  int jobs = 1;
  bool no_traces = false, plots = true;

  auto* run = app.add_subcommand("run", "Run one scenario and write its trace");
  run->add_option("scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", out, "Trace CSV (default: <name>-<algorithm>-s<seed>.csv)");
  run->add_option("--json", json_out, "Also write a JSON summary");
  run->add_option("--set", sets, "Override a scenario key (key=value), repeatable");

  auto* sweep = app.add_subcommand("sweep", "Run a scenario over seeds and an optional parameter grid");
  sweep->add_option("scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--output", out, "Output directory")->required();
  sweep->add_option("--seeds", seeds_text, "Seed count N (1..N), range a..b, or list a,b,c")->capture_default_str();
  sweep->add_option("--param", grid_key, "Scenario key to vary");
  sweep->add_option("--values", grid_values, "Comma-separated values for --param");
  sweep->add_option("--set", sets, "Override a scenario key (key=value), repeatable");
  sweep->add_option("-j,--jobs", jobs, "Parallel runs")->capture_default_str();
  sweep->add_flag("--no-traces", no_traces, "Only write the summary table");

  auto* compare = app.add_subcommand("compare", "Run several algorithms on identical channels and noise");
  compare->add_option("scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  compare->add_option("-o,--output", out, "Output directory")->required();
  compare->add_option("--algorithms", algorithms, "Comma-separated algorithms")->capture_default_str();
  compare->add_option("--seeds", seeds_text, "Seed count N (1..N), range a..b, or list a,b,c")->capture_default_str();
  compare->add_option("--set", sets, "Override a scenario key (key=value), repeatable");
  compare->add_option("-j,--jobs", jobs, "Parallel runs")->capture_default_str();
  compare->add_flag("!--no-plots", plots, "Skip SVG output");

  auto* report = app.add_subcommand("report", "Plot traces as SVG and write JSON summaries");
  report->add_option("traces", trace_paths, "Trace CSV files")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--output", out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      Scenario s = load_scenario(scenario_path);
      apply_overrides(s, sets);
      const Trace t = run_scenario(s);
      const std::string path = out.empty() ? run_stem(s) + ".csv" : out;
      ensure_parent(path);
      export_trace(t, path);
      if (!json_out.empty()) write_text(json_out, summary_json(t).dump(2) + "\n");
      print_run(t);
      std::printf("trace: %s\n", path.c_str());
      return 0;
    }

    if (*sweep) {
      Scenario base = load_scenario(scenario_path);
      apply_overrides(base, sets);
      std::vector<std::string> values{""};
      if (!grid_key.empty()) {
        if (grid_values.empty()) throw ScenarioError("values", "required with --param");
        values = detail::split(grid_values, ',');
      }
      std::vector<Outcome> work;
      for (const auto& v : values) {
        for (auto seed : parse_seeds(seeds_text)) {
          Scenario s = base;
          if (!grid_key.empty()) set_field(s, grid_key, detail::trim(v));
          s.seed = seed;
          validate(s);
          work.push_back({s, grid_key.empty() ? "" : grid_key + "=" + detail::trim(v), {}});
        }
      }
      const auto runs = run_all(std::move(work), jobs);
      save_runs(runs, out, !no_traces);
      write_text(fs::path(out) / "summary.csv", summary_table(runs, grid_key.empty() ? "group" : grid_key));
      print_stats(runs);
      std::printf("summary: %s\n", (fs::path(out) / "summary.csv").string().c_str());
      return 0;
    }

    if (*compare) {
      Scenario base = load_scenario(scenario_path);
      apply_overrides(base, sets);
      std::vector<Outcome> work;
      const auto seeds = parse_seeds(seeds_text);
      for (const auto& name : detail::split(algorithms, ',')) {
        for (auto seed : seeds) {
          Scenario s = base;
          s.algorithm = parse_algorithm(detail::trim(name));
          if (s.algorithm != Algorithm::mxl_async) {
            s.kernel = UpdateKernel::all_users;
            s.max_delay = 0;
          }
          s.seed = seed;
          validate(s);
          work.push_back({s, to_string(s.algorithm), {}});
        }
      }
      const auto runs = run_all(std::move(work), jobs);
      save_runs(runs, out, true);
      write_text(fs::path(out) / "summary.csv", summary_table(runs, "algorithm"));
      print_stats(runs);
      if (plots) {
        std::vector<Trace> first;
        for (const auto& r : runs)
          if (r.scenario.seed == seeds.front()) first.push_back(r.trace);
        for (const auto& p : emit_plots(first, out)) std::printf("plot: %s\n", p.c_str());
      }
      return 0;
    }

    if (*report) {
      std::vector<Trace> traces;
      fs::create_directories(out);
      for (const auto& p : trace_paths) {
        traces.push_back(load_trace(p));
        const auto json = fs::path(out) / (fs::path(p).stem().string() + ".json");
        write_text(json, summary_json(traces.back()).dump(2) + "\n");
        std::printf("summary: %s\n", json.string().c_str());
      }
      for (const auto& p : emit_plots(traces, out)) std::printf("plot: %s\n", p.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
