/*
 * Copyright 2026 The nbvx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: explore, benchmark, deadend-test, export-map.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nbvx/benchmark.h"

namespace {

using namespace nbvx;

constexpr int kExitOk = 0;
constexpr int kExitRunFailed = 1;
constexpr int kExitUsage = 2;

struct ConfigFlags {
  double hfov_deg = 115.0;
  double vfov_deg = 60.0;
  double range_m = 5.0;
  double ray_res_deg = 1.5;
  double delta_theta_deg = 5.0;
  int g_zero = 500;
  int full_space_g_zero = 20;
  double step_max_m = 1.5;
  double robot_radius_m = 0.5;
  int sample_budget = 400;
  double vicinity_radius_m = 4.0;
  double vmax = 1.2;
  double coverage_stop = 1.0;
  int max_iterations = 3000;
  double wall_clock_cap = 900.0;

  void addTo(CLI::App* app) {
    app->add_option("--hfov-deg", hfov_deg, "Horizontal field of view")->capture_default_str();
    app->add_option("--vfov-deg", vfov_deg, "Vertical field of view")->capture_default_str();
    app->add_option("--range-m", range_m, "Sensor range")->capture_default_str();
    app->add_option("--ray-res-deg", ray_res_deg, "Angular ray spacing")->capture_default_str();
    app->add_option("--delta-theta-deg", delta_theta_deg, "Yaw slice width")
        ->capture_default_str();
    app->add_option("--g-zero", g_zero, "Vicinity gain threshold")->capture_default_str();
    app->add_option("--full-space-g-zero", full_space_g_zero, "Full-space gain threshold")
        ->capture_default_str();
    app->add_option("--step-max-m", step_max_m, "RRT extension step")->capture_default_str();
    app->add_option("--robot-radius-m", robot_radius_m, "Collision radius")
        ->capture_default_str();
    app->add_option("--sample-budget", sample_budget, "Samples per tier")->capture_default_str();
    app->add_option("--vicinity-radius-m", vicinity_radius_m, "Vicinity sampling radius")
        ->capture_default_str();
    app->add_option("--vmax", vmax, "Velocity limit")->capture_default_str();
    app->add_option("--coverage-stop", coverage_stop, "Stop at this reachable coverage")
        ->capture_default_str();
    app->add_option("--max-iterations", max_iterations, "Planning iteration cap")
        ->capture_default_str();
    app->add_option("--wall-clock-cap", wall_clock_cap, "Per-run wall clock cap in seconds")
        ->capture_default_str();
  }

  ExplorerConfig toConfig() const {
    ExplorerConfig c;
    c.sensor.h_fov = degToRad(hfov_deg);
    c.sensor.v_fov = degToRad(vfov_deg);
    c.sensor.range = range_m;
    c.sensor.ray_res = degToRad(ray_res_deg);
    c.gain.delta_theta = degToRad(delta_theta_deg);
    c.gain.g_zero = g_zero;
    c.full_space_g_zero = full_space_g_zero;
    c.rrt.step_max = step_max_m;
    c.rrt.robot_radius = robot_radius_m;
    c.rrt.sample_budget = sample_budget;
    c.rrt.vicinity_radius = vicinity_radius_m;
    c.limits.v_max = vmax;
    c.coverage_stop = coverage_stop;
    c.max_iterations = max_iterations;
    c.wall_clock_cap = wall_clock_cap;
    c.validate();
    return c;
  }
};

std::vector<PlannerMode> parseModes(const std::string& list) {
  std::vector<PlannerMode> modes;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) modes.push_back(parsePlannerMode(item));
  }
  if (modes.empty()) throw Error(ErrorKind::kInvalidArgument, "empty mode list");
  return modes;
}

void printRun(const RunMetrics& m) {
  std::cout << m.scenario << " start=" << m.start_index << " seed=" << m.seed
            << " mode=" << plannerModeName(m.mode) << " termination=" << m.termination
            << " coverage=" << m.final_coverage << " time=" << m.exploration_time
            << " length=" << m.path_length << " iterations=" << m.iterations;
  if (!m.error.empty()) std::cout << " error=\"" << m.error << "\"";
  std::cout << std::endl;
}

int runExplore(const std::string& scenario_path, const std::string& mode, std::uint64_t seed,
               int start_index, const std::string& out, const ExplorerConfig& cfg) {
  const Scenario s = loadScenario(scenario_path, cfg.rrt.robot_radius);
  if (start_index < 0 || start_index >= static_cast<int>(s.starts.size())) {
    throw Error(ErrorKind::kInvalidArgument, "start index out of range");
  }
  const RunMetrics m = runSingle(s, start_index, parsePlannerMode(mode), seed, cfg, out);
  std::filesystem::create_directories(out);
  writeTextFile(out + "/metrics.json", runMetricsJson(m));
  printRun(m);
  return m.success ? kExitOk : kExitRunFailed;
}

int runBench(const std::vector<std::string>& scenario_paths, const std::string& modes, int runs,
             std::uint64_t base_seed, const std::string& out, const ExplorerConfig& cfg) {
  std::vector<Scenario> scenarios;
  for (const auto& p : scenario_paths) scenarios.push_back(loadScenario(p, cfg.rrt.robot_radius));
  const BenchmarkReport report =
      runBenchmark(scenarios, parseModes(modes), runs, base_seed, cfg, printRun);
  std::filesystem::create_directories(out);
  writeTextFile(out + "/report.json", reportJson(report));
  writeTextFile(out + "/timing.json", timingJson(report));
  exportPlots(report, out + "/plots");
  for (const auto& a : report.aggregates) {
    std::cout << a.scenario << " " << plannerModeName(a.mode) << ": " << a.successes << "/"
              << a.runs << " succeeded, median time " << a.exploration_time.median
              << " s (IQR " << a.exploration_time.iqr() << "), median length "
              << a.path_length.median << " m" << std::endl;
  }
  for (const auto& r : report.runs) {
    if (!r.success) return kExitRunFailed;
  }
  return kExitOk;
}

int runDeadend(double length, double width, const std::string& modes, std::uint64_t seed,
               const std::string& out, const ExplorerConfig& cfg) {
  const Scenario s = generateDeadend(length, width);
  std::filesystem::create_directories(out);
  std::ofstream summary(out + "/deadend.csv");
  summary << "planner_mode,termination,final_coverage,exploration_time_s,iterations,"
             "max_samples,max_computation_time_s\n";
  bool ok = true;
  for (PlannerMode mode : parseModes(modes)) {
    const std::string dir = out + "/" + plannerModeName(mode);
    const RunMetrics m = runSingle(s, 0, mode, seed, cfg, dir);
    writeTextFile(dir + "/metrics.json", runMetricsJson(m));
    int max_samples = 0;
    for (int v : m.samples_per_iteration) max_samples = std::max(max_samples, v);
    double max_time = 0.0;
    for (double v : m.computation_times) max_time = std::max(max_time, v);
    summary << plannerModeName(mode) << ',' << m.termination << ',' << m.final_coverage << ','
            << m.exploration_time << ',' << m.iterations << ',' << max_samples << ','
            << max_time << '\n';
    printRun(m);
    ok = ok && m.success;
  }
  return ok ? kExitOk : kExitRunFailed;
}

int runExportMap(const std::string& run_dir) {
  const VoxelMap map = readMapRle(run_dir + "/map.rle");
  writeMapCsv(map, run_dir + "/map.csv");
  std::cout << run_dir << "/map.csv" << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Next-best-view exploration planner"};
  app.require_subcommand(1);
  ConfigFlags flags;

  std::string scenario, mode = "augmented", out = "out";
  std::uint64_t seed = 0;
  int start_index = 0;
  CLI::App* explore = app.add_subcommand("explore", "Run one exploration");
  explore->add_option("--scenario", scenario, "Scenario file")->required();
  explore->add_option("--mode", mode, "augmented, augmented-nohistory or baseline")
      ->capture_default_str();
  explore->add_option("--seed", seed, "Random seed")->capture_default_str();
  explore->add_option("--start", start_index, "Start pose index")->capture_default_str();
  explore->add_option("--out", out, "Output directory")->capture_default_str();
  flags.addTo(explore);

  std::vector<std::string> scenarios;
  std::string modes = "augmented,baseline";
  int runs = 10;
  std::uint64_t base_seed = 0;
  CLI::App* bench = app.add_subcommand("benchmark", "Seeded multi-run comparison");
  bench->add_option("--scenario", scenarios, "Scenario files")->required();
  bench->add_option("--modes", modes, "Comma-separated planner modes")->capture_default_str();
  bench->add_option("--runs", runs, "Runs per scenario and mode")->capture_default_str();
  bench->add_option("--base-seed", base_seed, "Seed of run 0")->capture_default_str();
  bench->add_option("--out", out, "Output directory")->capture_default_str();
  flags.addTo(bench);

  double length = 48.0, width = 3.0;
  std::string deadend_modes = "augmented,augmented-nohistory";
  CLI::App* deadend = app.add_subcommand("deadend-test", "Dead-end escape comparison");
  deadend->add_option("--length", length, "Corridor length")->capture_default_str();
  deadend->add_option("--width", width, "Corridor width")->capture_default_str();
  deadend->add_option("--modes", deadend_modes, "Comma-separated planner modes")
      ->capture_default_str();
  deadend->add_option("--seed", seed, "Random seed")->capture_default_str();
  deadend->add_option("--out", out, "Output directory")->capture_default_str();
  flags.addTo(deadend);

  std::string run_dir;
  CLI::App* export_map = app.add_subcommand("export-map", "Re-export a run's map as CSV");
  export_map->add_option("--run", run_dir, "Run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*explore) return runExplore(scenario, mode, seed, start_index, out, flags.toConfig());
    if (*bench) return runBench(scenarios, modes, runs, base_seed, out, flags.toConfig());
    if (*deadend) return runDeadend(length, width, deadend_modes, seed, out, flags.toConfig());
    if (*export_map) return runExportMap(run_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    switch (e.kind()) {
      case ErrorKind::kParseError:
      case ErrorKind::kInvalidArgument:
      case ErrorKind::kStartInCollision:
      case ErrorKind::kIo:
        return kExitUsage;
      default:
        return kExitRunFailed;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitRunFailed;
  }
  return kExitUsage;
}
