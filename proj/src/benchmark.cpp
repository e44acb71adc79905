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

#include "nbvx/benchmark.h"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace nbvx {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

Quantiles computeQuantiles(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "quantiles of an empty sample");
  std::sort(values.begin(), values.end());
  const auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return Quantiles{values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

std::vector<ModeAggregate> aggregate(const std::vector<RunMetrics>& runs) {
  std::vector<ModeAggregate> out;
  std::vector<std::pair<std::string, PlannerMode>> keys;
  for (const auto& r : runs) {
    const auto key = std::make_pair(r.scenario, r.mode);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& [scenario, mode] : keys) {
    ModeAggregate a;
    a.scenario = scenario;
    a.mode = mode;
    std::vector<double> time, length, cov, comp;
    for (const auto& r : runs) {
      if (r.scenario != scenario || r.mode != mode) continue;
      ++a.runs;
      a.successes += r.success ? 1 : 0;
      time.push_back(r.exploration_time);
      length.push_back(r.path_length);
      cov.push_back(r.final_coverage);
      comp.push_back(r.computation_times.empty()
                         ? 0.0
                         : *std::max_element(r.computation_times.begin(),
                                             r.computation_times.end()));
    }
    a.exploration_time = computeQuantiles(time);
    a.path_length = computeQuantiles(length);
    a.final_coverage = computeQuantiles(cov);
    a.max_computation_time = computeQuantiles(comp);
    out.push_back(a);
  }
  return out;
}

namespace {

void writeTrajectoryCsv(const std::vector<Trajectory>& parts, const std::string& path,
                        double dt) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << "t,x,y,z,yaw,vx,vy,vz\n";
  double offset = 0.0;
  for (const auto& traj : parts) {
    const int n = static_cast<int>(std::ceil(traj.duration() / dt - 1e-9));
    for (int k = 0; k <= n; ++k) {
      const double t = std::min(k * dt, traj.duration());
      const Vec3 p = traj.position(t);
      const Vec3 v = traj.velocity(t);
      out << offset + t << ',' << p.x() << ',' << p.y() << ',' << p.z() << ',' << traj.yaw(t)
          << ',' << v.x() << ',' << v.y() << ',' << v.z() << '\n';
    }
    offset += traj.duration();
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

}  // namespace

void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

std::vector<std::string> writeRunArtifacts(const Explorer& explorer, const std::string& dir) {
  fs::create_directories(dir);
  const std::string map_rle = dir + "/map.rle";
  const std::string map_csv = dir + "/map.csv";
  const std::string nodes = dir + "/graph_nodes.csv";
  const std::string edges = dir + "/graph_edges.csv";
  const std::string traj = dir + "/trajectory.csv";
  writeMapRle(explorer.map(), map_rle);
  writeMapCsv(explorer.map(), map_csv);
  explorer.graph().writeCsv(nodes, edges);
  writeTrajectoryCsv(explorer.executed(), traj, 0.1);
  return {map_rle, map_csv, nodes, edges, traj};
}

RunMetrics runSingle(const Scenario& scenario, int start_index, PlannerMode mode,
                     std::uint64_t seed, const ExplorerConfig& cfg,
                     const std::string& artifact_dir) {
  ExplorerConfig c = cfg;
  c.mode = mode;
  const Pose& start = scenario.starts.at(static_cast<std::size_t>(start_index));
  RunMetrics m;
  try {
    Explorer explorer(scenario.truth, start, c, seed);
    m = explorer.run();
    if (!artifact_dir.empty()) writeRunArtifacts(explorer, artifact_dir);
  } catch (const Error& e) {
    m.termination = "error";
    m.error = e.what();
    m.success = false;
  }
  m.scenario = scenario.name;
  m.seed = seed;
  m.mode = mode;
  m.start_index = start_index;
  return m;
}

BenchmarkReport runBenchmark(const std::vector<Scenario>& scenarios,
                             const std::vector<PlannerMode>& modes, int n_runs,
                             std::uint64_t base_seed, const ExplorerConfig& cfg,
                             const std::function<void(const RunMetrics&)>& on_run) {
  if (n_runs < 1) throw Error(ErrorKind::kInvalidArgument, "n_runs must be >= 1");
  BenchmarkReport report;
  for (const Scenario& s : scenarios) {
    for (int i = 0; i < n_runs; ++i) {
      const int start = i % static_cast<int>(s.starts.size());
      for (PlannerMode mode : modes) {
        RunMetrics m = runSingle(s, start, mode, base_seed + static_cast<std::uint64_t>(i), cfg);
        if (on_run) on_run(m);
        report.runs.push_back(std::move(m));
      }
    }
  }
  report.aggregates = aggregate(report.runs);
  return report;
}

namespace {

ordered_json quantilesJson(const Quantiles& q) {
  return ordered_json{{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3},
                      {"max", q.max}};
}

ordered_json metricsObject(const RunMetrics& m) {
  ordered_json curve = ordered_json::array();
  for (const auto& c : m.coverage_curve) curve.push_back({c.time, c.coverage});
  return ordered_json{
      {"scenario", m.scenario},
      {"start_index", m.start_index},
      {"seed", m.seed},
      {"planner_mode", plannerModeName(m.mode)},
      {"success", m.success},
      {"termination", m.termination},
      {"error", m.error},
      {"final_coverage", m.final_coverage},
      {"exploration_time_s", m.exploration_time},
      {"path_length_m", m.path_length},
      {"iterations", m.iterations},
      {"nbv_count", m.nbv_count},
      {"tier_counts", m.tier_counts},
      {"fallback_count", m.fallback_count},
      {"samples_per_iteration", m.samples_per_iteration},
      {"coverage_curve", curve},
  };
}

}  // namespace

std::string runMetricsJson(const RunMetrics& m) { return metricsObject(m).dump(2) + "\n"; }

std::string reportJson(const BenchmarkReport& report) {
  ordered_json runs = ordered_json::array();
  for (const auto& r : report.runs) runs.push_back(metricsObject(r));
  ordered_json aggs = ordered_json::array();
  for (const auto& a : report.aggregates) {
    aggs.push_back({{"scenario", a.scenario},
                    {"planner_mode", plannerModeName(a.mode)},
                    {"runs", a.runs},
                    {"successes", a.successes},
                    {"exploration_time_s", quantilesJson(a.exploration_time)},
                    {"path_length_m", quantilesJson(a.path_length)},
                    {"final_coverage", quantilesJson(a.final_coverage)}});
  }
  return ordered_json{{"runs", runs}, {"aggregates", aggs}}.dump(2) + "\n";
}

std::string timingJson(const BenchmarkReport& report) {
  ordered_json runs = ordered_json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"scenario", r.scenario},
                    {"seed", r.seed},
                    {"planner_mode", plannerModeName(r.mode)},
                    {"computation_times_s", r.computation_times}});
  }
  ordered_json aggs = ordered_json::array();
  for (const auto& a : report.aggregates) {
    aggs.push_back({{"scenario", a.scenario},
                    {"planner_mode", plannerModeName(a.mode)},
                    {"max_computation_time_s", quantilesJson(a.max_computation_time)}});
  }
  return ordered_json{{"runs", runs}, {"aggregates", aggs}}.dump(2) + "\n";
}

std::vector<std::string> exportPlots(const BenchmarkReport& report, const std::string& out_dir) {
  if (report.runs.empty()) throw Error(ErrorKind::kInvalidArgument, "empty report");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir + ": " + ec.message());
  std::vector<std::string> written;
  const auto open = [&](const std::string& name) {
    const std::string path = out_dir + "/" + name;
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
    written.push_back(path);
    return out;
  };

  {
    std::ofstream out = open("coverage.csv");
    out << "scenario,planner_mode,seed,time_s,coverage\n";
    for (const auto& r : report.runs) {
      for (const auto& c : r.coverage_curve) {
        out << r.scenario << ',' << plannerModeName(r.mode) << ',' << r.seed << ',' << c.time
            << ',' << c.coverage << '\n';
      }
    }
  }
  {
    std::ofstream out = open("quantiles.csv");
    out << "scenario,planner_mode,metric,min,q1,median,q3,max\n";
    for (const auto& a : report.aggregates) {
      const auto row = [&](const char* metric, const Quantiles& q) {
        out << a.scenario << ',' << plannerModeName(a.mode) << ',' << metric << ',' << q.min
            << ',' << q.q1 << ',' << q.median << ',' << q.q3 << ',' << q.max << '\n';
      };
      row("exploration_time_s", a.exploration_time);
      row("path_length_m", a.path_length);
      row("final_coverage", a.final_coverage);
      row("max_computation_time_s", a.max_computation_time);
    }
  }
  {
    std::ofstream out = open("computation_times.csv");
    out << "scenario,planner_mode,seed,iteration,seconds,samples\n";
    for (const auto& r : report.runs) {
      for (std::size_t i = 0; i < r.computation_times.size(); ++i) {
        const int samples =
            i < r.samples_per_iteration.size() ? r.samples_per_iteration[i] : 0;
        out << r.scenario << ',' << plannerModeName(r.mode) << ',' << r.seed << ',' << i << ','
            << r.computation_times[i] << ',' << samples << '\n';
      }
    }
  }
  return written;
}

}  // namespace nbvx
