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

#ifndef NBVX_BENCHMARK_H_
#define NBVX_BENCHMARK_H_

#include <functional>
#include <string>
#include <vector>

#include "nbvx/explorer.h"
#include "nbvx/scenario.h"

namespace nbvx {

struct Quantiles {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;

  double iqr() const { return q3 - q1; }
};

/// Linear-interpolation quantiles of a non-empty sample.
Quantiles computeQuantiles(std::vector<double> values);

struct ModeAggregate {
  std::string scenario;
  PlannerMode mode = PlannerMode::kAugmented;
  int runs = 0;
  int successes = 0;
  Quantiles exploration_time;
  Quantiles path_length;
  Quantiles final_coverage;
  /// Per-run maximum planning time (wall clock).
  Quantiles max_computation_time;
};

struct BenchmarkReport {
  std::vector<RunMetrics> runs;
  std::vector<ModeAggregate> aggregates;
};

std::vector<ModeAggregate> aggregate(const std::vector<RunMetrics>& runs);

/// Run i of each scenario uses start i mod #starts and seed base_seed + i for
/// every mode. Failed runs are recorded, never fatal.
BenchmarkReport runBenchmark(
    const std::vector<Scenario>& scenarios, const std::vector<PlannerMode>& modes, int n_runs,
    std::uint64_t base_seed, const ExplorerConfig& cfg,
    const std::function<void(const RunMetrics&)>& on_run = nullptr);

/// Explores one scenario start; writes run artifacts when artifact_dir is set.
RunMetrics runSingle(const Scenario& scenario, int start_index, PlannerMode mode,
                     std::uint64_t seed, const ExplorerConfig& cfg,
                     const std::string& artifact_dir = "");

/// Deterministic JSON text (no wall-clock values).
std::string reportJson(const BenchmarkReport& report);
/// Wall-clock planning times per run.
std::string timingJson(const BenchmarkReport& report);
std::string runMetricsJson(const RunMetrics& m);

/// Writes coverage curves and summary tables as CSV under out_dir (created if
/// needed). Returns the written paths.
std::vector<std::string> exportPlots(const BenchmarkReport& report, const std::string& out_dir);

/// Writes the artifacts of a finished explorer. Returns the written paths.
std::vector<std::string> writeRunArtifacts(const Explorer& explorer, const std::string& dir);

void writeTextFile(const std::string& path, const std::string& text);

}  // namespace nbvx

#endif  // NBVX_BENCHMARK_H_
