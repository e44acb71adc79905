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

#ifndef NBVX_EXPLORER_H_
#define NBVX_EXPLORER_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nbvx/history.h"
#include "nbvx/rrt.h"
#include "nbvx/trajectory.h"

namespace nbvx {

enum class PlannerMode { kAugmented, kAugmentedNoHistory, kBaseline };

std::string plannerModeName(PlannerMode mode);
/// Inverse of plannerModeName. Throws kInvalidArgument.
PlannerMode parsePlannerMode(const std::string& name);

struct ExplorerConfig {
  PlannerMode mode = PlannerMode::kAugmented;
  SensorModel sensor;
  GainConfig gain;
  RrtConfig rrt;
  HistoryConfig history;
  DynamicLimits limits;
  SmoothingConfig smoothing;
  double esdf_max = 2.5;
  /// Tier-3 sample budget as a multiple of rrt.sample_budget.
  int full_space_budget_factor = 5;
  /// Gain threshold of full-space sampling; gain.g_zero applies to the
  /// vicinity tiers.
  int full_space_g_zero = 20;
  double baseline_lambda = 0.5;
  /// Baseline keeps sampling past this count only while no gain is found.
  int baseline_min_samples = 30;
  int baseline_max_exhausted = 5;
  double sense_interval = 0.2;
  int maintain_budget = 50;
  /// Radius around the start copied from ground truth before the first scan.
  double start_bubble = 1.0;
  /// Stop once this fraction of reachable free space is known.
  double coverage_stop = 1.0;
  int max_iterations = 3000;
  /// Consecutive executed steps without any newly known voxel before the run
  /// is declared stuck.
  int max_stall_steps = 50;
  double wall_clock_cap = 900.0;

  void validate() const;
};

struct StepOutcome {
  enum class Kind { kExecuted, kExhausted, kFinished };
  Kind kind = Kind::kFinished;
  /// 1..3 for the augmented planner, 1 for the baseline.
  int tier = 0;
  bool reseeded = false;
  bool fallback = false;
  Vec3 seed = Vec3::Zero();
  Trajectory trajectory;
  Pose nbv;
  std::vector<Vec3> path;  // polyline the trajectory was smoothed from
  long gain = 0;
  int samples_used = 0;
  double computation_time = 0.0;
};

struct CoverageSample {
  double time = 0.0;
  double coverage = 0.0;
};

struct RunMetrics {
  std::string scenario;
  std::uint64_t seed = 0;
  PlannerMode mode = PlannerMode::kAugmented;
  int start_index = 0;
  bool success = false;
  std::string termination;  // finished, coverage, stuck, iteration-cap, wall-clock-cap, error
  std::string error;
  double final_coverage = 0.0;
  double exploration_time = 0.0;
  double path_length = 0.0;
  int iterations = 0;
  int nbv_count = 0;
  std::array<int, 3> tier_counts{0, 0, 0};
  int fallback_count = 0;
  std::vector<CoverageSample> coverage_curve;
  std::vector<int> samples_per_iteration;
  /// Wall-clock seconds; excluded from deterministic reports.
  std::vector<double> computation_times;
};

/// Closed-loop simulated exploration of one truth map.
class Explorer {
 public:
  Explorer(const VoxelMap& truth, const Pose& start, const ExplorerConfig& cfg,
           std::uint64_t seed);

  /// Bubble copy plus an in-place turn with continuous sensing.
  void initialize();

  /// Plans from the current state without moving. Throws kStuckNoPlan.
  StepOutcome plan();
  /// Flies the trajectory, sensing every sense_interval, and records history.
  void execute(const StepOutcome& outcome);

  RunMetrics run();

  const VoxelMap& map() const { return map_; }
  VoxelMap& mutableMap() { return map_; }
  const VoxelMap& truth() const { return truth_; }
  const EsdfField& esdf() const { return esdf_; }
  HistoryGraph& graph() { return graph_; }
  const HistoryGraph& graph() const { return graph_; }
  const Pose& pose() const { return pose_; }
  void setPose(const Pose& p) { pose_ = p; }
  const ExplorerConfig& config() const { return cfg_; }
  double simTime() const { return sim_time_; }
  double pathLength() const { return path_length_; }
  double coverage() const;
  const std::vector<Trajectory>& executed() const { return executed_; }

  /// Recomputes the ESDF and runs one history maintenance step.
  void refreshMaps(int maintain_budget);

 private:
  StepOutcome planAugmented();
  StepOutcome planBaseline();
  void senseAt(const Pose& p);
  Trajectory straightMove(const Vec3& a, const Vec3& b, double yaw_a, double yaw_b) const;

  const VoxelMap& truth_;
  ExplorerConfig cfg_;
  Rng rng_;
  VoxelMap map_;
  EsdfField esdf_;
  HistoryGraph graph_;
  Pose pose_;
  double sim_time_ = 0.0;
  double path_length_ = 0.0;
  std::vector<std::uint8_t> reachable_;
  std::size_t reachable_count_ = 0;
  std::size_t known_reachable_ = 0;
  std::size_t newly_known_ = 0;
  std::vector<Pose> baseline_branch_;
  int baseline_exhausted_ = 0;
  std::vector<Trajectory> executed_;
  std::vector<CoverageSample> curve_;
};

}  // namespace nbvx

#endif  // NBVX_EXPLORER_H_
