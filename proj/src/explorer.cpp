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

#include "nbvx/explorer.h"

#include <algorithm>
#include <chrono>
#include <limits>

namespace nbvx {

std::string plannerModeName(PlannerMode mode) {
  switch (mode) {
    case PlannerMode::kAugmented: return "augmented";
    case PlannerMode::kAugmentedNoHistory: return "augmented-nohistory";
    case PlannerMode::kBaseline: return "baseline";
  }
  return "augmented";
}

PlannerMode parsePlannerMode(const std::string& name) {
  if (name == "augmented") return PlannerMode::kAugmented;
  if (name == "augmented-nohistory") return PlannerMode::kAugmentedNoHistory;
  if (name == "baseline") return PlannerMode::kBaseline;
  throw Error(ErrorKind::kInvalidArgument, "unknown planner mode '" + name + "'");
}

void ExplorerConfig::validate() const {
  sensor.validate();
  gain.validate();
  rrt.validate();
  history.validate();
  limits.validate();
  if (!(esdf_max > 0.0)) throw Error(ErrorKind::kInvalidArgument, "esdf_max must be positive");
  if (max_stall_steps < 1) {
    throw Error(ErrorKind::kInvalidArgument, "max_stall_steps must be >= 1");
  }
  if (full_space_g_zero < 1) {
    throw Error(ErrorKind::kInvalidArgument, "full_space_g_zero must be >= 1");
  }
  if (full_space_budget_factor < 1) {
    throw Error(ErrorKind::kInvalidArgument, "full_space_budget_factor must be >= 1");
  }
  if (!(baseline_lambda >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "baseline_lambda must be >= 0");
  }
  if (!(sense_interval > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "sense_interval must be positive");
  }
  if (!(coverage_stop > 0.0 && coverage_stop <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "coverage_stop must be in (0, 1]");
  }
  if (smoothing.check_dt > 0.05 || smoothing.check_dt <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "check_dt must be in (0, 0.05]");
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

Explorer::Explorer(const VoxelMap& truth, const Pose& start, const ExplorerConfig& cfg,
                   std::uint64_t seed)
    : truth_(truth),
      cfg_(cfg),
      rng_(seed),
      map_(truth.geometry(), VoxelState::kUnknown),
      graph_(cfg.history),
      pose_(start) {
  cfg_.validate();
  if (truth.stateAt(start.position) != VoxelState::kFree) {
    throw Error(ErrorKind::kStartInCollision, "start pose is not in free space");
  }
  reachable_ = reachableFree(truth, truth.geometry().indexOf(start.position));
  for (std::uint8_t m : reachable_) reachable_count_ += m;
  esdf_ = computeEsdf(map_, cfg_.esdf_max);
}

double Explorer::coverage() const {
  return reachable_count_ ? static_cast<double>(known_reachable_) / reachable_count_ : 1.0;
}

void Explorer::senseAt(const Pose& p) {
  std::vector<std::size_t> freed;
  const IntegrationCounts c = integrateScan(map_, simulateScan(truth_, p, cfg_.sensor), &freed);
  newly_known_ += c.newly_freed + c.newly_occupied;
  for (std::size_t lin : freed) known_reachable_ += reachable_[lin];
}

void Explorer::initialize() {
  const GridGeometry& g = map_.geometry();
  const Vec3& c = pose_.position;
  const int reach = static_cast<int>(std::ceil(cfg_.start_bubble / g.resolution)) + 1;
  const Index3 ci = g.indexOf(c);
  for (int z = ci.z() - reach; z <= ci.z() + reach; ++z) {
    for (int y = ci.y() - reach; y <= ci.y() + reach; ++y) {
      for (int x = ci.x() - reach; x <= ci.x() + reach; ++x) {
        const Index3 idx(x, y, z);
        if (!g.inBounds(idx) || (g.center(idx) - c).norm() > cfg_.start_bubble) continue;
        const std::size_t lin = g.linear(idx);
        if (map_.state(lin) != VoxelState::kUnknown) continue;
        map_.set(lin, truth_.state(lin));
        if (truth_.state(lin) == VoxelState::kFree) known_reachable_ += reachable_[lin];
      }
    }
  }
  senseAt(pose_);
  esdf_ = computeEsdf(map_, cfg_.esdf_max);
  if (cfg_.mode != PlannerMode::kBaseline) {
    graph_.recordPose(pose_.position, Clearance(esdf_, cfg_.rrt.robot_radius));
  }

  // Full turn in place.
  PolySegment s;
  s.duration = kTwoPi / cfg_.limits.yaw_rate_max;
  s.coeffs = Eigen::MatrixXd::Zero(3, 10);
  s.coeffs.col(0) = pose_.position;
  StepOutcome spin;
  spin.kind = StepOutcome::Kind::kExecuted;
  spin.trajectory = Trajectory({s}, {0.0, s.duration}, {pose_.yaw, pose_.yaw + kTwoPi});
  spin.nbv = pose_;
  execute(spin);
}

void Explorer::refreshMaps(int maintain_budget) {
  esdf_ = computeEsdf(map_, cfg_.esdf_max);
  if (cfg_.mode != PlannerMode::kBaseline) {
    graph_.maintainStep(map_, esdf_, Clearance(esdf_, cfg_.rrt.robot_radius), maintain_budget);
  }
}

void Explorer::execute(const StepOutcome& outcome) {
  const Trajectory& traj = outcome.trajectory;
  const double total = traj.duration();
  const Clearance clearance(esdf_, cfg_.rrt.robot_radius);
  const bool record = cfg_.mode != PlannerMode::kBaseline;
  const double dt = cfg_.smoothing.check_dt;
  const int per_sense = std::max(1, static_cast<int>(std::lround(cfg_.sense_interval / dt)));
  const int n = static_cast<int>(std::ceil(total / dt - 1e-9));
  Vec3 prev = traj.position(0.0);
  for (int k = 1; k <= n; ++k) {
    const double t = std::min(k * dt, total);
    const Vec3 p = traj.position(t);
    path_length_ += (p - prev).norm();
    prev = p;
    if (k % per_sense == 0 || k == n) {
      senseAt(Pose{p, traj.yaw(t)});
      if (record) graph_.recordPose(p, clearance);
    }
  }
  sim_time_ += total;
  pose_ = Pose{traj.position(total), traj.yaw(total)};
  executed_.push_back(traj);
  curve_.push_back({sim_time_, coverage()});
}

StepOutcome Explorer::plan() {
  return cfg_.mode == PlannerMode::kBaseline ? planBaseline() : planAugmented();
}

StepOutcome Explorer::planAugmented() {
  const auto t0 = Clock::now();
  const Clearance clearance(esdf_, cfg_.rrt.robot_radius);
  const int budget = cfg_.rrt.sample_budget;
  const double rho = cfg_.rrt.vicinity_radius;
  StepOutcome out;
  out.tier = 1;
  out.seed = pose_.position;

  PlanResult res = growUntilGain(pose_.position, SamplingBounds::vicinity(pose_.position, rho),
                                 map_, clearance, cfg_.sensor, cfg_.gain, cfg_.rrt, budget, rng_,
                                 pose_.yaw);
  out.samples_used += res.samples_used;
  std::vector<Vec3> prefix;
  if (!res.found && cfg_.mode == PlannerMode::kAugmented) {
    if (const auto node = graph_.nearestPotentialNode(pose_.position, clearance)) {
      prefix = graph_.shortestPath(pose_.position, *node, clearance);
      out.reseeded = true;
      out.seed = graph_.node(*node).position;
      out.tier = 2;
      res = growUntilGain(out.seed, SamplingBounds::vicinity(out.seed, rho), map_, clearance,
                          cfg_.sensor, cfg_.gain, cfg_.rrt, budget, rng_);
      out.samples_used += res.samples_used;
    }
  }
  if (!res.found) {
    out.tier = 3;
    GainConfig full_gain = cfg_.gain;
    full_gain.g_zero = std::min(cfg_.gain.g_zero, cfg_.full_space_g_zero);
    const std::optional<double> seed_yaw =
        out.reseeded ? std::nullopt : std::optional<double>(pose_.yaw);
    res = growUntilGain(out.seed, SamplingBounds::fullFreeSpace(), map_, clearance, cfg_.sensor,
                        full_gain, cfg_.rrt, budget * cfg_.full_space_budget_factor, rng_,
                        seed_yaw);
    out.samples_used += res.samples_used;
  }
  if (!res.found) {
    graph_.maintainStep(map_, esdf_, clearance, graph_.capacity());
    out.computation_time = secondsSince(t0);
    if (!graph_.anyPotential()) {
      out.kind = StepOutcome::Kind::kFinished;
      return out;
    }
    throw Error(ErrorKind::kStuckNoPlan, "all tiers exhausted while exploration potential remains");
  }

  std::vector<Vec3> path = out.reseeded ? prefix : std::vector<Vec3>{};
  const std::size_t skip = out.reseeded ? 1 : 0;
  path.insert(path.end(), res.branch.begin() + skip, res.branch.end());
  out.path = path;
  out.gain = res.terminal_gain;
  out.nbv = Pose{res.branch.back(), res.terminal_yaw};
  SmoothedPath sp =
      smoothBranch(path, pose_.yaw, res.terminal_yaw, clearance, cfg_.limits, cfg_.smoothing);
  out.trajectory = std::move(sp.trajectory);
  out.fallback = sp.fallback;
  out.kind = StepOutcome::Kind::kExecuted;
  out.computation_time = secondsSince(t0);
  return out;
}

RunMetrics Explorer::run() {
  const auto t0 = Clock::now();
  RunMetrics m;
  m.mode = cfg_.mode;
  int stalls = 0;
  try {
    initialize();
    while (true) {
      if (coverage() >= cfg_.coverage_stop - 1e-12) {
        m.termination = "coverage";
        break;
      }
      if (m.iterations >= cfg_.max_iterations) {
        m.termination = "iteration-cap";
        break;
      }
      if (secondsSince(t0) > cfg_.wall_clock_cap) {
        m.termination = "wall-clock-cap";
        break;
      }
      refreshMaps(cfg_.maintain_budget);
      ++m.iterations;
      StepOutcome o;
      try {
        o = plan();
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kStuckNoPlan) throw;
        m.termination = "stuck";
        m.error = e.what();
        break;
      }
      m.computation_times.push_back(o.computation_time);
      m.samples_per_iteration.push_back(o.samples_used);
      if (o.kind == StepOutcome::Kind::kFinished) {
        m.termination = "finished";
        break;
      }
      if (o.kind == StepOutcome::Kind::kExhausted) {
        if (frontiersWithin(map_, pose_.position, std::numeric_limits<double>::infinity(), 1) == 0) {
          m.termination = "finished";
          break;
        }
        if (++baseline_exhausted_ >= cfg_.baseline_max_exhausted) {
          m.termination = "stuck";
          m.error = "baseline found no gain in consecutive attempts";
          break;
        }
        continue;
      }
      baseline_exhausted_ = 0;
      const std::size_t before = newly_known_;
      execute(o);
      ++m.nbv_count;
      m.fallback_count += o.fallback ? 1 : 0;
      ++m.tier_counts[std::clamp(o.tier, 1, 3) - 1];
      stalls = newly_known_ == before ? stalls + 1 : 0;
      if (stalls >= cfg_.max_stall_steps) {
        m.termination = "stuck";
        m.error = "no new space observed in consecutive steps";
        break;
      }
    }
  } catch (const Error& e) {
    m.termination = "error";
    m.error = e.what();
  }
  m.success = m.termination == "coverage" || m.termination == "finished";
  m.final_coverage = coverage();
  m.exploration_time = sim_time_;
  m.path_length = path_length_;
  m.coverage_curve = curve_;
  return m;
}

}  // namespace nbvx
