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

#ifndef NBVX_TRAJECTORY_H_
#define NBVX_TRAJECTORY_H_

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nbvx/esdf.h"

namespace nbvx {

struct DynamicLimits {
  double v_max = 1.2;
  double a_max = 2.0;
  double yaw_rate_max = 1.0;

  void validate() const;
};

/// One polynomial piece in normalized time tau = t / duration. Row a holds
/// the coefficients of axis a in increasing power.
struct PolySegment {
  double duration = 0.0;
  Eigen::MatrixXd coeffs;
};

class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<PolySegment> segments, std::vector<double> yaw_times,
             std::vector<double> yaw_values);

  const std::vector<PolySegment>& segments() const { return segments_; }
  int numSegments() const { return static_cast<int>(segments_.size()); }
  double duration() const { return total_; }
  /// Start time of segment i.
  double segmentStart(int i) const { return starts_[i]; }
  int segmentAt(double t) const;

  /// n-th time derivative of position.
  Vec3 derivative(double t, int n) const;
  Vec3 position(double t) const { return derivative(t, 0); }
  Vec3 velocity(double t) const { return derivative(t, 1); }
  Vec3 acceleration(double t) const { return derivative(t, 2); }
  /// Piecewise-linear yaw, wrapped to [-pi, pi).
  double yaw(double t) const;
  double yawRate(double t) const;
  const std::vector<double>& yawTimes() const { return yaw_times_; }
  const std::vector<double>& yawValues() const { return yaw_values_; }

  /// n-th time derivative of segment i at normalized time tau.
  Vec3 segmentDerivative(int i, double tau, int n) const;
  /// Integrated squared snap summed over segments and axes.
  double snapCost() const;

  void writeCsv(const std::string& path, double dt) const;

 private:
  std::vector<PolySegment> segments_;
  std::vector<double> starts_;
  double total_ = 0.0;
  std::vector<double> yaw_times_;
  std::vector<double> yaw_values_;
};

/// Greedy shortcutting: keeps the farthest later waypoint visible through a
/// clearance-valid segment.
std::vector<Vec3> simplify(const std::vector<Vec3>& waypoints, const Clearance& clearance);

/// Inserts evenly spaced collinear knots so no segment exceeds `spacing`.
std::vector<Vec3> densify(const std::vector<Vec3>& waypoints, double spacing);

/// Rest-to-rest trapezoidal profile over the whole path, split at waypoints.
std::vector<double> allocateTimes(const std::vector<Vec3>& waypoints, const DynamicLimits& limits);

/// Duration of a rest-to-rest trapezoidal profile over length L.
double trapezoidDuration(double length, double v_max, double a_max);

/// Per-axis minimum-snap piecewise polynomial through all waypoints, zero
/// velocity and acceleration at both ends, continuous through jerk at joints.
/// When `yaws` has one entry per waypoint, segment durations are stretched so
/// the linear yaw profile respects yaw_rate_max. Throws kSingularSystem.
Trajectory fitPolynomial(const std::vector<Vec3>& waypoints, std::vector<double> durations,
                         int order = 9, const std::vector<double>& yaws = {},
                         double yaw_rate_max = std::numeric_limits<double>::infinity());

struct FeasibilityReport {
  bool feasible = true;
  double max_speed = 0.0;
  double max_accel = 0.0;
  double min_clearance = std::numeric_limits<double>::infinity();
  bool speed_violation = false;
  bool accel_violation = false;
  bool clearance_violation = false;
  /// First clearance-violating sample.
  double violation_time = -1.0;
  int violation_segment = -1;
};

FeasibilityReport checkTrajectory(const Trajectory& traj, const Clearance& clearance,
                                  const DynamicLimits& limits, double dt = 0.05);

struct SmoothingConfig {
  int order = 9;
  double knot_spacing = 1.0;
  int max_iterations = 10;
  double check_dt = 0.05;
};

struct RepairResult {
  Trajectory trajectory;
  int iterations = 0;
  int inserted = 0;
  std::vector<Vec3> knots;
};

/// Fit and check loop: clearance violations insert the midpoint of the
/// offending knot segment, dynamic violations stretch all durations. Throws
/// kRepairFailed after the iteration cap.
RepairResult repair(const std::vector<Vec3>& waypoints, const std::vector<double>& yaws,
                    const Clearance& clearance, const DynamicLimits& limits,
                    const SmoothingConfig& cfg);

/// Yaw per waypoint ramping from yaw_start to yaw_end along path length,
/// unwrapped to the shortest rotation.
std::vector<double> rampYaw(const std::vector<Vec3>& waypoints, double yaw_start, double yaw_end);

/// Each segment driven rest-to-rest on its own, stretched until feasible.
Trajectory stopAndGo(const std::vector<Vec3>& waypoints, const std::vector<double>& yaws,
                     const Clearance& clearance, const DynamicLimits& limits,
                     const SmoothingConfig& cfg);

/// Repairs the simplified and densified polyline; falls back to stop-and-go
/// along the simplified polyline when repair fails.
struct SmoothedPath {
  Trajectory trajectory;
  std::vector<Vec3> simplified;
  bool fallback = false;
  int repair_iterations = 0;
};
SmoothedPath smoothBranch(const std::vector<Vec3>& branch, double yaw_start, double yaw_end,
                          const Clearance& clearance, const DynamicLimits& limits,
                          const SmoothingConfig& cfg);

double pathLength(const std::vector<Vec3>& waypoints);

}  // namespace nbvx

#endif  // NBVX_TRAJECTORY_H_
