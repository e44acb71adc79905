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

#include "nbvx/gain.h"

#include <algorithm>

namespace nbvx {

void GainConfig::validate() const {
  if (!(delta_theta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "delta_theta must be positive");
  const int n = numSlices();
  if (n < 8) throw Error(ErrorKind::kInvalidArgument, "need at least 8 slices");
  if (std::abs(n * delta_theta - kTwoPi) > 1e-6 * kTwoPi) {
    throw Error(ErrorKind::kInvalidArgument, "delta_theta must divide 2pi");
  }
  if (g_zero < 1) throw Error(ErrorKind::kInvalidArgument, "g_zero must be >= 1");
}

double GainConfig::idealDeltaTheta(double resolution, double range) {
  const double n = std::max(8.0, std::round(kTwoPi / (resolution / range)));
  return kTwoPi / n;
}

double cylinderHeight(const SensorModel& model) {
  return 2.0 * model.range * std::sin(0.5 * model.v_fov);
}

namespace {

void requireFree(const VoxelMap& map, const Vec3& p) {
  if (map.stateAt(p) != VoxelState::kFree) {
    throw Error(ErrorKind::kPositionNotFree, "gain queried at a non-free position");
  }
}

// Walks one ray and appends the unknown cells it passes before an obstacle.
void collectUnknown(const VoxelMap& map, const Vec3& origin, const Vec3& dir, double range,
                    std::vector<std::size_t>& out) {
  traverseGrid(map.geometry(), origin, dir, range,
               [&](const Index3&, std::size_t lin, double) {
                 const VoxelState s = map.state(lin);
                 if (s == VoxelState::kOccupied) return true;
                 if (s == VoxelState::kUnknown) out.push_back(lin);
                 return false;
               });
}

long countDistinct(std::vector<std::size_t>& cells) {
  std::sort(cells.begin(), cells.end());
  return static_cast<long>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

}  // namespace

SliceGains sliceGains(const VoxelMap& map, const Vec3& position, const SensorModel& model,
                      const GainConfig& cfg) {
  requireFree(map, position);
  const int n = cfg.numSlices();
  const double r = map.resolution();
  const double height = cylinderHeight(model);
  const int n_z = static_cast<int>(std::floor(height / r + 1e-9)) + 1;
  const double z_first = -0.5 * (n_z - 1) * r;

  SliceGains out;
  out.position = position;
  out.delta_theta = cfg.delta_theta;
  out.gains.assign(n, 0);
  std::vector<std::size_t> cells;
  for (int i = 0; i < n; ++i) {
    const double theta = cfg.sliceAngle(i);
    const double cx = model.range * std::cos(theta);
    const double cy = model.range * std::sin(theta);
    cells.clear();
    for (int k = 0; k < n_z; ++k) {
      const Vec3 d = Vec3(cx, cy, z_first + k * r).normalized();
      collectUnknown(map, position, d, model.range, cells);
    }
    out.gains[i] = static_cast<int>(countDistinct(cells));
  }
  return out;
}

long windowGain(const SliceGains& slices, double theta, const SensorModel& model) {
  const double half = 0.5 * model.h_fov + 1e-9;
  long sum = 0;
  const int n = static_cast<int>(slices.gains.size());
  for (int j = 0; j < n; ++j) {
    const double d = std::abs(wrapAngle(-kPi + j * slices.delta_theta - theta));
    if (d <= half) sum += slices.gains[j];
  }
  return sum;
}

YawChoice bestYaw(const SliceGains& slices, const SensorModel& model) {
  YawChoice best;
  best.gain = -1;
  const int n = static_cast<int>(slices.gains.size());
  for (int i = 0; i < n; ++i) {
    const double theta = -kPi + i * slices.delta_theta;
    const long g = windowGain(slices, theta, model);
    if (g > best.gain) best = YawChoice{theta, g, i};
  }
  return best;
}

YawChoice optimizeYaw(const VoxelMap& map, const Vec3& position, const SensorModel& model,
                      const GainConfig& cfg) {
  return bestYaw(sliceGains(map, position, model, cfg), model);
}

long frustumGain(const VoxelMap& map, const Pose& pose, const SensorModel& model) {
  requireFree(map, pose.position);
  std::vector<std::size_t> cells;
  for (const Vec3& d : scanDirections(model, pose.yaw)) {
    collectUnknown(map, pose.position, d, model.range, cells);
  }
  return countDistinct(cells);
}

}  // namespace nbvx
