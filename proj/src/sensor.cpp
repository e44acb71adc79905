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

#include "nbvx/sensor.h"

#include <algorithm>

namespace nbvx {

void SensorModel::validate() const {
  if (!(h_fov > 0.0 && h_fov <= kTwoPi + 1e-12)) {
    throw Error(ErrorKind::kInvalidArgument, "h_fov must lie in (0, 2pi]");
  }
  if (!(v_fov > 0.0 && v_fov < kPi)) {
    throw Error(ErrorKind::kInvalidArgument, "v_fov must lie in (0, pi)");
  }
  if (!(range > 0.0)) throw Error(ErrorKind::kInvalidArgument, "range must be positive");
  if (!(ray_res > 0.0 && ray_res <= std::min(h_fov, v_fov) / 4.0 + 1e-12)) {
    throw Error(ErrorKind::kInvalidArgument, "ray_res must be in (0, min(fov)/4]");
  }
}

namespace {

// Lattice offsets at ray_res spacing, symmetric about zero, within +-fov/2.
std::vector<double> latticeOffsets(double fov, double res) {
  const int n = static_cast<int>(std::floor(fov / res + 1e-9)) + 1;
  std::vector<double> out(n);
  const double first = -0.5 * (n - 1) * res;
  for (int i = 0; i < n; ++i) out[i] = first + i * res;
  return out;
}

}  // namespace

std::vector<Vec3> scanDirections(const SensorModel& model, double yaw) {
  const auto az = latticeOffsets(model.h_fov, model.ray_res);
  const auto el = latticeOffsets(model.v_fov, model.ray_res);
  std::vector<Vec3> dirs;
  dirs.reserve(az.size() * el.size());
  for (double e : el) {
    const double ce = std::cos(e);
    const double se = std::sin(e);
    for (double a : az) {
      const double heading = yaw + a;
      dirs.emplace_back(ce * std::cos(heading), ce * std::sin(heading), se);
    }
  }
  return dirs;
}

bool insideFieldOfView(const SensorModel& model, double yaw, const Vec3& d) {
  const double horiz = std::hypot(d.x(), d.y());
  const double elevation = std::atan2(d.z(), horiz);
  if (std::abs(elevation) > 0.5 * model.v_fov + 1e-12) return false;
  if (horiz < 1e-12) return true;
  const double azimuth = wrapAngle(std::atan2(d.y(), d.x()) - yaw);
  return std::abs(azimuth) <= 0.5 * model.h_fov + 1e-12;
}

DepthScan simulateScan(const VoxelMap& truth, const Pose& pose, const SensorModel& model) {
  if (truth.stateAt(pose.position) == VoxelState::kOccupied) {
    throw Error(ErrorKind::kPoseInCollision, "scan pose lies in an occupied cell");
  }
  DepthScan scan;
  scan.pose = pose;
  const auto dirs = scanDirections(model, pose.yaw);
  scan.rays.reserve(dirs.size());
  for (const Vec3& d : dirs) {
    ScanRay ray{d, model.range, RayTermination::kReachedEnd};
    ray.kind = traverseGrid(truth.geometry(), pose.position, d, model.range,
                            [&](const Index3&, std::size_t lin, double t) {
                              if (truth.state(lin) == VoxelState::kOccupied) {
                                ray.range = t;
                                return true;
                              }
                              return false;
                            });
    scan.rays.push_back(ray);
  }
  return scan;
}

IntegrationCounts integrateScan(VoxelMap& map, const DepthScan& scan,
                                std::vector<std::size_t>* freed) {
  IntegrationCounts counts;
  const Vec3& origin = scan.pose.position;
  for (const ScanRay& ray : scan.rays) {
    const bool hit = ray.kind == RayTermination::kHitOccupied;
    const double limit = hit ? std::numeric_limits<double>::infinity() : ray.range;
    traverseGrid(map.geometry(), origin, ray.direction, limit,
                 [&](const Index3&, std::size_t lin, double t) {
                   const VoxelState s = map.state(lin);
                   if (hit && t >= ray.range) {
                     if (s != VoxelState::kOccupied) {
                       if (s == VoxelState::kUnknown) ++counts.newly_occupied;
                       map.set(lin, VoxelState::kOccupied);
                     }
                     return true;
                   }
                   if (s == VoxelState::kUnknown) {
                     map.set(lin, VoxelState::kFree);
                     ++counts.newly_freed;
                     if (freed) freed->push_back(lin);
                   }
                   return false;
                 });
  }
  return counts;
}

}  // namespace nbvx
