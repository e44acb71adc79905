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

#ifndef NBVX_SENSOR_H_
#define NBVX_SENSOR_H_

#include <vector>

#include "nbvx/voxel_map.h"

namespace nbvx {

/// Limited field-of-view depth camera. Angles in radians, range in meters.
struct SensorModel {
  double h_fov = degToRad(115.0);
  double v_fov = degToRad(60.0);
  double range = 5.0;
  double ray_res = degToRad(1.5);

  /// Throws kInvalidArgument when the model is out of its valid domain.
  void validate() const;
};

/// Ray directions of the scan lattice for a given heading, row-major in
/// (elevation, azimuth).
std::vector<Vec3> scanDirections(const SensorModel& model, double yaw);

/// True when `d` (any length) lies inside the angular field of view of a
/// sensor facing `yaw`.
bool insideFieldOfView(const SensorModel& model, double yaw, const Vec3& d);

struct ScanRay {
  Vec3 direction;
  double range = 0.0;
  RayTermination kind = RayTermination::kReachedEnd;
};

struct DepthScan {
  Pose pose;
  std::vector<ScanRay> rays;
};

/// Noise-free scan of the ground-truth map.
DepthScan simulateScan(const VoxelMap& truth, const Pose& pose, const SensorModel& model);

struct IntegrationCounts {
  std::size_t newly_freed = 0;
  std::size_t newly_occupied = 0;
};

/// Carves each ray into `map`: cells before the hit become free and the hit
/// cell becomes occupied. Occupied cells never revert. When `freed` is given, linear indices of newly freed cells are
/// appended to it.
IntegrationCounts integrateScan(VoxelMap& map, const DepthScan& scan,
                                std::vector<std::size_t>* freed = nullptr);

}  // namespace nbvx

#endif  // NBVX_SENSOR_H_
