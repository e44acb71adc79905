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

#ifndef NBVX_GAIN_H_
#define NBVX_GAIN_H_

#include <vector>

#include "nbvx/sensor.h"
#include "nbvx/voxel_map.h"

namespace nbvx {

struct GainConfig {
  double delta_theta = degToRad(5.0);
  int g_zero = 500;

  int numSlices() const { return static_cast<int>(std::lround(kTwoPi / delta_theta)); }
  double sliceAngle(int i) const { return -kPi + i * delta_theta; }
  void validate() const;

  /// Step of r / R snapped so that it divides the full circle.
  static double idealDeltaTheta(double resolution, double range);
};

/// Height of the cylinder approximating the vertical extent of the frustum.
double cylinderHeight(const SensorModel& model);

struct SliceGains {
  Vec3 position = Vec3::Zero();
  /// gains[i] belongs to heading -pi + i * delta_theta.
  std::vector<int> gains;
  double delta_theta = 0.0;
};

/// Unknown-voxel counts of the vertical slices of the cylinder around
/// `position`. Throws kPositionNotFree.
SliceGains sliceGains(const VoxelMap& map, const Vec3& position, const SensorModel& model,
                      const GainConfig& cfg);

/// Sum of slice gains whose heading lies within h_fov / 2 of `theta`.
long windowGain(const SliceGains& slices, double theta, const SensorModel& model);

struct YawChoice {
  double theta = -kPi;
  long gain = 0;
  int index = 0;
};

/// Best discrete heading; ties go to the lowest slice index.
YawChoice bestYaw(const SliceGains& slices, const SensorModel& model);

/// Throws kPositionNotFree.
YawChoice optimizeYaw(const VoxelMap& map, const Vec3& position, const SensorModel& model,
                      const GainConfig& cfg);

/// Distinct unknown voxels seen by the dense sensor ray lattice at `pose`,
/// occlusion respected. Throws kPositionNotFree.
long frustumGain(const VoxelMap& map, const Pose& pose, const SensorModel& model);

}  // namespace nbvx

#endif  // NBVX_GAIN_H_
