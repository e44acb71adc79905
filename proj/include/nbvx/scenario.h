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

#ifndef NBVX_SCENARIO_H_
#define NBVX_SCENARIO_H_

#include <functional>
#include <string>
#include <vector>

#include "nbvx/voxel_map.h"

namespace nbvx {

struct Scenario {
  std::string name;
  VoxelMap truth;
  std::vector<Pose> starts;
  /// Extruded footprint size in meters (x, y, height).
  Vec3 extent = Vec3::Zero();
};

/// Extrudes a 2D occupancy footprint over [0, size_x] x [0, size_y] to
/// height h and wraps it in a one-voxel occupied shell. Voxels are classified
/// by their centers.
VoxelMap rasterizeFootprint(double size_x, double size_y, double height, double resolution,
                            const std::function<bool(double, double)>& occupied);

/// Parses the ASCII scenario text. Header `r=<m> h=<m> levels=1 [cell=<m>]`,
/// then rows of '#' and '.', then one or more `start: x y z yaw` lines. Each
/// character covers cell x cell meters (default 1); the first row is the
/// largest y. Throws kParseError naming line and column, or
/// kStartInCollision.
Scenario parseScenario(const std::string& text, const std::string& name,
                       double robot_radius = 0.5);
Scenario loadScenario(const std::string& path, double robot_radius = 0.5);

/// Corridor of the given length and width, closed at x = 0 and opening into
/// a square chamber. The start sits at the closed end.
Scenario generateDeadend(double length, double width, double resolution = 0.2,
                         double height = 2.0, double chamber = 7.0);

/// Start clearance and boundary checks shared by the loaders.
void validateStarts(const Scenario& s, double robot_radius);

}  // namespace nbvx

#endif  // NBVX_SCENARIO_H_
