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


#include <cmath>

#include <gtest/gtest.h>

#include "nbvx/sensor.h"
#include "test_util.h"

namespace nbvx {
namespace {

TEST(SensorModel, ValidateRejectsBadDomains) {
  SensorModel m;
  EXPECT_NO_THROW(m.validate());
  m.h_fov = 0.0;
  EXPECT_THROW(m.validate(), Error);
  m = SensorModel{};
  m.v_fov = kPi;
  EXPECT_THROW(m.validate(), Error);
  m = SensorModel{};
  m.range = -1.0;
  EXPECT_THROW(m.validate(), Error);
  m = SensorModel{};
  m.ray_res = degToRad(30.0);
  EXPECT_THROW(m.validate(), Error);
}

TEST(ScanDirections, LatticeSizeAndCoverage) {
  const SensorModel m;
  const auto dirs = scanDirections(m, 0.7);
  // floor(115 / 1.5) + 1 azimuths, floor(60 / 1.5) + 1 elevations.
  EXPECT_EQ(dirs.size(), 77u * 41u);
  for (const Vec3& d : dirs) {
    EXPECT_NEAR(d.norm(), 1.0, 1e-12);
    EXPECT_TRUE(insideFieldOfView(m, 0.7, d));
  }
  const Vec3 forward(std::cos(0.7), std::sin(0.7), 0.0);
  double best = -1.0;
  for (const Vec3& d : dirs) best = std::max(best, d.dot(forward));
  EXPECT_NEAR(best, 1.0, 1e-12);
}

TEST(FieldOfView, Boundaries) {
  const SensorModel m;
  EXPECT_TRUE(insideFieldOfView(m, 0.0, Vec3(1, 0, 0)));
  EXPECT_FALSE(insideFieldOfView(m, 0.0, Vec3(-1, 0, 0)));
  EXPECT_TRUE(insideFieldOfView(m, kPi, Vec3(-1, 0, 0)));
  const double edge = 0.5 * m.h_fov;
  EXPECT_TRUE(insideFieldOfView(m, 0.0, Vec3(std::cos(edge), std::sin(edge), 0)));
  EXPECT_FALSE(
      insideFieldOfView(m, 0.0, Vec3(std::cos(edge + 1e-3), std::sin(edge + 1e-3), 0)));
  EXPECT_TRUE(insideFieldOfView(m, 0.0, Vec3(1, 0, std::tan(0.5 * m.v_fov) - 1e-6)));
  EXPECT_FALSE(insideFieldOfView(m, 0.0, Vec3(1, 0, std::tan(0.5 * m.v_fov) + 1e-3)));
}

TEST(SimulateScan, CentralRayHitsWallAtExactDistance) {
  const VoxelMap truth = testing::closedBox(20, 20, 10);
  const SensorModel m;
  const DepthScan scan = simulateScan(truth, Pose{Vec3(1.0, 2.0, 1.0), 0.0}, m);
  ASSERT_EQ(scan.rays.size(), 77u * 41u);
  // Row-major (elevation, azimuth): the centre ray is in the middle row and column.
  const ScanRay& centre = scan.rays[20 * 77 + 38];
  EXPECT_NEAR(centre.direction.x(), 1.0, 1e-12);
  EXPECT_EQ(centre.kind, RayTermination::kHitOccupied);
  EXPECT_NEAR(centre.range, 3.0, 1e-9);
}

TEST(SimulateScan, RangeLimitAndCollision) {
  const VoxelMap truth = testing::closedBox(60, 20, 10);
  SensorModel m;
  m.range = 2.0;
  const DepthScan scan = simulateScan(truth, Pose{Vec3(1.0, 2.0, 1.0), 0.0}, m);
  const ScanRay& centre = scan.rays[20 * 77 + 38];
  EXPECT_EQ(centre.kind, RayTermination::kReachedEnd);
  EXPECT_DOUBLE_EQ(centre.range, 2.0);
  try {
    simulateScan(truth, Pose{Vec3(-0.1, 2.0, 1.0), 0.0}, m);
    FAIL() << "expected PoseInCollision";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPoseInCollision);
  }
}

TEST(IntegrateScan, CarvesFreeSpaceAndMarksHits) {
  const VoxelMap truth = testing::closedBox(20, 20, 10);
  VoxelMap map = testing::closedBox(20, 20, 10, 0.2, VoxelState::kUnknown);
  const GridGeometry& g = map.geometry();
  for (std::size_t lin = 0; lin < g.size(); ++lin) map.set(lin, VoxelState::kUnknown);
  const SensorModel m;
  const DepthScan scan = simulateScan(truth, Pose{Vec3(1.0, 2.0, 1.0), 0.3}, m);
  std::vector<std::size_t> freed;
  const IntegrationCounts c = integrateScan(map, scan, &freed);
  EXPECT_EQ(c.newly_freed, freed.size());
  EXPECT_EQ(map.count(VoxelState::kFree), c.newly_freed);
  EXPECT_EQ(map.count(VoxelState::kOccupied), c.newly_occupied);
  EXPECT_GT(c.newly_occupied, 0u);
  // Every revealed cell agrees with the truth.
  for (std::size_t lin = 0; lin < g.size(); ++lin) {
    if (map.state(lin) != VoxelState::kUnknown) EXPECT_EQ(map.state(lin), truth.state(lin));
  }
  const IntegrationCounts again = integrateScan(map, scan);
  EXPECT_EQ(again.newly_freed, 0u);
  EXPECT_EQ(again.newly_occupied, 0u);
}

TEST(IntegrateScan, OccupiedNeverReverts) {
  const VoxelMap truth = testing::closedBox(20, 20, 10);
  VoxelMap map = testing::closedBox(20, 20, 10, 0.2, VoxelState::kUnknown);
  const Index3 stale(8, 11, 6);
  map.set(stale, VoxelState::kOccupied);
  const SensorModel m;
  integrateScan(map, simulateScan(truth, Pose{Vec3(0.5, 2.0, 1.0), 0.0}, m));
  EXPECT_EQ(map.state(stale), VoxelState::kOccupied);
}

}  // namespace
}  // namespace nbvx
