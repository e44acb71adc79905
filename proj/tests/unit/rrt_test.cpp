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

#include "nbvx/rrt.h"
#include "test_util.h"

namespace nbvx {
namespace {

bool denseSegmentClear(const EsdfField& f, const Vec3& a, const Vec3& b, double radius) {
  const int n = static_cast<int>(std::ceil((b - a).norm() / 0.005)) + 1;
  for (int k = 0; k <= n; ++k) {
    if (f.distanceAt(a + (b - a) * (static_cast<double>(k) / n)) < radius) return false;
  }
  return true;
}

struct OpenCube {
  VoxelMap map = testing::closedBox(50, 50, 50);
  EsdfField esdf = computeEsdf(map, 2.5);
  Clearance clearance{esdf, 0.5};
};

TEST(SamplePosition, VicinityStaysInBallWithClearance) {
  const OpenCube w;
  const RrtConfig cfg;
  Rng rng(5);
  const Vec3 c(5, 5, 5);
  for (int i = 0; i < 300; ++i) {
    const Vec3 p = samplePosition(SamplingBounds::vicinity(c, 2.0), w.map, w.clearance, cfg, rng);
    EXPECT_LE((p - c).norm(), 2.0 + 1e-12);
    EXPECT_GE(w.clearance.at(p), cfg.robot_radius);
  }
}

TEST(SamplePosition, FullSpaceCoversFreeCells) {
  const OpenCube w;
  const RrtConfig cfg;
  Rng rng(6);
  Vec3 lo = Vec3::Constant(1e9), hi = Vec3::Constant(-1e9);
  for (int i = 0; i < 500; ++i) {
    const Vec3 p = samplePosition(SamplingBounds::fullFreeSpace(), w.map, w.clearance, cfg, rng);
    EXPECT_EQ(w.map.stateAt(p), VoxelState::kFree);
    EXPECT_GE(w.clearance.at(p), cfg.robot_radius);
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  EXPECT_LT(lo.maxCoeff(), 2.0);
  EXPECT_GT(hi.minCoeff(), 8.0);
}

TEST(SamplePosition, InsideWallThrowsNoFreeSample) {
  VoxelMap map = testing::closedBox(20, 20, 20);
  for (int x = 5; x <= 15; ++x)
    for (int y = 5; y <= 15; ++y)
      for (int z = 5; z <= 15; ++z) map.set(Index3(x, y, z), VoxelState::kOccupied);
  const EsdfField esdf = computeEsdf(map, 2.5);
  const Clearance clearance(esdf, 0.5);
  Rng rng(1);
  try {
    samplePosition(SamplingBounds::vicinity(Vec3(2, 2, 2), 0.4), map, clearance, RrtConfig{},
                   rng);
    FAIL() << "expected NoFreeSample";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNoFreeSample);
  }
}

TEST(SamplePosition, DeterministicForSeed) {
  const OpenCube w;
  Rng a(77), b(77);
  for (int i = 0; i < 50; ++i) {
    const auto bounds = SamplingBounds::vicinity(Vec3(5, 5, 5), 3.0);
    EXPECT_EQ(samplePosition(bounds, w.map, w.clearance, RrtConfig{}, a),
              samplePosition(bounds, w.map, w.clearance, RrtConfig{}, b));
  }
}

TEST(Extend, TruncatesToStepMax) {
  const OpenCube w;
  RrtTree tree(RrtNode{Vec3(2, 2, 2)});
  const Vec3 sample(12, 2, 2);
  const ExtendResult r = extend(tree, sample, w.clearance, 1.5);
  ASSERT_EQ(r.status, ExtendStatus::kAdded);
  EXPECT_NEAR((r.position - Vec3(2, 2, 2)).norm(), 1.5, 1e-12);
  EXPECT_NEAR((r.position - Vec3(3.5, 2, 2)).norm(), 0.0, 1e-12);
  EXPECT_EQ(tree.size(), 2);
  EXPECT_EQ(tree.node(1).parent, 0);
  EXPECT_NEAR(tree.node(1).cost, 1.5, 1e-12);
}

TEST(Extend, RejectsCollisionAndDegenerate) {
  VoxelMap map = testing::closedBox(30, 20, 10);
  for (int y = 1; y <= 20; ++y)
    for (int z = 1; z <= 10; ++z) map.set(Index3(15, y, z), VoxelState::kOccupied);
  const EsdfField esdf = computeEsdf(map, 2.5);
  const Clearance clearance(esdf, 0.5);
  RrtTree tree(RrtNode{Vec3(2.3, 2, 1)});
  EXPECT_EQ(extend(tree, Vec3(3.5, 2, 1), clearance, 1.5).status, ExtendStatus::kCollision);
  EXPECT_EQ(extend(tree, Vec3(2.3, 2, 1), clearance, 1.5).status, ExtendStatus::kDegenerate);
  EXPECT_EQ(tree.size(), 1);
}

TEST(Extend, ThousandExtensionsKeepClearance) {
  VoxelMap map = testing::closedBox(50, 50, 20);
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    map.set(Index3(1 + static_cast<int>(rng() % 50), 1 + static_cast<int>(rng() % 50),
                   1 + static_cast<int>(rng() % 20)),
            VoxelState::kOccupied);
  }
  const EsdfField esdf = computeEsdf(map, 2.5);
  const Clearance clearance(esdf, 0.3);
  RrtTree tree(RrtNode{Vec3(5, 5, 2)});
  ASSERT_TRUE(clearance.pointValid(tree.node(0).position));
  for (int i = 0; i < 1000; ++i) {
    extend(tree, Vec3(uniform(rng, 0, 10), uniform(rng, 0, 10), uniform(rng, 0, 4)), clearance,
           1.5);
  }
  EXPECT_GT(tree.size(), 100);
  for (int i = 1; i < tree.size(); ++i) {
    const RrtNode& n = tree.node(i);
    const Vec3& p = tree.node(n.parent).position;
    EXPECT_LE((n.position - p).norm(), 1.5 + 1e-9);
    EXPECT_TRUE(denseSegmentClear(esdf, p, n.position, 0.3)) << "edge " << i;
  }
}

TEST(RrtTree, NearestAndBranch) {
  RrtTree tree(RrtNode{Vec3(0, 0, 0)});
  tree.add(RrtNode{Vec3(1, 0, 0), 0.0, 0, 0, 1.0});
  tree.add(RrtNode{Vec3(2, 0, 0), 0.0, 0, 1, 2.0});
  tree.add(RrtNode{Vec3(0, 1, 0), 0.0, 0, 0, 1.0});
  EXPECT_EQ(tree.nearest(Vec3(1.9, 0.2, 0)), 2);
  EXPECT_EQ(tree.branch(0).size(), 1u);
  const auto b = tree.branch(2);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b.front(), Vec3(0, 0, 0));
  EXPECT_EQ(b.back(), Vec3(2, 0, 0));
  EXPECT_EQ(tree.branchIndices(2), (std::vector<int>{0, 1, 2}));
}

// Known room of 10 x 10 m whose far half is unknown.
VoxelMap halfExploredRoom() {
  VoxelMap map = testing::closedBox(50, 50, 10);
  const GridGeometry& g = map.geometry();
  for (std::size_t lin = 0; lin < g.size(); ++lin) {
    if (map.state(lin) == VoxelState::kFree && g.center(g.unravel(lin)).x() > 6.0) {
      map.set(lin, VoxelState::kUnknown);
    }
  }
  return map;
}

TEST(GrowUntilGain, FindsGainNearUnknownQuickly) {
  const VoxelMap map = halfExploredRoom();
  const EsdfField esdf = computeEsdf(map, 2.5);
  const Clearance clearance(esdf, 0.5);
  const RrtConfig cfg;
  GainConfig gain;
  int total = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const Vec3 start(1.5, 5, 1);
    const PlanResult r =
        growUntilGain(start, SamplingBounds::vicinity(start, cfg.vicinity_radius), map,
                      clearance, SensorModel{}, gain, cfg, cfg.sample_budget, rng);
    ASSERT_TRUE(r.found);
    EXPECT_LE(r.samples_used, 50);
    EXPECT_GE(r.terminal_gain, gain.g_zero);
    EXPECT_EQ(r.branch.front(), start);
    for (std::size_t i = 1; i < r.branch.size(); ++i) {
      EXPECT_LE((r.branch[i] - r.branch[i - 1]).norm(), cfg.step_max + 1e-9);
    }
    total += r.samples_used;
  }
  EXPECT_GT(total, 0);
}

TEST(GrowUntilGain, RootAcceptedWithoutSamples) {
  const VoxelMap map = halfExploredRoom();
  const EsdfField esdf = computeEsdf(map, 2.5);
  const Clearance clearance(esdf, 0.5);
  Rng rng(0);
  const Vec3 seed(5.5, 5, 1);
  const PlanResult r = growUntilGain(seed, SamplingBounds::vicinity(seed, 4.0), map, clearance,
                                     SensorModel{}, GainConfig{}, RrtConfig{}, 400, rng);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.samples_used, 0);
  ASSERT_EQ(r.branch.size(), 1u);
  EXPECT_EQ(r.branch[0], seed);

  // Already sensed facing the best heading: the root no longer qualifies.
  Rng rng2(0);
  const PlanResult seen =
      growUntilGain(seed, SamplingBounds::vicinity(seed, 4.0), map, clearance, SensorModel{},
                    GainConfig{}, RrtConfig{}, 400, rng2, r.terminal_yaw);
  ASSERT_TRUE(seen.found);
  EXPECT_GT(seen.branch.size(), 1u);
}

TEST(GrowUntilGain, ExploredMapExhaustsBudgetOrPrunes) {
  const VoxelMap map = testing::closedBox(40, 40, 10);
  const EsdfField esdf = computeEsdf(map, 2.5);
  const Clearance clearance(esdf, 0.5);
  RrtConfig cfg;
  cfg.prune_unobservable = false;
  Rng rng(3);
  const Vec3 seed(4, 4, 1);
  PlanResult r = growUntilGain(seed, SamplingBounds::vicinity(seed, 4.0), map, clearance,
                               SensorModel{}, GainConfig{}, cfg, 120, rng);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.samples_used, 120);
  cfg.prune_unobservable = true;
  r = growUntilGain(seed, SamplingBounds::vicinity(seed, 4.0), map, clearance, SensorModel{},
                    GainConfig{}, cfg, 120, rng);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.samples_used, 0);
}

TEST(GrowUntilGain, InvalidSeedThrows) {
  const OpenCube w;
  Rng rng(0);
  try {
    growUntilGain(Vec3(0.1, 5, 5), SamplingBounds::fullFreeSpace(), w.map, w.clearance,
                  SensorModel{}, GainConfig{}, RrtConfig{}, 10, rng);
    FAIL() << "expected SeedInvalid";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSeedInvalid);
  }
}

TEST(GrowUntilGain, DeterministicForSeed) {
  const VoxelMap map = halfExploredRoom();
  const EsdfField esdf = computeEsdf(map, 2.5);
  const Clearance clearance(esdf, 0.5);
  Rng a(9), b(9);
  const Vec3 seed(1.5, 5, 1);
  const auto bounds = SamplingBounds::vicinity(seed, 4.0);
  const PlanResult ra = growUntilGain(seed, bounds, map, clearance, SensorModel{}, GainConfig{},
                                      RrtConfig{}, 400, a);
  const PlanResult rb = growUntilGain(seed, bounds, map, clearance, SensorModel{}, GainConfig{},
                                      RrtConfig{}, 400, b);
  EXPECT_EQ(ra.branch, rb.branch);
  EXPECT_EQ(ra.samples_used, rb.samples_used);
  EXPECT_EQ(ra.terminal_gain, rb.terminal_gain);
}

}  // namespace
}  // namespace nbvx
