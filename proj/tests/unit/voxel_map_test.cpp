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

#include <algorithm>
#include <filesystem>
#include <set>

#include <gtest/gtest.h>

#include "nbvx/rrt.h"
#include "nbvx/voxel_map.h"
#include "test_util.h"

namespace nbvx {
namespace {

struct Pierced {
  Index3 idx;
  double t_enter;
};

// Cells whose box overlaps [0, len] of the ray by a positive length, ordered by
// entry parameter. Computed independently with the slab method.
std::vector<Pierced> slabOracle(const GridGeometry& g, const Vec3& o, const Vec3& d, double len) {
  std::vector<Pierced> out;
  for (int z = 0; z < g.dims.z(); ++z) {
    for (int y = 0; y < g.dims.y(); ++y) {
      for (int x = 0; x < g.dims.x(); ++x) {
        const Index3 idx(x, y, z);
        const Vec3 lo = g.origin + idx.cast<double>() * g.resolution;
        const Vec3 hi = lo + Vec3::Constant(g.resolution);
        double t0 = 0.0, t1 = len;
        for (int a = 0; a < 3; ++a) {
          if (d[a] == 0.0) {
            if (o[a] < lo[a] || o[a] >= hi[a]) t1 = -1.0;
            continue;
          }
          double ta = (lo[a] - o[a]) / d[a], tb = (hi[a] - o[a]) / d[a];
          if (ta > tb) std::swap(ta, tb);
          t0 = std::max(t0, ta);
          t1 = std::min(t1, tb);
        }
        if (t1 - t0 > 1e-9) out.push_back({idx, t0});
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Pierced& a, const Pierced& b) { return a.t_enter < b.t_enter; });
  return out;
}

TEST(GridGeometry, IndexRoundTrip) {
  GridGeometry g;
  g.resolution = 0.25;
  g.origin = Vec3(-1.0, 2.0, 0.5);
  g.dims = Index3(7, 5, 3);
  for (std::size_t lin = 0; lin < g.size(); ++lin) {
    const Index3 idx = g.unravel(lin);
    EXPECT_EQ(g.linear(idx), lin);
    EXPECT_EQ(g.indexOf(g.center(idx)), idx);
  }
}

TEST(VoxelMap, OutsideReadsOccupied) {
  const VoxelMap map = testing::closedBox(3, 3, 3);
  EXPECT_EQ(map.state(Index3(-1, 0, 0)), VoxelState::kOccupied);
  EXPECT_EQ(map.state(Index3(1, 1, 1)), VoxelState::kFree);
  EXPECT_EQ(map.count(VoxelState::kFree), 27u);
}

TEST(TraverseGrid, MatchesSlabOracleOnRandomRays) {
  GridGeometry g;
  g.resolution = 0.2;
  g.origin = Vec3(-0.3, 0.1, -0.7);
  g.dims = Index3(12, 10, 9);
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec3 o = g.origin + Vec3(uniform(rng, 0.01, 2.39), uniform(rng, 0.01, 1.99),
                                   uniform(rng, 0.01, 1.79));
    Vec3 d(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    d.normalize();
    const double len = uniform(rng, 0.05, 3.0);
    std::vector<Pierced> got;
    traverseGrid(g, o, d, len, [&](const Index3& idx, std::size_t lin, double t) {
      EXPECT_EQ(lin, g.linear(idx));
      got.push_back({idx, t});
      return false;
    });
    const std::vector<Pierced> want = slabOracle(g, o, d, len);
    ASSERT_EQ(got.size(), want.size()) << "trial " << trial;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].idx, want[i].idx);
      EXPECT_NEAR(got[i].t_enter, want[i].t_enter, 1e-9);
    }
  }
}

TEST(TraverseGrid, DenseMarchIsSubset) {
  GridGeometry g;
  g.dims = Index3(15, 15, 15);
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 o(uniform(rng, 0.1, 2.9), uniform(rng, 0.1, 2.9), uniform(rng, 0.1, 2.9));
    Vec3 d(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    d.normalize();
    std::set<std::size_t> visited;
    traverseGrid(g, o, d, 2.0, [&](const Index3&, std::size_t lin, double) {
      visited.insert(lin);
      return false;
    });
    for (double t = 0.0; t < 2.0; t += 0.25 * g.resolution) {
      const Index3 idx = g.indexOf(o + t * d);
      if (!g.inBounds(idx)) break;
      EXPECT_TRUE(visited.count(g.linear(idx)));
    }
  }
}

TEST(TraverseGrid, AxisAlignedTieOrder) {
  GridGeometry g;
  g.dims = Index3(4, 4, 4);
  // Diagonal through cell corners: x steps before y before z.
  const Vec3 o(0.1, 0.1, 0.1);
  const Vec3 d = Vec3(1, 1, 1).normalized();
  std::vector<Index3> cells;
  traverseGrid(g, o, d, 0.5, [&](const Index3& idx, std::size_t, double) {
    cells.push_back(idx);
    return false;
  });
  ASSERT_GE(cells.size(), 4u);
  EXPECT_EQ(cells[1], Index3(1, 0, 0));
  EXPECT_EQ(cells[2], Index3(1, 1, 0));
  EXPECT_EQ(cells[3], Index3(1, 1, 1));
}

TEST(Raycast, StopsAtOccupiedAndPassesUnknown) {
  VoxelMap map = testing::closedBox(10, 3, 3, 0.2, VoxelState::kUnknown);
  map.set(Index3(7, 2, 2), VoxelState::kOccupied);
  const RayHit hit = raycast(map, Vec3(0.1, 0.3, 0.3), Vec3::UnitX(), 10.0);
  EXPECT_EQ(hit.kind, RayTermination::kHitOccupied);
  ASSERT_TRUE(hit.hit.has_value());
  EXPECT_EQ(*hit.hit, Index3(7, 2, 2));
  EXPECT_NEAR(hit.hit_distance, 1.1, 1e-12);
  EXPECT_EQ(hit.visited.size(), 6u);
}

TEST(Raycast, RangeLimit) {
  const VoxelMap map = testing::closedBox(10, 3, 3);
  const RayHit hit = raycast(map, Vec3(0.1, 0.3, 0.3), Vec3::UnitX(), 0.5);
  EXPECT_EQ(hit.kind, RayTermination::kReachedEnd);
  EXPECT_EQ(hit.visited.size(), 3u);
}

TEST(Frontier, CountsFreeCellsTouchingUnknown) {
  VoxelMap map = testing::closedBox(5, 5, 5, 0.2, VoxelState::kUnknown);
  map.set(Index3(3, 3, 3), VoxelState::kFree);
  map.set(Index3(3, 3, 4), VoxelState::kFree);
  EXPECT_TRUE(isFrontier(map, Index3(3, 3, 3)));
  EXPECT_FALSE(isFrontier(map, Index3(1, 1, 1)));  // unknown itself
  EXPECT_EQ(countFrontiers(map), 2u);
  const VoxelMap known = testing::closedBox(5, 5, 5);
  EXPECT_EQ(countFrontiers(known), 0u);
}

TEST(FrontiersWithin, RespectsRadiusAndConnectivity) {
  VoxelMap map = testing::closedBox(20, 3, 3, 0.2, VoxelState::kFree);
  for (int z = 1; z <= 3; ++z)
    for (int y = 1; y <= 3; ++y) map.set(Index3(20, y, z), VoxelState::kUnknown);
  const Vec3 p(0.3, 0.3, 0.3);  // cell (2, 2, 2)
  // Frontier cells sit at x index 19, center x = 3.7.
  EXPECT_EQ(frontiersWithin(map, p, 3.0), 0u);
  EXPECT_EQ(frontiersWithin(map, p, 3.6), 9u);
  EXPECT_EQ(frontiersWithin(map, p, 10.0, 1), 1u);
  EXPECT_EQ(frontiersWithin(map, Vec3(-0.1, 0.3, 0.3), 10.0), 0u);  // start not free
}

TEST(ReachableFree, FloodFillStopsAtWalls) {
  VoxelMap map = testing::closedBox(7, 3, 3);
  for (int z = 1; z <= 3; ++z)
    for (int y = 1; y <= 3; ++y) map.set(Index3(4, y, z), VoxelState::kOccupied);
  const auto mask = reachableFree(map, Index3(1, 1, 1));
  std::size_t n = 0;
  for (auto m : mask) n += m;
  EXPECT_EQ(n, 27u);
  EXPECT_TRUE(reachableFree(map, Index3(4, 1, 1)).empty());
}

TEST(MapIo, RleRoundTrip) {
  VoxelMap map = testing::closedBox(6, 5, 4, 0.2, VoxelState::kUnknown);
  Rng rng(1);
  for (std::size_t lin = 0; lin < map.size(); ++lin) {
    if (uniform01(rng) < 0.3) map.set(lin, VoxelState::kFree);
  }
  const auto path = std::filesystem::temp_directory_path() / "nbvx_rle_test.rle";
  writeMapRle(map, path.string());
  const VoxelMap back = readMapRle(path.string());
  EXPECT_TRUE(back == map);
  std::filesystem::remove(path);
}

TEST(MapIo, ReadMissingFileThrows) {
  try {
    readMapRle("/nonexistent/dir/map.rle");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

}  // namespace
}  // namespace nbvx
