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
#include <limits>

#include <gtest/gtest.h>

#include "nbvx/history.h"
#include "nbvx/rrt.h"
#include "test_util.h"

namespace nbvx {
namespace {

// Grows the set of free cells face-connected to p's cell (centers within
// radius) until it stops changing, then counts frontier cells in it.
long floodPotential(const VoxelMap& map, const Vec3& p, double radius) {
  const GridGeometry& g = map.geometry();
  const Index3 start = g.indexOf(p);
  if (map.state(start) != VoxelState::kFree) return 0;
  std::vector<std::uint8_t> in(g.size(), 0);
  in[g.linear(start)] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
      if (in[lin] || map.state(lin) != VoxelState::kFree) continue;
      const Index3 c = g.unravel(lin);
      if ((g.center(c) - p).norm() > radius) continue;
      for (int a = 0; a < 3 && !in[lin]; ++a) {
        for (int s : {-1, 1}) {
          Index3 n = c;
          n[a] += s;
          if (g.inBounds(n) && in[g.linear(n)]) {
            in[lin] = 1;
            changed = true;
            break;
          }
        }
      }
    }
  }
  long count = 0;
  for (std::size_t lin = 0; lin < g.size(); ++lin) {
    if (in[lin] && isFrontier(map, g.unravel(lin))) ++count;
  }
  return count;
}

TEST(Potential, MatchesFloodFill) {
  Rng rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    VoxelMap map = testing::closedBox(16, 14, 6);
    for (std::size_t lin = 0; lin < map.size(); ++lin) {
      if (map.state(lin) != VoxelState::kFree) continue;
      const double u = uniform01(rng);
      if (u < 0.15) map.set(lin, VoxelState::kOccupied);
      else if (u < 0.25) map.set(lin, VoxelState::kUnknown);
    }
    for (int k = 0; k < 10; ++k) {
      const Vec3 p(uniform(rng, 0, 3.2), uniform(rng, 0, 2.8), uniform(rng, 0, 1.2));
      const double radius = uniform(rng, 0.3, 2.5);
      EXPECT_EQ(computePotential(map, p, radius), floodPotential(map, p, radius));
    }
  }
}

TEST(HistoryConfig, Validate) {
  HistoryConfig c;
  EXPECT_NO_THROW(c.validate());
  c.d_hist = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = HistoryConfig{};
  c.eps_merge = -1.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Dijkstra, MatchesFloydWarshall) {
  Rng rng(31);
  HistoryGraph graph;
  const int n = 25;
  for (int i = 0; i < n; ++i) {
    graph.addNode(Vec3(uniform(rng, 0, 10), uniform(rng, 0, 10), uniform(rng, 0, 2)));
  }
  for (int e = 0; e < 45; ++e) {
    graph.addEdge(static_cast<int>(rng() % n), static_cast<int>(rng() % n));
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> fw(n, std::vector<double>(n, kInf));
  for (int i = 0; i < n; ++i) {
    fw[i][i] = 0.0;
    for (int j : graph.node(i).edges) {
      fw[i][j] = (graph.node(i).position - graph.node(j).position).norm();
    }
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) fw[i][j] = std::min(fw[i][j], fw[i][k] + fw[k][j]);
  for (int s = 0; s < n; ++s) {
    std::vector<double> dist;
    std::vector<int> pred;
    graph.dijkstra(s, dist, pred);
    for (int t = 0; t < n; ++t) {
      if (std::isinf(fw[s][t])) {
        EXPECT_TRUE(std::isinf(dist[t]));
      } else {
        EXPECT_NEAR(dist[t], fw[s][t], 1e-9);
      }
    }
  }
}

struct Room {
  VoxelMap map = testing::closedBox(50, 50, 10);
  EsdfField esdf = computeEsdf(map, 2.5);
  Clearance clearance{esdf, 0.5};
};

TEST(RecordPose, SpacingAndLinks) {
  const Room w;
  HistoryGraph graph;
  EXPECT_TRUE(graph.recordPose(Vec3(2, 2, 1), w.clearance));
  EXPECT_FALSE(graph.recordPose(Vec3(2.5, 2, 1), w.clearance));
  EXPECT_TRUE(graph.recordPose(Vec3(3.1, 2, 1), w.clearance));
  EXPECT_TRUE(graph.recordPose(Vec3(4.2, 2, 1), w.clearance));
  EXPECT_EQ(graph.numAlive(), 3);
  EXPECT_EQ(graph.numEdges(), 2);
  EXPECT_TRUE(graph.connected());
  EXPECT_TRUE(graph.edgesValid(w.clearance));
  const auto ids = graph.aliveIds();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      EXPECT_GE((graph.node(ids[i]).position - graph.node(ids[j]).position).norm(), 1.0);
    }
  }
}

TEST(RecordPose, RefusesUnlinkablePose) {
  VoxelMap map = testing::closedBox(50, 20, 10);
  for (int y = 1; y <= 20; ++y)
    for (int z = 1; z <= 10; ++z) map.set(Index3(25, y, z), VoxelState::kOccupied);
  const EsdfField esdf = computeEsdf(map, 2.5);
  const Clearance clearance(esdf, 0.5);
  HistoryGraph graph;
  EXPECT_TRUE(graph.recordPose(Vec3(4, 2, 1), clearance));
  EXPECT_FALSE(graph.recordPose(Vec3(6, 2, 1), clearance));
  EXPECT_EQ(graph.numAlive(), 1);
}

TEST(MergeCollapsed, InheritsEdgesAndPotential) {
  const Room w;
  HistoryGraph graph;
  const int a = graph.addNode(Vec3(2, 2, 1));
  const int b = graph.addNode(Vec3(2.1, 2, 1));
  const int c = graph.addNode(Vec3(4, 2, 1));
  const int d = graph.addNode(Vec3(2, 4, 1));
  graph.addEdge(a, b);
  graph.addEdge(b, c);
  graph.addEdge(a, d);
  graph.setPotential(b, 7);
  EXPECT_EQ(graph.mergeCollapsed(w.clearance), 1);
  EXPECT_FALSE(graph.node(b).alive);
  EXPECT_EQ(graph.node(a).edges, (std::vector<int>{c, d}));
  EXPECT_EQ(graph.node(a).potential, 7);
  EXPECT_TRUE(graph.connected());
  EXPECT_EQ(graph.numEdges(), 2);
}

TEST(ShortestPath, FollowsGraphAndThrowsWhenUnreachable) {
  const Room w;
  HistoryGraph graph;
  const int a = graph.addNode(Vec3(2, 2, 1));
  const int b = graph.addNode(Vec3(4, 2, 1));
  const int c = graph.addNode(Vec3(4, 4, 1));
  const int lone = graph.addNode(Vec3(8, 8, 1));
  graph.addEdge(a, b);
  graph.addEdge(b, c);
  const Vec3 p(1.5, 2, 1);
  const auto path = graph.shortestPath(p, c, w.clearance);
  ASSERT_EQ(path.size(), 4u);
  EXPECT_EQ(path[0], p);
  EXPECT_EQ(path[1], graph.node(a).position);
  EXPECT_EQ(path[3], graph.node(c).position);
  try {
    graph.shortestPath(p, lone, w.clearance);
    FAIL() << "expected Unreachable";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnreachable);
  }
}

TEST(NearestPotentialNode, UsesGraphDistance) {
  VoxelMap map = testing::closedBox(50, 50, 10);
  for (int x = 1; x <= 40; ++x)
    for (int z = 1; z <= 10; ++z) map.set(Index3(x, 25, z), VoxelState::kOccupied);
  const EsdfField esdf = computeEsdf(map, 2.5);
  const Clearance clearance(esdf, 0.5);
  // U-shaped chain around the end of a wall at y = 5.
  HistoryGraph graph;
  std::vector<int> ids;
  for (double x = 2; x <= 9; x += 1) ids.push_back(graph.addNode(Vec3(x, 3, 1)));
  for (double x = 9; x >= 2; x -= 1) ids.push_back(graph.addNode(Vec3(x, 7, 1)));
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) graph.addEdge(ids[i], ids[i + 1]);
  const int across = ids.back();  // (2, 7): Euclidean close, graph far
  const int along = ids[4];       // (6, 3)
  graph.setPotential(across, 5);
  graph.setPotential(along, 5);
  EXPECT_EQ(graph.nearestPotentialNode(Vec3(2, 3.2, 1), clearance), along);
  graph.setPotential(along, 0);
  graph.setPotential(across, 0);
  EXPECT_FALSE(graph.nearestPotentialNode(Vec3(2, 3.2, 1), clearance).has_value());
  EXPECT_FALSE(graph.anyPotential());
}

TEST(Refine, MovesAwayFromWallsAndKeepsInvariants) {
  const Room w;
  HistoryGraph graph;
  const int a = graph.addNode(Vec3(0.8, 5, 1));
  const int b = graph.addNode(Vec3(2.5, 5, 1));
  graph.addEdge(a, b);
  double prev = w.esdf.interpolate(graph.node(a).position);
  int moves = 0;
  for (int k = 0; k < 30; ++k) {
    if (graph.refineNode(a, w.esdf, w.clearance)) ++moves;
    const double now = w.esdf.interpolate(graph.node(a).position);
    EXPECT_GE(now, prev - 1e-12);
    prev = now;
    EXPECT_TRUE(graph.edgesValid(w.clearance));
  }
  EXPECT_GT(moves, 0);
  EXPECT_GT(graph.node(a).position.x(), 0.8);
}

TEST(MaintainStep, KeepsConnectivityAndComputesPotential) {
  VoxelMap map = testing::closedBox(50, 20, 10);
  for (int x = 40; x <= 50; ++x)
    for (int y = 1; y <= 20; ++y)
      for (int z = 1; z <= 10; ++z) map.set(Index3(x, y, z), VoxelState::kUnknown);
  const EsdfField esdf = computeEsdf(map, 2.5);
  const Clearance clearance(esdf, 0.5);
  HistoryGraph graph;
  for (double x = 1.0; x <= 5.0; x += 1.0) graph.recordPose(Vec3(x, 2, 1), clearance);
  for (int pass = 0; pass < 10; ++pass) {
    graph.maintainStep(map, esdf, clearance, 2);
    EXPECT_TRUE(graph.connected());
    EXPECT_TRUE(graph.edgesValid(clearance));
  }
  const int near = graph.nearestNode(Vec3(5, 2, 1));
  const int far = graph.nearestNode(Vec3(1, 2, 1));
  EXPECT_GT(graph.node(near).potential, 0);
  EXPECT_EQ(graph.node(far).potential, 0);
  EXPECT_FALSE(graph.noPotentialSet().empty());
}

}  // namespace
}  // namespace nbvx
