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

#ifndef NBVX_HISTORY_H_
#define NBVX_HISTORY_H_

#include <optional>
#include <string>
#include <vector>

#include "nbvx/esdf.h"

namespace nbvx {

struct HistoryConfig {
  double d_hist = 1.0;
  double rho_bfs = 5.0;
  double eta = 0.1;
  double eps_merge = 0.2;

  void validate() const;
};

struct HistoryNode {
  Vec3 position = Vec3::Zero();
  long potential = 0;
  std::vector<int> edges;  // sorted ids of live neighbours
  bool alive = true;
};

/// Frontier cells reachable through free space within rho_bfs of p.
long computePotential(const VoxelMap& map, const Vec3& p, double rho_bfs);

/// Graph of visited free-space positions. Node ids are stable; merged nodes
/// stay in storage as dead entries.
class HistoryGraph {
 public:
  explicit HistoryGraph(const HistoryConfig& cfg = HistoryConfig()) : cfg_(cfg) {}

  const HistoryConfig& config() const { return cfg_; }
  const HistoryNode& node(int id) const { return nodes_[id]; }
  int capacity() const { return static_cast<int>(nodes_.size()); }
  std::vector<int> aliveIds() const;
  int numAlive() const;
  int numEdges() const;
  bool empty() const { return numAlive() == 0; }

  /// Adds a node at p when it is at least d_hist from every node and can be
  /// linked to the graph by a collision-free edge. Returns true if added.
  bool recordPose(const Vec3& p, const Clearance& clearance);

  /// Nearest live node by Euclidean distance, -1 when empty.
  int nearestNode(const Vec3& p) const;
  /// Nearest live node whose straight segment to p is collision-free, -1 if
  /// none.
  int entryNode(const Vec3& p, const Clearance& clearance) const;

  /// Node with positive potential closest along the graph to the entry node
  /// of p.
  std::optional<int> nearestPotentialNode(const Vec3& p, const Clearance& clearance) const;

  /// p followed by the graph path from its entry node to `to`. Throws
  /// kUnreachable.
  std::vector<Vec3> shortestPath(const Vec3& p, int to, const Clearance& clearance) const;

  /// Graph distances from `source` over Euclidean edge lengths (infinity when
  /// unreachable), plus predecessor ids.
  void dijkstra(int source, std::vector<double>& dist, std::vector<int>& pred) const;

  /// One gradient-ascent step on obstacle distance. Returns true if moved.
  bool refineNode(int id, const EsdfField& esdf, const Clearance& clearance);
  void setPotential(int id, long potential) { nodes_[id].potential = potential; }
  /// Collapses adjacent nodes closer than eps_merge. Returns merge count.
  int mergeCollapsed(const Clearance& clearance);

  /// Processes up to `budget` nodes round-robin (refine, potential), then
  /// merges.
  void maintainStep(const VoxelMap& map, const EsdfField& esdf, const Clearance& clearance,
                    int budget);

  std::vector<int> noPotentialSet() const;
  bool anyPotential() const;
  bool connected() const;
  bool edgesValid(const Clearance& clearance) const;

  void writeCsv(const std::string& nodes_path, const std::string& edges_path) const;

  /// Test and fixture hooks.
  int addNode(const Vec3& p);
  void addEdge(int a, int b);

 private:
  void removeEdge(int a, int b);

  HistoryConfig cfg_;
  std::vector<HistoryNode> nodes_;
  int last_node_ = -1;
  int cursor_ = 0;
};

}  // namespace nbvx

#endif  // NBVX_HISTORY_H_
