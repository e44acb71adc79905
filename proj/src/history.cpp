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

#include "nbvx/history.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>

namespace nbvx {

void HistoryConfig::validate() const {
  if (!(d_hist > 0.0)) throw Error(ErrorKind::kInvalidArgument, "d_hist must be positive");
  if (!(rho_bfs > 0.0)) throw Error(ErrorKind::kInvalidArgument, "rho_bfs must be positive");
  if (!(eta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "eta must be positive");
  if (!(eps_merge >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "eps_merge must be >= 0");
}

long computePotential(const VoxelMap& map, const Vec3& p, double rho_bfs) {
  return static_cast<long>(frontiersWithin(map, p, rho_bfs));
}

std::vector<int> HistoryGraph::aliveIds() const {
  std::vector<int> ids;
  for (int i = 0; i < capacity(); ++i) {
    if (nodes_[i].alive) ids.push_back(i);
  }
  return ids;
}

int HistoryGraph::numAlive() const {
  return static_cast<int>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const HistoryNode& n) { return n.alive; }));
}

int HistoryGraph::numEdges() const {
  int n = 0;
  for (const auto& node : nodes_) {
    if (node.alive) n += static_cast<int>(node.edges.size());
  }
  return n / 2;
}

int HistoryGraph::addNode(const Vec3& p) {
  HistoryNode n;
  n.position = p;
  nodes_.push_back(n);
  return capacity() - 1;
}

void HistoryGraph::addEdge(int a, int b) {
  if (a == b) return;
  auto insert = [](std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
  };
  insert(nodes_[a].edges, b);
  insert(nodes_[b].edges, a);
}

void HistoryGraph::removeEdge(int a, int b) {
  auto erase = [](std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
  };
  erase(nodes_[a].edges, b);
  erase(nodes_[b].edges, a);
}

int HistoryGraph::nearestNode(const Vec3& p) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < capacity(); ++i) {
    if (!nodes_[i].alive) continue;
    const double d = (nodes_[i].position - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

namespace {

std::vector<int> byDistance(const std::vector<HistoryNode>& nodes, const Vec3& p) {
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    if (nodes[i].alive) order.emplace_back((nodes[i].position - p).squaredNorm(), i);
  }
  std::sort(order.begin(), order.end());
  std::vector<int> ids;
  ids.reserve(order.size());
  for (const auto& [d, i] : order) ids.push_back(i);
  return ids;
}

}  // namespace

int HistoryGraph::entryNode(const Vec3& p, const Clearance& clearance) const {
  for (int id : byDistance(nodes_, p)) {
    if (clearance.segmentValid(p, nodes_[id].position)) return id;
  }
  return -1;
}

bool HistoryGraph::recordPose(const Vec3& p, const Clearance& clearance) {
  if (numAlive() == 0) {
    last_node_ = addNode(p);
    return true;
  }
  const int nearest = nearestNode(p);
  if ((nodes_[nearest].position - p).norm() < cfg_.d_hist) {
    last_node_ = nearest;
    return false;
  }
  std::vector<int> links;
  for (int c : {last_node_, nearest}) {
    if (c < 0 || !nodes_[c].alive) continue;
    if (std::find(links.begin(), links.end(), c) != links.end()) continue;
    if (clearance.segmentValid(p, nodes_[c].position)) links.push_back(c);
  }
  if (links.empty()) {
    const double reach2 = 9.0 * cfg_.d_hist * cfg_.d_hist;
    for (int id : byDistance(nodes_, p)) {
      if ((nodes_[id].position - p).squaredNorm() > reach2) break;
      if (clearance.segmentValid(p, nodes_[id].position)) {
        links.push_back(id);
        break;
      }
    }
  }
  if (links.empty()) return false;
  const int id = addNode(p);
  for (int l : links) addEdge(id, l);
  last_node_ = id;
  return true;
}

void HistoryGraph::dijkstra(int source, std::vector<double>& dist, std::vector<int>& pred) const {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  dist.assign(nodes_.size(), kInf);
  pred.assign(nodes_.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[source] = 0.0;
  open.emplace(0.0, source);
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    for (int v : nodes_[u].edges) {
      const double nd = d + (nodes_[u].position - nodes_[v].position).norm();
      if (nd < dist[v]) {
        dist[v] = nd;
        pred[v] = u;
        open.emplace(nd, v);
      }
    }
  }
}

std::optional<int> HistoryGraph::nearestPotentialNode(const Vec3& p,
                                                      const Clearance& clearance) const {
  const int entry = entryNode(p, clearance);
  if (entry < 0) return std::nullopt;
  std::vector<double> dist;
  std::vector<int> pred;
  dijkstra(entry, dist, pred);
  std::optional<int> best;
  for (int i = 0; i < capacity(); ++i) {
    if (!nodes_[i].alive || nodes_[i].potential <= 0 || !std::isfinite(dist[i])) continue;
    if (!best || dist[i] < dist[*best]) best = i;
  }
  return best;
}

std::vector<Vec3> HistoryGraph::shortestPath(const Vec3& p, int to,
                                             const Clearance& clearance) const {
  if (to < 0 || to >= capacity() || !nodes_[to].alive) {
    throw Error(ErrorKind::kUnreachable, "target is not a live history node");
  }
  const int entry = entryNode(p, clearance);
  if (entry < 0) throw Error(ErrorKind::kUnreachable, "no collision-free link into the graph");
  std::vector<double> dist;
  std::vector<int> pred;
  dijkstra(entry, dist, pred);
  if (!std::isfinite(dist[to])) throw Error(ErrorKind::kUnreachable, "graph is disconnected");
  std::vector<Vec3> path;
  for (int k = to; k >= 0; k = pred[k]) path.push_back(nodes_[k].position);
  path.push_back(p);
  std::reverse(path.begin(), path.end());
  return path;
}

bool HistoryGraph::refineNode(int id, const EsdfField& esdf, const Clearance& clearance) {
  HistoryNode& n = nodes_[id];
  const Vec3 grad = esdfGradient(esdf, n.position);
  const double norm = grad.norm();
  if (norm < 1e-9) return false;
  const Vec3 cand = n.position + cfg_.eta * grad / norm;
  if (!clearance.pointValid(cand)) return false;
  if (esdf.distanceAt(cand) < esdf.distanceAt(n.position)) return false;
  if (esdf.interpolate(cand) < esdf.interpolate(n.position)) return false;
  for (int e : n.edges) {
    if (!clearance.segmentValid(cand, nodes_[e].position)) return false;
  }
  n.position = cand;
  return true;
}

int HistoryGraph::mergeCollapsed(const Clearance& clearance) {
  int merges = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < capacity() && !changed; ++a) {
      if (!nodes_[a].alive) continue;
      for (int b : nodes_[a].edges) {
        if (b < a) continue;
        if ((nodes_[a].position - nodes_[b].position).norm() >= cfg_.eps_merge) continue;
        bool ok = true;
        for (int n : nodes_[b].edges) {
          if (n == a) continue;
          if (!clearance.segmentValid(nodes_[a].position, nodes_[n].position)) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        const std::vector<int> inherited = nodes_[b].edges;
        for (int n : inherited) removeEdge(b, n);
        for (int n : inherited) {
          if (n != a) addEdge(a, n);
        }
        nodes_[b].alive = false;
        nodes_[a].potential = std::max(nodes_[a].potential, nodes_[b].potential);
        if (last_node_ == b) last_node_ = a;
        ++merges;
        changed = true;
        break;
      }
    }
  }
  return merges;
}

void HistoryGraph::maintainStep(const VoxelMap& map, const EsdfField& esdf,
                                const Clearance& clearance, int budget) {
  const int n = capacity();
  if (n == 0) return;
  int processed = 0;
  for (int visited = 0; visited < n && processed < budget; ++visited) {
    const int id = cursor_ % n;
    cursor_ = (cursor_ + 1) % n;
    if (!nodes_[id].alive) continue;
    refineNode(id, esdf, clearance);
    nodes_[id].potential = computePotential(map, nodes_[id].position, cfg_.rho_bfs);
    ++processed;
  }
  mergeCollapsed(clearance);
}

std::vector<int> HistoryGraph::noPotentialSet() const {
  std::vector<int> ids;
  for (int i = 0; i < capacity(); ++i) {
    if (nodes_[i].alive && nodes_[i].potential == 0) ids.push_back(i);
  }
  return ids;
}

bool HistoryGraph::anyPotential() const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [](const HistoryNode& n) { return n.alive && n.potential > 0; });
}

bool HistoryGraph::connected() const {
  const auto ids = aliveIds();
  if (ids.empty()) return true;
  std::vector<std::uint8_t> seen(nodes_.size(), 0);
  std::vector<int> stack{ids.front()};
  seen[ids.front()] = 1;
  int count = 0;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    ++count;
    for (int v : nodes_[u].edges) {
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return count == static_cast<int>(ids.size());
}

bool HistoryGraph::edgesValid(const Clearance& clearance) const {
  for (int a = 0; a < capacity(); ++a) {
    if (!nodes_[a].alive) continue;
    for (int b : nodes_[a].edges) {
      if (b > a && !clearance.segmentValid(nodes_[a].position, nodes_[b].position)) return false;
    }
  }
  return true;
}

void HistoryGraph::writeCsv(const std::string& nodes_path, const std::string& edges_path) const {
  std::ofstream nodes_out(nodes_path);
  std::ofstream edges_out(edges_path);
  if (!nodes_out) throw Error(ErrorKind::kIo, "cannot write " + nodes_path);
  if (!edges_out) throw Error(ErrorKind::kIo, "cannot write " + edges_path);
  nodes_out << "id,x,y,z,potential\n";
  edges_out << "id_a,id_b\n";
  for (int i = 0; i < capacity(); ++i) {
    const HistoryNode& n = nodes_[i];
    if (!n.alive) continue;
    nodes_out << i << ',' << n.position.x() << ',' << n.position.y() << ',' << n.position.z()
              << ',' << n.potential << '\n';
    for (int b : n.edges) {
      if (b > i) edges_out << i << ',' << b << '\n';
    }
  }
}

}  // namespace nbvx
