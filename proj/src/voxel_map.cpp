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

#include "nbvx/voxel_map.h"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace nbvx {

std::string_view voxelStateName(VoxelState s) {
  switch (s) {
    case VoxelState::kUnknown: return "unknown";
    case VoxelState::kFree: return "free";
    case VoxelState::kOccupied: return "occupied";
  }
  return "unknown";
}

VoxelMap::VoxelMap(const GridGeometry& geometry, VoxelState fill) : geometry_(geometry) {
  if (!(geometry.resolution > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "voxel resolution must be positive");
  }
  if ((geometry.dims.array() < 1).any()) {
    throw Error(ErrorKind::kInvalidArgument, "grid dimensions must be >= 1");
  }
  cells_.assign(geometry.size(), fill);
}

std::size_t VoxelMap::count(VoxelState s) const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), s));
}

RayHit raycast(const VoxelMap& map, const Vec3& origin, const Vec3& dir, double max_range) {
  RayHit out;
  out.kind = traverseGrid(map.geometry(), origin, dir, max_range,
                          [&](const Index3& idx, std::size_t lin, double t) {
                            if (map.state(lin) == VoxelState::kOccupied) {
                              out.hit = idx;
                              out.hit_distance = t;
                              return true;
                            }
                            out.visited.push_back(idx);
                            return false;
                          });
  return out;
}

namespace {

constexpr int kFaceOffsets[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                    {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};

}  // namespace

bool isFrontier(const VoxelMap& map, const Index3& idx) {
  if (map.state(idx) != VoxelState::kFree) return false;
  for (const auto& o : kFaceOffsets) {
    const Index3 n(idx.x() + o[0], idx.y() + o[1], idx.z() + o[2]);
    if (map.inBounds(n) && map.state(n) == VoxelState::kUnknown) return true;
  }
  return false;
}

std::size_t countFrontiers(const VoxelMap& map) {
  std::size_t n = 0;
  for (std::size_t lin = 0; lin < map.size(); ++lin) {
    if (map.state(lin) == VoxelState::kFree && isFrontier(map, map.geometry().unravel(lin))) {
      ++n;
    }
  }
  return n;
}

std::vector<std::uint8_t> reachableFree(const VoxelMap& map, const Index3& start) {
  std::vector<std::uint8_t> mark;
  if (map.state(start) != VoxelState::kFree) return mark;
  mark.assign(map.size(), 0);
  const auto& g = map.geometry();
  std::deque<Index3> queue{start};
  mark[g.linear(start)] = 1;
  while (!queue.empty()) {
    const Index3 c = queue.front();
    queue.pop_front();
    for (const auto& o : kFaceOffsets) {
      const Index3 n(c.x() + o[0], c.y() + o[1], c.z() + o[2]);
      if (!g.inBounds(n)) continue;
      const std::size_t lin = g.linear(n);
      if (mark[lin] || map.state(lin) != VoxelState::kFree) continue;
      mark[lin] = 1;
      queue.push_back(n);
    }
  }
  return mark;
}

std::size_t frontiersWithin(const VoxelMap& map, const Vec3& p, double radius,
                            std::size_t limit) {
  const auto& g = map.geometry();
  const Index3 start = g.indexOf(p);
  if (map.state(start) != VoxelState::kFree || limit == 0) return 0;
  const double r2 = radius * radius;
  std::vector<std::uint8_t> mark(map.size(), 0);
  std::deque<Index3> queue{start};
  mark[g.linear(start)] = 1;
  std::size_t found = 0;
  while (!queue.empty()) {
    const Index3 c = queue.front();
    queue.pop_front();
    if (isFrontier(map, c) && ++found >= limit) return found;
    for (const auto& o : kFaceOffsets) {
      const Index3 n(c.x() + o[0], c.y() + o[1], c.z() + o[2]);
      if (!g.inBounds(n)) continue;
      const std::size_t lin = g.linear(n);
      if (mark[lin] || map.state(lin) != VoxelState::kFree) continue;
      mark[lin] = 1;
      if ((g.center(n) - p).squaredNorm() > r2) continue;
      queue.push_back(n);
    }
  }
  return found;
}

void writeMapCsv(const VoxelMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << "ix,iy,iz,state\n";
  for (std::size_t lin = 0; lin < map.size(); ++lin) {
    const VoxelState s = map.state(lin);
    if (s == VoxelState::kUnknown) continue;
    const Index3 i = map.geometry().unravel(lin);
    out << i.x() << ',' << i.y() << ',' << i.z() << ',' << voxelStateName(s) << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

void writeMapRle(const VoxelMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  const auto& g = map.geometry();
  out.precision(17);
  out << "nbvx-map 1\n"
      << g.resolution << ' ' << g.origin.x() << ' ' << g.origin.y() << ' ' << g.origin.z()
      << ' ' << g.dims.x() << ' ' << g.dims.y() << ' ' << g.dims.z() << '\n';
  std::size_t lin = 0;
  while (lin < map.size()) {
    const VoxelState s = map.state(lin);
    std::size_t run = 1;
    while (lin + run < map.size() && map.state(lin + run) == s) ++run;
    out << static_cast<int>(s) << ' ' << run << '\n';
    lin += run;
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

VoxelMap readMapRle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "nbvx-map" || version != 1) {
    throw Error(ErrorKind::kParseError, path + ": not an nbvx map file");
  }
  GridGeometry g;
  in >> g.resolution >> g.origin.x() >> g.origin.y() >> g.origin.z() >> g.dims.x() >>
      g.dims.y() >> g.dims.z();
  if (!in) throw Error(ErrorKind::kParseError, path + ": bad header");
  VoxelMap map(g, VoxelState::kUnknown);
  std::size_t lin = 0;
  int s = 0;
  std::size_t run = 0;
  while (in >> s >> run) {
    if (s < 0 || s > 2 || lin + run > map.size()) {
      throw Error(ErrorKind::kParseError, path + ": corrupt run data");
    }
    for (std::size_t k = 0; k < run; ++k) map.set(lin + k, static_cast<VoxelState>(s));
    lin += run;
  }
  if (lin != map.size()) throw Error(ErrorKind::kParseError, path + ": truncated run data");
  return map;
}

}  // namespace nbvx
