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

#ifndef NBVX_VOXEL_MAP_H_
#define NBVX_VOXEL_MAP_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbvx/common.h"

namespace nbvx {

enum class VoxelState : std::uint8_t { kUnknown = 0, kFree = 1, kOccupied = 2 };

std::string_view voxelStateName(VoxelState s);

/// Axis-aligned voxel lattice. Cell (i, j, k) spans
/// [origin + (i, j, k) * resolution, origin + (i + 1, j + 1, k + 1) * resolution).
struct GridGeometry {
  double resolution = 0.2;
  Vec3 origin = Vec3::Zero();
  Index3 dims = Index3::Ones();

  std::size_t size() const {
    return static_cast<std::size_t>(dims.x()) * dims.y() * dims.z();
  }
  bool inBounds(const Index3& idx) const {
    return idx.x() >= 0 && idx.y() >= 0 && idx.z() >= 0 && idx.x() < dims.x() &&
           idx.y() < dims.y() && idx.z() < dims.z();
  }
  std::size_t linear(const Index3& idx) const {
    return static_cast<std::size_t>(idx.x()) +
           static_cast<std::size_t>(dims.x()) *
               (static_cast<std::size_t>(idx.y()) +
                static_cast<std::size_t>(dims.y()) * idx.z());
  }
  Index3 unravel(std::size_t lin) const {
    const auto nx = static_cast<std::size_t>(dims.x());
    const auto ny = static_cast<std::size_t>(dims.y());
    return Index3(static_cast<int>(lin % nx), static_cast<int>((lin / nx) % ny),
                  static_cast<int>(lin / (nx * ny)));
  }
  Index3 indexOf(const Vec3& p) const {
    const Vec3 g = (p - origin) / resolution;
    return Index3(static_cast<int>(std::floor(g.x())), static_cast<int>(std::floor(g.y())),
                  static_cast<int>(std::floor(g.z())));
  }
  Vec3 center(const Index3& idx) const {
    return origin + (idx.cast<double>() + Vec3::Constant(0.5)) * resolution;
  }
  Vec3 minCorner() const { return origin; }
  Vec3 maxCorner() const { return origin + dims.cast<double>() * resolution; }
};

/// Occupancy grid. Anything outside the grid reads as occupied.
class VoxelMap {
 public:
  VoxelMap() = default;
  VoxelMap(const GridGeometry& geometry, VoxelState fill);

  const GridGeometry& geometry() const { return geometry_; }
  double resolution() const { return geometry_.resolution; }
  const Vec3& origin() const { return geometry_.origin; }
  const Index3& dims() const { return geometry_.dims; }
  std::size_t size() const { return cells_.size(); }

  bool inBounds(const Index3& idx) const { return geometry_.inBounds(idx); }
  VoxelState state(const Index3& idx) const {
    return inBounds(idx) ? cells_[geometry_.linear(idx)] : VoxelState::kOccupied;
  }
  VoxelState state(std::size_t lin) const { return cells_[lin]; }
  VoxelState stateAt(const Vec3& p) const { return state(geometry_.indexOf(p)); }

  void set(const Index3& idx, VoxelState s) { cells_[geometry_.linear(idx)] = s; }
  void set(std::size_t lin, VoxelState s) { cells_[lin] = s; }

  std::size_t count(VoxelState s) const;
  std::span<const VoxelState> cells() const { return cells_; }

  bool operator==(const VoxelMap& other) const {
    return geometry_.resolution == other.geometry_.resolution &&
           geometry_.origin == other.geometry_.origin && geometry_.dims == other.geometry_.dims &&
           cells_ == other.cells_;
  }

 private:
  GridGeometry geometry_;
  std::vector<VoxelState> cells_;
};

enum class RayTermination { kReachedEnd, kHitOccupied, kLeftBounds };

/// Incremental grid traversal (Amanatides & Woo). Calls
/// visit(index, linear_index, t_enter) for every pierced cell in increasing
/// ray-parameter order; a visitor returning true stops the walk with
/// kHitOccupied. Ties between axes step x before y before z. `dir` must be unit
/// length so t is metric.
template <typename Visitor>
RayTermination traverseGrid(const GridGeometry& g, const Vec3& origin, const Vec3& dir,
                            double max_range, Visitor&& visit) {
  const double r = g.resolution;
  const Vec3 p = (origin - g.origin) / r;
  Index3 cell(static_cast<int>(std::floor(p.x())), static_cast<int>(std::floor(p.y())),
              static_cast<int>(std::floor(p.z())));
  if (!g.inBounds(cell)) return RayTermination::kLeftBounds;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  int step[3];
  double t_max[3];
  double t_delta[3];
  const long stride[3] = {1, static_cast<long>(g.dims.x()),
                          static_cast<long>(g.dims.x()) * g.dims.y()};
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 0.0) {
      step[a] = 1;
      t_max[a] = (cell[a] + 1 - p[a]) * r / dir[a];
      t_delta[a] = r / dir[a];
    } else if (dir[a] < 0.0) {
      step[a] = -1;
      t_max[a] = (cell[a] - p[a]) * r / dir[a];
      t_delta[a] = -r / dir[a];
    } else {
      step[a] = 0;
      t_max[a] = kInf;
      t_delta[a] = kInf;
    }
  }

  long lin = static_cast<long>(g.linear(cell));
  double t = 0.0;
  while (true) {
    if (visit(static_cast<const Index3&>(cell), static_cast<std::size_t>(lin), t)) {
      return RayTermination::kHitOccupied;
    }
    int a = t_max[0] <= t_max[1] ? (t_max[0] <= t_max[2] ? 0 : 2)
                                 : (t_max[1] <= t_max[2] ? 1 : 2);
    t = t_max[a];
    if (t >= max_range) return RayTermination::kReachedEnd;
    cell[a] += step[a];
    if (cell[a] < 0 || cell[a] >= g.dims[a]) return RayTermination::kLeftBounds;
    lin += step[a] * stride[a];
    t_max[a] += t_delta[a];
  }
}

struct RayHit {
  RayTermination kind = RayTermination::kReachedEnd;
  /// Cells traversed before stopping; excludes the occupied cell.
  std::vector<Index3> visited;
  std::optional<Index3> hit;
  /// Ray parameter at which the occupied cell was entered.
  double hit_distance = 0.0;
};

/// Walks the map from `origin` along unit `dir`. Only occupied cells (and the
/// grid boundary) stop the ray; unknown cells are passed through.
RayHit raycast(const VoxelMap& map, const Vec3& origin, const Vec3& dir, double max_range);

/// Free cell with at least one unknown face neighbour.
bool isFrontier(const VoxelMap& map, const Index3& idx);
std::size_t countFrontiers(const VoxelMap& map);

/// Marks free cells 6-connected to `start` through free cells. Empty when the
/// start cell is not free.
std::vector<std::uint8_t> reachableFree(const VoxelMap& map, const Index3& start);

/// Breadth-first search over free cells from the cell containing `p`, limited
/// to cell centers within `radius` of p. Returns the number of frontier cells
/// found, stopping early once `limit` is reached.
std::size_t frontiersWithin(const VoxelMap& map, const Vec3& p, double radius,
                            std::size_t limit = std::numeric_limits<std::size_t>::max());

/// Writes `ix,iy,iz,state` rows for every known cell.
void writeMapCsv(const VoxelMap& map, const std::string& path);

/// Compact run-length text encoding used for run directories.
void writeMapRle(const VoxelMap& map, const std::string& path);
VoxelMap readMapRle(const std::string& path);

}  // namespace nbvx

#endif  // NBVX_VOXEL_MAP_H_
