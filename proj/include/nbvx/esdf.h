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

#ifndef NBVX_ESDF_H_
#define NBVX_ESDF_H_

#include <span>
#include <vector>

#include "nbvx/voxel_map.h"

namespace nbvx {

/// Unsigned distance (meters) from each cell center to the nearest blocking
/// cell center, truncated at max_distance. Occupied and unknown cells block,
/// as does the grid exterior.
class EsdfField {
 public:
  EsdfField() = default;
  EsdfField(const GridGeometry& geometry, double max_distance, std::vector<double> distances)
      : geometry_(geometry), max_distance_(max_distance), distances_(std::move(distances)) {}

  const GridGeometry& geometry() const { return geometry_; }
  double maxDistance() const { return max_distance_; }
  std::span<const double> values() const { return distances_; }

  double distance(const Index3& idx) const {
    return geometry_.inBounds(idx) ? distances_[geometry_.linear(idx)] : 0.0;
  }
  double distance(std::size_t lin) const { return distances_[lin]; }
  /// Value of the cell containing p.
  double distanceAt(const Vec3& p) const { return distance(geometry_.indexOf(p)); }
  /// Trilinear interpolation between cell centers, clamped at the grid edge.
  double interpolate(const Vec3& p) const;

 private:
  GridGeometry geometry_;
  double max_distance_ = 0.0;
  std::vector<double> distances_;
};

/// Exact Euclidean distance transform (separable lower-envelope method),
/// truncated at d_max.
EsdfField computeEsdf(const VoxelMap& map, double d_max);

/// Central difference of the interpolated field with a 0.1 * resolution step.
Vec3 esdfGradient(const EsdfField& field, const Vec3& p);

/// Robot clearance queries against an ESDF snapshot. Points are checked by
/// the value of their cell; segments check every cell they pierce.
class Clearance {
 public:
  Clearance(const EsdfField& esdf, double robot_radius) : esdf_(&esdf), radius_(robot_radius) {}

  const EsdfField& esdf() const { return *esdf_; }
  double radius() const { return radius_; }

  double at(const Vec3& p) const { return esdf_->distanceAt(p); }
  bool pointValid(const Vec3& p) const { return at(p) >= radius_; }
  bool segmentValid(const Vec3& a, const Vec3& b) const;
  bool polylineValid(std::span<const Vec3> points) const;

 private:
  const EsdfField* esdf_;
  double radius_;
};

}  // namespace nbvx

#endif  // NBVX_ESDF_H_
