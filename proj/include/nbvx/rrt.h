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

#ifndef NBVX_RRT_H_
#define NBVX_RRT_H_

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "nbvx/esdf.h"
#include "nbvx/gain.h"

namespace nbvx {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

struct RrtConfig {
  double step_max = 1.5;
  double robot_radius = 0.5;
  int sample_budget = 400;
  int retry_budget = 100;
  double vicinity_radius = 4.0;
  /// Skip growth when no frontier is reachable within the region any tree
  /// node could observe from.
  bool prune_unobservable = true;

  void validate() const;
};

struct SamplingBounds {
  enum class Kind { kVicinity, kFullFreeSpace };
  Kind kind = Kind::kFullFreeSpace;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;

  static SamplingBounds vicinity(const Vec3& c, double r) { return {Kind::kVicinity, c, r}; }
  static SamplingBounds fullFreeSpace() { return {}; }
};

struct RrtNode {
  Vec3 position;
  double yaw = 0.0;
  long gain = 0;
  int parent = -1;
  double cost = 0.0;  // path length from the root
};

class RrtTree {
 public:
  explicit RrtTree(const RrtNode& root) { nodes_.push_back(root); }

  const std::vector<RrtNode>& nodes() const { return nodes_; }
  const RrtNode& node(int i) const { return nodes_[i]; }
  RrtNode& mutableNode(int i) { return nodes_[i]; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int add(const RrtNode& n) {
    nodes_.push_back(n);
    return size() - 1;
  }
  int nearest(const Vec3& p) const;
  /// Root-to-node positions.
  std::vector<Vec3> branch(int i) const;
  /// Root-to-node node indices.
  std::vector<int> branchIndices(int i) const;

 private:
  std::vector<RrtNode> nodes_;
};

/// Uniform sample of a clearance-valid point inside the bounds. Throws
/// kNoFreeSample after cfg.retry_budget rejected draws.
Vec3 samplePosition(const SamplingBounds& bounds, const VoxelMap& map, const Clearance& clearance,
                    const RrtConfig& cfg, Rng& rng);

enum class ExtendStatus { kAdded, kCollision, kDegenerate };

struct ExtendResult {
  ExtendStatus status = ExtendStatus::kDegenerate;
  int node = -1;
  int parent = -1;
  Vec3 position = Vec3::Zero();
};

/// Connects the sample (truncated to step_max) to its nearest tree node when
/// the segment keeps clearance. The added node has zero gain; the caller
/// scores it.
ExtendResult extend(RrtTree& tree, const Vec3& sample, const Clearance& clearance,
                    double step_max);

struct PlanResult {
  bool found = false;
  std::vector<Vec3> branch;
  double terminal_yaw = 0.0;
  long terminal_gain = 0;
  int samples_used = 0;
  int tree_size = 0;
};

/// Grows a tree from `seed` until the first node whose optimized gain reaches
/// g_zero, or until `budget` samples are spent. With `seed_yaw` the root is
/// rejected when its optimal heading lies within half a slice of that yaw.
/// Throws kSeedInvalid.
PlanResult growUntilGain(const Vec3& seed, const SamplingBounds& bounds, const VoxelMap& map,
                         const Clearance& clearance, const SensorModel& model,
                         const GainConfig& gain_cfg, const RrtConfig& cfg, int budget, Rng& rng,
                         std::optional<double> seed_yaw = std::nullopt);

}  // namespace nbvx

#endif  // NBVX_RRT_H_
