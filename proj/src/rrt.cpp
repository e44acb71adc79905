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

#include "nbvx/rrt.h"

#include <algorithm>
#include <limits>

namespace nbvx {

void RrtConfig::validate() const {
  if (!(step_max > 0.0)) throw Error(ErrorKind::kInvalidArgument, "step_max must be positive");
  if (!(robot_radius > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "robot_radius must be positive");
  }
  if (sample_budget < 0) throw Error(ErrorKind::kInvalidArgument, "sample_budget must be >= 0");
  if (retry_budget < 1) throw Error(ErrorKind::kInvalidArgument, "retry_budget must be >= 1");
  if (!(vicinity_radius > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "vicinity_radius must be positive");
  }
}

int RrtTree::nearest(const Vec3& p) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    const double d = (nodes_[i].position - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::vector<int> RrtTree::branchIndices(int i) const {
  std::vector<int> out;
  for (int k = i; k >= 0; k = nodes_[k].parent) out.push_back(k);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Vec3> RrtTree::branch(int i) const {
  std::vector<Vec3> out;
  for (int k : branchIndices(i)) out.push_back(nodes_[k].position);
  return out;
}

Vec3 samplePosition(const SamplingBounds& bounds, const VoxelMap& map, const Clearance& clearance,
                    const RrtConfig& cfg, Rng& rng) {
  const GridGeometry& g = map.geometry();
  Vec3 lo = g.minCorner();
  Vec3 hi = g.maxCorner();
  if (bounds.kind == SamplingBounds::Kind::kVicinity) {
    lo = lo.cwiseMax(bounds.center - Vec3::Constant(bounds.radius));
    hi = hi.cwiseMin(bounds.center + Vec3::Constant(bounds.radius));
  }
  if ((hi.array() <= lo.array()).any()) {
    throw Error(ErrorKind::kNoFreeSample, "sampling bounds do not intersect the map");
  }
  const double r2 = bounds.radius * bounds.radius;
  for (int attempt = 0; attempt < cfg.retry_budget; ++attempt) {
    const Vec3 p(uniform(rng, lo.x(), hi.x()), uniform(rng, lo.y(), hi.y()),
                 uniform(rng, lo.z(), hi.z()));
    if (bounds.kind == SamplingBounds::Kind::kVicinity && (p - bounds.center).squaredNorm() > r2) {
      continue;
    }
    if (map.stateAt(p) == VoxelState::kFree && clearance.pointValid(p)) return p;
  }
  throw Error(ErrorKind::kNoFreeSample, "no clearance-valid sample within retry budget");
}

ExtendResult extend(RrtTree& tree, const Vec3& sample, const Clearance& clearance,
                    double step_max) {
  ExtendResult res;
  res.parent = tree.nearest(sample);
  const Vec3& from = tree.node(res.parent).position;
  Vec3 d = sample - from;
  const double len = d.norm();
  if (len < 1e-9) return res;
  if (len > step_max) d *= step_max / len;
  res.position = from + d;
  if (!clearance.segmentValid(from, res.position)) {
    res.status = ExtendStatus::kCollision;
    return res;
  }
  RrtNode n;
  n.position = res.position;
  n.parent = res.parent;
  n.cost = tree.node(res.parent).cost + d.norm();
  res.node = tree.add(n);
  res.status = ExtendStatus::kAdded;
  return res;
}

PlanResult growUntilGain(const Vec3& seed, const SamplingBounds& bounds, const VoxelMap& map,
                         const Clearance& clearance, const SensorModel& model,
                         const GainConfig& gain_cfg, const RrtConfig& cfg, int budget, Rng& rng,
                         std::optional<double> seed_yaw) {
  if (map.stateAt(seed) != VoxelState::kFree || !clearance.pointValid(seed)) {
    throw Error(ErrorKind::kSeedInvalid, "RRT seed lacks clearance");
  }
  PlanResult out;
  RrtNode root;
  root.position = seed;
  const YawChoice root_yaw = optimizeYaw(map, seed, model, gain_cfg);
  root.yaw = root_yaw.theta;
  root.gain = root_yaw.gain;
  RrtTree tree(root);
  const auto accept = [&](int i) {
    const RrtNode& n = tree.node(i);
    out.found = true;
    out.branch = tree.branch(i);
    out.terminal_yaw = n.yaw;
    out.terminal_gain = n.gain;
    out.tree_size = tree.size();
  };
  const bool root_seen =
      seed_yaw && std::abs(wrapAngle(root.yaw - *seed_yaw)) <= 0.5 * gain_cfg.delta_theta;
  if (root.gain >= gain_cfg.g_zero && !root_seen) {
    accept(0);
    return out;
  }
  if (cfg.prune_unobservable) {
    const double reach =
        bounds.kind == SamplingBounds::Kind::kVicinity
            ? (bounds.center - seed).norm() + bounds.radius + model.range +
                  std::sqrt(3.0) * map.resolution()
            : std::numeric_limits<double>::infinity();
    // No reachable frontier, no gain.
    if (frontiersWithin(map, seed, reach, 1) == 0) {
      out.tree_size = tree.size();
      return out;
    }
  }

  while (out.samples_used < budget) {
    ++out.samples_used;
    Vec3 sample;
    try {
      sample = samplePosition(bounds, map, clearance, cfg, rng);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kNoFreeSample) continue;
      throw;
    }
    const ExtendResult ext = extend(tree, sample, clearance, cfg.step_max);
    if (ext.status != ExtendStatus::kAdded) continue;
    const YawChoice y = optimizeYaw(map, ext.position, model, gain_cfg);
    RrtNode& n = tree.mutableNode(ext.node);
    n.yaw = y.theta;
    n.gain = y.gain;
    if (y.gain >= gain_cfg.g_zero) {
      accept(ext.node);
      return out;
    }
  }
  out.tree_size = tree.size();
  return out;
}

}  // namespace nbvx
