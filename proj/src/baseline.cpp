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

// Receding-horizon next-best-view planner used as the comparison baseline.

#include <chrono>

#include "nbvx/explorer.h"

namespace nbvx {

Trajectory Explorer::straightMove(const Vec3& a, const Vec3& b, double yaw_a,
                                  double yaw_b) const {
  const double v_max = cfg_.limits.v_max;
  const double acc = cfg_.limits.a_max;
  const double delta = wrapAngle(yaw_b - yaw_a);
  const double t_yaw = std::abs(delta) / cfg_.limits.yaw_rate_max;
  const double len = (b - a).norm();
  const auto piece = [](double duration, const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    PolySegment s;
    s.duration = duration;
    s.coeffs = Eigen::MatrixXd::Zero(3, 10);
    s.coeffs.col(0) = c0;
    s.coeffs.col(1) = c1;
    s.coeffs.col(2) = c2;
    return s;
  };
  std::vector<PolySegment> segs;
  double total = 0.0;
  if (len < 1e-9) {
    total = std::max(0.1, t_yaw);
    segs.push_back(piece(total, a, Vec3::Zero(), Vec3::Zero()));
  } else {
    const Vec3 u = (b - a) / len;
    total = std::max(trapezoidDuration(len, v_max, acc), t_yaw);
    // Cruise speed whose trapezoid fills `total` exactly.
    const double disc = std::max(0.0, acc * acc * total * total - 4.0 * acc * len);
    const double v = 0.5 * (acc * total - std::sqrt(disc));
    const double t_ramp = v / acc;
    const double d_ramp = 0.5 * v * t_ramp;
    const double t_cruise = std::max(0.0, total - 2.0 * t_ramp);
    segs.push_back(piece(t_ramp, a, Vec3::Zero(), u * (0.5 * acc * t_ramp * t_ramp)));
    Vec3 at = a + u * d_ramp;
    if (t_cruise > 1e-9) {
      segs.push_back(piece(t_cruise, at, u * (v * t_cruise), Vec3::Zero()));
      at += u * (v * t_cruise);
    }
    segs.push_back(piece(t_ramp, at, u * (v * t_ramp), u * (-0.5 * acc * t_ramp * t_ramp)));
    total = 0.0;
    for (const auto& s : segs) total += s.duration;
  }
  return Trajectory(std::move(segs), {0.0, total}, {yaw_a, yaw_a + delta});
}

StepOutcome Explorer::planBaseline() {
  const auto t0 = std::chrono::steady_clock::now();
  const Clearance clearance(esdf_, cfg_.rrt.robot_radius);
  StepOutcome out;
  out.tier = 1;
  out.seed = pose_.position;

  RrtNode root;
  root.position = pose_.position;
  root.yaw = pose_.yaw;
  RrtTree tree(root);
  std::vector<double> total{0.0};
  int best = -1;
  const auto score = [&](int i) {
    const RrtNode& n = tree.node(i);
    const double g = static_cast<double>(frustumGain(map_, Pose{n.position, n.yaw}, cfg_.sensor)) *
                     std::exp(-cfg_.baseline_lambda * n.cost);
    total.push_back(total[n.parent] + g);
    if (total[i] > 0.0 && (best < 0 || total[i] > total[best])) best = i;
  };

  // Re-insert the remainder of the previous best branch.
  for (const Pose& p : baseline_branch_) {
    const int parent = tree.size() - 1;
    const Vec3& from = tree.node(parent).position;
    if ((p.position - from).norm() < 1e-9 || !clearance.segmentValid(from, p.position)) break;
    RrtNode n;
    n.position = p.position;
    n.yaw = p.yaw;
    n.parent = parent;
    n.cost = tree.node(parent).cost + (p.position - from).norm();
    score(tree.add(n));
  }

  const int cap = cfg_.rrt.sample_budget;
  while (out.samples_used < cap && (out.samples_used < cfg_.baseline_min_samples || best < 0)) {
    ++out.samples_used;
    Vec3 sample;
    try {
      sample = samplePosition(SamplingBounds::fullFreeSpace(), map_, clearance, cfg_.rrt, rng_);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kNoFreeSample) continue;
      throw;
    }
    const double yaw = uniform(rng_, -kPi, kPi);
    const ExtendResult ext = extend(tree, sample, clearance, cfg_.rrt.step_max);
    if (ext.status != ExtendStatus::kAdded) continue;
    tree.mutableNode(ext.node).yaw = yaw;
    score(ext.node);
  }

  if (best < 0) {
    baseline_branch_.clear();
    out.kind = StepOutcome::Kind::kExhausted;
    out.computation_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }

  const std::vector<int> chain = tree.branchIndices(best);
  const RrtNode& next = tree.node(chain[1]);
  baseline_branch_.clear();
  for (std::size_t k = 2; k < chain.size(); ++k) {
    baseline_branch_.push_back(Pose{tree.node(chain[k]).position, tree.node(chain[k]).yaw});
  }
  out.kind = StepOutcome::Kind::kExecuted;
  out.nbv = Pose{next.position, next.yaw};
  out.gain = static_cast<long>(std::lround(total[best]));
  out.path = {pose_.position, next.position};
  out.trajectory = straightMove(pose_.position, next.position, pose_.yaw, next.yaw);
  out.computation_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace nbvx
