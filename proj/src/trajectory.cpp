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

#include "nbvx/trajectory.h"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace nbvx {

void DynamicLimits::validate() const {
  if (!(v_max > 0.0 && a_max > 0.0 && yaw_rate_max > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "dynamic limits must be positive");
  }
}

namespace {

// d^n/dtau^n of tau^k, i.e. k! / (k - n)! tau^(k - n).
double basisDerivative(int k, int n, double tau) {
  if (k < n) return 0.0;
  double f = 1.0;
  for (int j = 0; j < n; ++j) f *= k - j;
  return f * std::pow(tau, k - n);
}

// Snap Gram matrix on [0, 1] in normalized time.
Eigen::MatrixXd snapGram(int nc) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(nc, nc);
  for (int k = 4; k < nc; ++k) {
    for (int l = 4; l < nc; ++l) {
      const double ck = static_cast<double>(k) * (k - 1) * (k - 2) * (k - 3);
      const double cl = static_cast<double>(l) * (l - 1) * (l - 2) * (l - 3);
      q(k, l) = ck * cl / (k + l - 7);
    }
  }
  return q;
}

}  // namespace

Trajectory::Trajectory(std::vector<PolySegment> segments, std::vector<double> yaw_times,
                       std::vector<double> yaw_values)
    : segments_(std::move(segments)),
      yaw_times_(std::move(yaw_times)),
      yaw_values_(std::move(yaw_values)) {
  starts_.reserve(segments_.size());
  total_ = 0.0;
  for (const auto& s : segments_) {
    starts_.push_back(total_);
    total_ += s.duration;
  }
}

int Trajectory::segmentAt(double t) const {
  if (segments_.empty()) return -1;
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  const int i = static_cast<int>(it - starts_.begin()) - 1;
  return std::clamp(i, 0, numSegments() - 1);
}

Vec3 Trajectory::segmentDerivative(int i, double tau, int n) const {
  const PolySegment& s = segments_[i];
  const int nc = static_cast<int>(s.coeffs.cols());
  Vec3 out = Vec3::Zero();
  for (int k = n; k < nc; ++k) out += s.coeffs.col(k) * basisDerivative(k, n, tau);
  return out / std::pow(s.duration, n);
}

Vec3 Trajectory::derivative(double t, int n) const {
  const int i = segmentAt(t);
  if (i < 0) return Vec3::Zero();
  const double tau = std::clamp((t - starts_[i]) / segments_[i].duration, 0.0, 1.0);
  return segmentDerivative(i, tau, n);
}

double Trajectory::yaw(double t) const {
  if (yaw_times_.empty()) return 0.0;
  if (t <= yaw_times_.front()) return wrapAngle(yaw_values_.front());
  if (t >= yaw_times_.back()) return wrapAngle(yaw_values_.back());
  const auto it = std::upper_bound(yaw_times_.begin(), yaw_times_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - yaw_times_.begin());
  const double t0 = yaw_times_[j - 1];
  const double t1 = yaw_times_[j];
  const double a = t1 > t0 ? (t - t0) / (t1 - t0) : 1.0;
  return wrapAngle(yaw_values_[j - 1] + a * (yaw_values_[j] - yaw_values_[j - 1]));
}

double Trajectory::yawRate(double t) const {
  if (yaw_times_.size() < 2) return 0.0;
  const auto it = std::upper_bound(yaw_times_.begin(), yaw_times_.end(), t);
  std::size_t j = static_cast<std::size_t>(it - yaw_times_.begin());
  j = std::clamp<std::size_t>(j, 1, yaw_times_.size() - 1);
  const double dt = yaw_times_[j] - yaw_times_[j - 1];
  return dt > 0.0 ? (yaw_values_[j] - yaw_values_[j - 1]) / dt : 0.0;
}

double Trajectory::snapCost() const {
  double cost = 0.0;
  for (const auto& s : segments_) {
    const Eigen::MatrixXd q = snapGram(static_cast<int>(s.coeffs.cols()));
    for (int a = 0; a < 3; ++a) {
      const Eigen::VectorXd c = s.coeffs.row(a).transpose();
      cost += c.dot(q * c) / std::pow(s.duration, 7);
    }
  }
  return cost;
}

void Trajectory::writeCsv(const std::string& path, double dt) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << "t,x,y,z,yaw,vx,vy,vz\n";
  const int n = static_cast<int>(std::ceil(total_ / dt - 1e-9));
  for (int k = 0; k <= n; ++k) {
    const double t = std::min(k * dt, total_);
    const Vec3 p = position(t);
    const Vec3 v = velocity(t);
    out << t << ',' << p.x() << ',' << p.y() << ',' << p.z() << ',' << yaw(t) << ',' << v.x()
        << ',' << v.y() << ',' << v.z() << '\n';
  }
}

double pathLength(const std::vector<Vec3>& waypoints) {
  double l = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) l += (waypoints[i] - waypoints[i - 1]).norm();
  return l;
}

std::vector<Vec3> simplify(const std::vector<Vec3>& waypoints, const Clearance& clearance) {
  if (waypoints.size() <= 2) return waypoints;
  std::vector<Vec3> out{waypoints.front()};
  const std::size_t n = waypoints.size();
  std::size_t i = 0;
  while (i + 1 < n) {
    std::size_t next = i + 1;
    for (std::size_t j = n - 1; j > i + 1; --j) {
      if (clearance.segmentValid(waypoints[i], waypoints[j])) {
        next = j;
        break;
      }
    }
    out.push_back(waypoints[next]);
    i = next;
  }
  return out;
}

std::vector<Vec3> densify(const std::vector<Vec3>& waypoints, double spacing) {
  if (waypoints.empty()) return {};
  std::vector<Vec3> out{waypoints.front()};
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const Vec3& a = waypoints[i - 1];
    const Vec3& b = waypoints[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / spacing - 1e-9)));
    for (int k = 1; k < pieces; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
    out.push_back(b);
  }
  return out;
}

double trapezoidDuration(double length, double v_max, double a_max) {
  if (length <= 0.0) return 0.0;
  if (length >= v_max * v_max / a_max) return length / v_max + v_max / a_max;
  return 2.0 * std::sqrt(length / a_max);
}

namespace {

// Time at which a rest-to-rest trapezoidal profile over `total` reaches s.
double trapezoidTimeAt(double s, double total, double v, double a) {
  const double duration = trapezoidDuration(total, v, a);
  double ramp = v * v / (2.0 * a);
  if (total < 2.0 * ramp) ramp = 0.5 * total;
  const double t_ramp = std::sqrt(2.0 * ramp / a);
  if (s <= ramp) return std::sqrt(2.0 * s / a);
  if (s >= total - ramp) return duration - std::sqrt(2.0 * std::max(0.0, total - s) / a);
  return t_ramp + (s - ramp) / v;
}

}  // namespace

std::vector<double> allocateTimes(const std::vector<Vec3>& waypoints,
                                  const DynamicLimits& limits) {
  const double total = pathLength(waypoints);
  std::vector<double> durations;
  double s = 0.0;
  double t_prev = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    s += (waypoints[i] - waypoints[i - 1]).norm();
    const double t = trapezoidTimeAt(std::min(s, total), total, limits.v_max, limits.a_max);
    durations.push_back(std::max(t - t_prev, 1e-3));
    t_prev = t;
  }
  return durations;
}

Trajectory fitPolynomial(const std::vector<Vec3>& waypoints, std::vector<double> durations,
                         int order, const std::vector<double>& yaws, double yaw_rate_max) {
  const int n_wp = static_cast<int>(waypoints.size());
  if (n_wp < 2) throw Error(ErrorKind::kInvalidArgument, "need at least two waypoints");
  if (static_cast<int>(durations.size()) != n_wp - 1) {
    throw Error(ErrorKind::kInvalidArgument, "need one duration per segment");
  }
  if (order < 7) throw Error(ErrorKind::kInvalidArgument, "polynomial order must be >= 7");
  for (int i = 0; i + 1 < n_wp; ++i) {
    if ((waypoints[i + 1] - waypoints[i]).norm() < 1e-9) {
      throw Error(ErrorKind::kSingularSystem, "duplicate consecutive waypoints");
    }
    if (!(durations[i] > 0.0) || !std::isfinite(durations[i])) {
      throw Error(ErrorKind::kSingularSystem, "segment durations must be positive");
    }
  }

  std::vector<double> yaw_values;
  if (static_cast<int>(yaws.size()) == n_wp) {
    yaw_values.push_back(yaws.front());
    for (int i = 1; i < n_wp; ++i) {
      yaw_values.push_back(yaw_values.back() + wrapAngle(yaws[i] - yaw_values.back()));
    }
    for (int i = 0; i + 1 < n_wp; ++i) {
      const double need = std::abs(yaw_values[i + 1] - yaw_values[i]) / yaw_rate_max;
      durations[i] = std::max(durations[i], need);
    }
  } else {
    yaw_values.assign(n_wp, yaws.empty() ? 0.0 : yaws.front());
  }

  const int m = n_wp - 1;
  const int nc = order + 1;
  const int n_var = m * nc;
  const int n_con = 2 * m + 4 + 3 * (m - 1);
  const int n_kkt = n_var + n_con;

  // Cost weights normalized by the mean segment duration.
  const double t_mean = std::accumulate(durations.begin(), durations.end(), 0.0) / m;
  const Eigen::MatrixXd gram = snapGram(nc);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(m * nc * nc + 2 * nc * n_con));
  for (int i = 0; i < m; ++i) {
    const double w = std::pow(t_mean / durations[i], 7);
    for (int a = 0; a < nc; ++a) {
      for (int b = 0; b < nc; ++b) entries.emplace_back(i * nc + a, i * nc + b, 2.0 * w * gram(a, b));
    }
  }
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n_kkt, 3);
  int row = n_var;
  const auto put = [&](int seg, int deriv, double tau, double scale) {
    for (int k = 0; k < nc; ++k) {
      const double v = scale * basisDerivative(k, deriv, tau);
      if (v == 0.0) continue;
      entries.emplace_back(row, seg * nc + k, v);
      entries.emplace_back(seg * nc + k, row, v);
    }
  };
  for (int i = 0; i < m; ++i) {
    put(i, 0, 0.0, 1.0);
    rhs.row(row++) = waypoints[i].transpose();
    put(i, 0, 1.0, 1.0);
    rhs.row(row++) = waypoints[i + 1].transpose();
  }
  for (int d = 1; d <= 2; ++d) {
    put(0, d, 0.0, 1.0);
    ++row;
    put(m - 1, d, 1.0, 1.0);
    ++row;
  }
  for (int i = 0; i + 1 < m; ++i) {
    for (int d = 1; d <= 3; ++d) {
      put(i, d, 1.0, 1.0);
      put(i + 1, d, 0.0, -std::pow(durations[i] / durations[i + 1], d));
      ++row;
    }
  }

  Eigen::SparseMatrix<double> kkt(n_kkt, n_kkt);
  kkt.setFromTriplets(entries.begin(), entries.end());
  kkt.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(kkt);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingularSystem, "min-snap system is degenerate");
  }
  const Eigen::MatrixXd sol = lu.solve(rhs);
  const double residual = (kkt * sol - rhs).cwiseAbs().maxCoeff();
  const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
  if (!sol.allFinite() || residual > 1e-7 * scale) {
    throw Error(ErrorKind::kSingularSystem, "min-snap system is degenerate");
  }

  std::vector<PolySegment> segs(m);
  std::vector<double> yaw_times{0.0};
  for (int i = 0; i < m; ++i) {
    segs[i].duration = durations[i];
    segs[i].coeffs = sol.block(i * nc, 0, nc, 3).transpose();
    yaw_times.push_back(yaw_times.back() + durations[i]);
  }
  return Trajectory(std::move(segs), std::move(yaw_times), std::move(yaw_values));
}

FeasibilityReport checkTrajectory(const Trajectory& traj, const Clearance& clearance,
                                  const DynamicLimits& limits, double dt) {
  FeasibilityReport rep;
  const double total = traj.duration();
  const int n = std::max(1, static_cast<int>(std::ceil(total / dt - 1e-9)));
  for (int k = 0; k <= n; ++k) {
    const double t = std::min(k * dt, total);
    const double v = traj.velocity(t).norm();
    const double a = traj.acceleration(t).norm();
    const double c = clearance.at(traj.position(t));
    rep.max_speed = std::max(rep.max_speed, v);
    rep.max_accel = std::max(rep.max_accel, a);
    rep.min_clearance = std::min(rep.min_clearance, c);
    if (c < clearance.radius() && !rep.clearance_violation) {
      rep.clearance_violation = true;
      rep.violation_time = t;
      rep.violation_segment = traj.segmentAt(t);
    }
  }
  rep.speed_violation = rep.max_speed > 1.01 * limits.v_max;
  rep.accel_violation = rep.max_accel > 1.01 * limits.a_max;
  rep.feasible = !rep.speed_violation && !rep.accel_violation && !rep.clearance_violation;
  return rep;
}

RepairResult repair(const std::vector<Vec3>& waypoints, const std::vector<double>& yaws,
                    const Clearance& clearance, const DynamicLimits& limits,
                    const SmoothingConfig& cfg) {
  RepairResult res;
  res.knots = waypoints;
  std::vector<double> ys = yaws;
  if (ys.size() != waypoints.size()) ys.assign(waypoints.size(), yaws.empty() ? 0.0 : yaws[0]);
  std::vector<double> durations = allocateTimes(res.knots, limits);
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    res.iterations = iter;
    Trajectory traj =
        fitPolynomial(res.knots, durations, cfg.order, ys, limits.yaw_rate_max);
    for (int i = 0; i < traj.numSegments(); ++i) durations[i] = traj.segments()[i].duration;
    const FeasibilityReport rep = checkTrajectory(traj, clearance, limits, cfg.check_dt);
    if (rep.feasible) {
      res.trajectory = std::move(traj);
      return res;
    }
    if (rep.clearance_violation) {
      const int s = rep.violation_segment;
      const Vec3 mid = 0.5 * (res.knots[s] + res.knots[s + 1]);
      const double y_mid = ys[s] + 0.5 * wrapAngle(ys[s + 1] - ys[s]);
      res.knots.insert(res.knots.begin() + s + 1, mid);
      ys.insert(ys.begin() + s + 1, y_mid);
      const double half = 0.5 * durations[s];
      durations[s] = half;
      durations.insert(durations.begin() + s + 1, half);
      ++res.inserted;
    } else {
      const double need = std::max(rep.max_speed / limits.v_max,
                                   std::sqrt(rep.max_accel / limits.a_max));
      const double f = std::max(1.1, need);
      for (double& d : durations) d *= f;
    }
  }
  throw Error(ErrorKind::kRepairFailed, "trajectory still infeasible after iteration cap");
}

std::vector<double> rampYaw(const std::vector<Vec3>& waypoints, double yaw_start,
                            double yaw_end) {
  const double total = pathLength(waypoints);
  const double delta = wrapAngle(yaw_end - yaw_start);
  std::vector<double> out;
  double s = 0.0;
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (i > 0) s += (waypoints[i] - waypoints[i - 1]).norm();
    const double frac = total > 0.0 ? s / total : 1.0;
    out.push_back(yaw_start + frac * delta);
  }
  return out;
}

namespace {

Trajectory concatenate(const std::vector<Trajectory>& parts) {
  std::vector<PolySegment> segs;
  std::vector<double> yaw_times;
  std::vector<double> yaw_values;
  double offset = 0.0;
  for (const auto& p : parts) {
    for (const auto& s : p.segments()) segs.push_back(s);
    for (std::size_t k = 0; k < p.yawTimes().size(); ++k) {
      if (!yaw_times.empty() && k == 0) continue;
      yaw_times.push_back(offset + p.yawTimes()[k]);
      double y = p.yawValues()[k];
      if (!yaw_values.empty()) y = yaw_values.back() + wrapAngle(y - yaw_values.back());
      yaw_values.push_back(y);
    }
    offset += p.duration();
  }
  return Trajectory(std::move(segs), std::move(yaw_times), std::move(yaw_values));
}

// Constant-position piece that only turns in place.
Trajectory hover(const Vec3& p, double yaw_start, double yaw_end, double yaw_rate_max) {
  const double delta = wrapAngle(yaw_end - yaw_start);
  PolySegment s;
  s.duration = std::max(0.1, std::abs(delta) / yaw_rate_max);
  s.coeffs = Eigen::MatrixXd::Zero(3, 10);
  s.coeffs.col(0) = p;
  return Trajectory({s}, {0.0, s.duration}, {yaw_start, yaw_start + delta});
}

}  // namespace

Trajectory stopAndGo(const std::vector<Vec3>& waypoints, const std::vector<double>& yaws,
                     const Clearance& clearance, const DynamicLimits& limits,
                     const SmoothingConfig& cfg) {
  std::vector<Trajectory> parts;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const std::vector<Vec3> edge{waypoints[i], waypoints[i + 1]};
    const std::vector<double> ey{yaws[i], yaws[i + 1]};
    double t = trapezoidDuration((edge[1] - edge[0]).norm(), limits.v_max, limits.a_max);
    Trajectory piece = fitPolynomial(edge, {t}, cfg.order, ey, limits.yaw_rate_max);
    // Single rescale onto the binding limit.
    FeasibilityReport rep = checkTrajectory(piece, clearance, limits, cfg.check_dt);
    const double f = std::max(rep.max_speed / limits.v_max, std::sqrt(rep.max_accel / limits.a_max));
    t = std::max(piece.duration() * f, std::abs(ey[1] - ey[0]) / limits.yaw_rate_max);
    parts.push_back(fitPolynomial(edge, {t}, cfg.order, ey, limits.yaw_rate_max));
  }
  if (parts.empty()) {
    return hover(waypoints.front(), yaws.front(), yaws.back(), limits.yaw_rate_max);
  }
  return concatenate(parts);
}

namespace {

std::vector<Vec3> dedupe(const std::vector<Vec3>& pts) {
  std::vector<Vec3> out;
  for (const Vec3& p : pts) {
    if (out.empty() || (p - out.back()).norm() > 1e-6) out.push_back(p);
  }
  return out;
}

}  // namespace

SmoothedPath smoothBranch(const std::vector<Vec3>& branch, double yaw_start, double yaw_end,
                          const Clearance& clearance, const DynamicLimits& limits,
                          const SmoothingConfig& cfg) {
  SmoothedPath out;
  const std::vector<Vec3> pts = dedupe(branch);
  if (pts.size() < 2) {
    out.simplified = pts;
    out.trajectory = hover(pts.front(), yaw_start, yaw_end, limits.yaw_rate_max);
    return out;
  }
  out.simplified = simplify(pts, clearance);
  const std::vector<Vec3> knots = densify(out.simplified, cfg.knot_spacing);
  try {
    RepairResult r = repair(knots, rampYaw(knots, yaw_start, yaw_end), clearance, limits, cfg);
    out.trajectory = std::move(r.trajectory);
    out.repair_iterations = r.iterations;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kRepairFailed) throw;
    out.fallback = true;
    out.trajectory = stopAndGo(out.simplified, rampYaw(out.simplified, yaw_start, yaw_end),
                               clearance, limits, cfg);
  }
  return out;
}

}  // namespace nbvx
