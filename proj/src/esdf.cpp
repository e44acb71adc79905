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

#include "nbvx/esdf.h"

#include <algorithm>
#include <cstdint>

namespace nbvx {
namespace {

constexpr std::int64_t kInf = -1;  // sentinel: no source on this line

// Rational number num/den with den > 0.
struct Ratio {
  std::int64_t num;
  std::int64_t den;
};

bool lessEq(const Ratio& a, const Ratio& b) { return a.num * b.den <= b.num * a.den; }

// Squared distance transform of one line, exact in integers:
//   out[q] = min_p (q - p)^2 + f[p]
// over finite entries of f. Lower envelope of parabolas.
void transformLine(const std::vector<std::int64_t>& f, std::vector<std::int64_t>& out,
                   std::vector<int>& v, std::vector<Ratio>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const std::int64_t hq = f[q] + static_cast<std::int64_t>(q) * q;
    while (k >= 0) {
      const int p = v[k];
      const Ratio s{hq - (f[p] + static_cast<std::int64_t>(p) * p), 2 * (q - p)};
      if (k > 0 && lessEq(s, z[k])) {
        --k;
        continue;
      }
      ++k;
      v[k] = q;
      z[k] = s;
      break;
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
    }
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    // Advance while the next parabola's region starts at or before q.
    while (j < k && lessEq(z[j + 1], Ratio{q, 1})) ++j;
    const std::int64_t d = q - v[j];
    out[q] = d * d + f[v[j]];
  }
}

}  // namespace

EsdfField computeEsdf(const VoxelMap& map, double d_max) {
  const GridGeometry& g = map.geometry();
  if (!(d_max >= g.resolution)) {
    throw Error(ErrorKind::kInvalidArgument, "ESDF truncation must be >= voxel size");
  }
  // One blocking layer of padding around the grid.
  const int px = g.dims.x() + 2;
  const int py = g.dims.y() + 2;
  const int pz = g.dims.z() + 2;
  const auto idx = [&](int x, int y, int z) {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(px) * (static_cast<std::size_t>(y) +
                                            static_cast<std::size_t>(py) * z);
  };
  std::vector<std::int64_t> d2(static_cast<std::size_t>(px) * py * pz, 0);
  for (int z = 0; z < g.dims.z(); ++z) {
    for (int y = 0; y < g.dims.y(); ++y) {
      for (int x = 0; x < g.dims.x(); ++x) {
        const bool free = map.state(g.linear(Index3(x, y, z))) == VoxelState::kFree;
        d2[idx(x + 1, y + 1, z + 1)] = free ? kInf : 0;
      }
    }
  }

  const int longest = std::max({px, py, pz});
  std::vector<std::int64_t> line(longest), out(longest);
  std::vector<int> v(longest);
  std::vector<Ratio> zr(longest + 1);
  const auto pass = [&](int n, auto&& at) {
    line.resize(n);
    out.resize(n);
    for (int i = 0; i < n; ++i) line[i] = d2[at(i)];
    transformLine(line, out, v, zr);
    for (int i = 0; i < n; ++i) d2[at(i)] = out[i];
  };
  for (int z = 0; z < pz; ++z)
    for (int y = 0; y < py; ++y) pass(px, [&](int i) { return idx(i, y, z); });
  for (int z = 0; z < pz; ++z)
    for (int x = 0; x < px; ++x) pass(py, [&](int i) { return idx(x, i, z); });
  for (int y = 0; y < py; ++y)
    for (int x = 0; x < px; ++x) pass(pz, [&](int i) { return idx(x, y, i); });

  std::vector<double> dist(g.size());
  for (int z = 0; z < g.dims.z(); ++z) {
    for (int y = 0; y < g.dims.y(); ++y) {
      for (int x = 0; x < g.dims.x(); ++x) {
        const double e = g.resolution * std::sqrt(static_cast<double>(d2[idx(x + 1, y + 1, z + 1)]));
        dist[g.linear(Index3(x, y, z))] = std::min(e, d_max);
      }
    }
  }
  return EsdfField(g, d_max, std::move(dist));
}

double EsdfField::interpolate(const Vec3& p) const {
  const Vec3 gpos = (p - geometry_.origin) / geometry_.resolution - Vec3::Constant(0.5);
  int i0[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    const double fl = std::floor(gpos[a]);
    i0[a] = static_cast<int>(fl);
    frac[a] = gpos[a] - fl;
  }
  const auto sample = [&](int dx, int dy, int dz) {
    const Index3 c(std::clamp(i0[0] + dx, 0, geometry_.dims.x() - 1),
                   std::clamp(i0[1] + dy, 0, geometry_.dims.y() - 1),
                   std::clamp(i0[2] + dz, 0, geometry_.dims.z() - 1));
    return distances_[geometry_.linear(c)];
  };
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    const double wz = dz ? frac[2] : 1.0 - frac[2];
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? frac[1] : 1.0 - frac[1];
      for (int dx = 0; dx < 2; ++dx) {
        const double wx = dx ? frac[0] : 1.0 - frac[0];
        acc += wx * wy * wz * sample(dx, dy, dz);
      }
    }
  }
  return acc;
}

Vec3 esdfGradient(const EsdfField& field, const Vec3& p) {
  const double h = 0.1 * field.geometry().resolution;
  Vec3 grad;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = h;
    grad[a] = (field.interpolate(p + e) - field.interpolate(p - e)) / (2.0 * h);
  }
  return grad;
}

bool Clearance::segmentValid(const Vec3& a, const Vec3& b) const {
  const Vec3 d = b - a;
  const double len = d.norm();
  if (len < 1e-12) return pointValid(a);
  if (!pointValid(b)) return false;
  const EsdfField& f = *esdf_;
  const RayTermination t = traverseGrid(f.geometry(), a, d / len, len,
                                        [&](const Index3&, std::size_t lin, double) {
                                          return f.distance(lin) < radius_;
                                        });
  return t == RayTermination::kReachedEnd;
}

bool Clearance::polylineValid(std::span<const Vec3> points) const {
  if (points.empty()) return true;
  if (points.size() == 1) return pointValid(points[0]);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!segmentValid(points[i], points[i + 1])) return false;
  }
  return true;
}

}  // namespace nbvx
