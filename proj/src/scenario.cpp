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

#include "nbvx/scenario.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "nbvx/esdf.h"

namespace nbvx {

VoxelMap rasterizeFootprint(double size_x, double size_y, double height, double resolution,
                            const std::function<bool(double, double)>& occupied) {
  if (!(resolution > 0.0 && size_x > 0.0 && size_y > 0.0 && height > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "footprint extents must be positive");
  }
  const int nx = static_cast<int>(std::lround(size_x / resolution));
  const int ny = static_cast<int>(std::lround(size_y / resolution));
  const int nz = static_cast<int>(std::lround(height / resolution));
  GridGeometry g;
  g.resolution = resolution;
  g.origin = Vec3::Constant(-resolution);
  g.dims = Index3(nx + 2, ny + 2, nz + 2);
  VoxelMap map(g, VoxelState::kOccupied);
  for (int y = 1; y <= ny; ++y) {
    for (int x = 1; x <= nx; ++x) {
      const Vec3 c = g.center(Index3(x, y, 1));
      const VoxelState s = occupied(c.x(), c.y()) ? VoxelState::kOccupied : VoxelState::kFree;
      for (int z = 1; z <= nz; ++z) map.set(Index3(x, y, z), s);
    }
  }
  return map;
}

void validateStarts(const Scenario& s, double robot_radius) {
  if (s.starts.empty()) throw Error(ErrorKind::kParseError, s.name + ": no start pose");
  const EsdfField esdf = computeEsdf(s.truth, std::max(2.0 * robot_radius, s.truth.resolution()));
  for (std::size_t i = 0; i < s.starts.size(); ++i) {
    const Vec3& p = s.starts[i].position;
    if (s.truth.stateAt(p) != VoxelState::kFree || esdf.distanceAt(p) < robot_radius) {
      std::ostringstream msg;
      msg << s.name << ": start " << i << " at (" << p.transpose() << ") is in collision";
      throw Error(ErrorKind::kStartInCollision, msg.str());
    }
  }
}

namespace {

[[noreturn]] void parseFail(const std::string& name, int line, int col, const std::string& what) {
  std::ostringstream msg;
  msg << name << ":" << line;
  if (col > 0) msg << ":" << col;
  msg << ": " << what;
  throw Error(ErrorKind::kParseError, msg.str());
}

}  // namespace

Scenario parseScenario(const std::string& text, const std::string& name, double robot_radius) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  // Header.
  std::map<std::string, double> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tok;
    int col = 1;
    while (fields >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) parseFail(name, line_no, col, "expected key=value, got '" + tok + "'");
      const std::string key = tok.substr(0, eq);
      try {
        std::size_t used = 0;
        const double v = std::stod(tok.substr(eq + 1), &used);
        if (used != tok.size() - eq - 1) throw std::invalid_argument(key);
        header[key] = v;
      } catch (const std::exception&) {
        parseFail(name, line_no, col + static_cast<int>(eq) + 1, "bad number for '" + key + "'");
      }
      col += static_cast<int>(tok.size()) + 1;
    }
    break;
  }
  for (const char* key : {"r", "h", "levels"}) {
    if (!header.count(key)) parseFail(name, line_no, 0, std::string("missing header key '") + key + "'");
  }
  if (header["levels"] != 1.0) parseFail(name, line_no, 0, "only levels=1 is supported");
  const double r = header["r"];
  const double h = header["h"];
  const double cell = header.count("cell") ? header["cell"] : 1.0;
  if (!(r > 0.0 && h > 0.0 && cell > 0.0)) parseFail(name, line_no, 0, "r, h and cell must be positive");

  // Rows, then start lines.
  std::vector<std::string> rows;
  Scenario s;
  s.name = name;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("start:", 0) == 0) {
      std::istringstream fields(line.substr(6));
      Pose p;
      if (!(fields >> p.position.x() >> p.position.y() >> p.position.z() >> p.yaw)) {
        parseFail(name, line_no, 7, "expected 'start: x y z yaw'");
      }
      std::string extra;
      if (fields >> extra) parseFail(name, line_no, 7, "trailing tokens after start pose");
      s.starts.push_back(p);
      continue;
    }
    if (!s.starts.empty()) parseFail(name, line_no, 1, "map rows must precede start lines");
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (line[c] != '#' && line[c] != '.') {
        parseFail(name, line_no, static_cast<int>(c) + 1,
                  std::string("unexpected character '") + line[c] + "'");
      }
    }
    if (!rows.empty() && line.size() != rows.front().size()) {
      parseFail(name, line_no, static_cast<int>(std::min(line.size(), rows.front().size())) + 1,
                "row length differs from first row");
    }
    rows.push_back(line);
  }
  if (rows.empty()) parseFail(name, line_no, 0, "no map rows");

  const int n_rows = static_cast<int>(rows.size());
  const int n_cols = static_cast<int>(rows.front().size());
  const auto occupied = [&](double x, double y) {
    const int c = std::clamp(static_cast<int>(std::floor(x / cell)), 0, n_cols - 1);
    const int rr = std::clamp(n_rows - 1 - static_cast<int>(std::floor(y / cell)), 0, n_rows - 1);
    return rows[rr][c] == '#';
  };
  s.truth = rasterizeFootprint(n_cols * cell, n_rows * cell, h, r, occupied);
  s.extent = Vec3(n_cols * cell, n_rows * cell, h);
  validateStarts(s, robot_radius);
  return s;
}

Scenario loadScenario(const std::string& path, double robot_radius) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read scenario " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string name = path;
  const auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return parseScenario(buf.str(), name, robot_radius);
}

Scenario generateDeadend(double length, double width, double resolution, double height,
                         double chamber) {
  if (!(length > width && width > 0.0 && chamber >= width)) {
    throw Error(ErrorKind::kInvalidArgument, "dead-end needs length > width > 0");
  }
  const double y_lo = 0.5 * (chamber - width);
  const double y_hi = 0.5 * (chamber + width);
  const auto occupied = [&](double x, double y) {
    if (x >= length) return false;
    return y < y_lo || y > y_hi;
  };
  Scenario s;
  s.name = "deadend";
  s.truth = rasterizeFootprint(length + chamber, chamber, height, resolution, occupied);
  s.extent = Vec3(length + chamber, chamber, height);
  s.starts.push_back(Pose{Vec3(0.5 * width, 0.5 * chamber, 0.5 * height), 0.0});
  return s;
}

}  // namespace nbvx
