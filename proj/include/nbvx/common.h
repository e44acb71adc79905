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

#ifndef NBVX_COMMON_H_
#define NBVX_COMMON_H_

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace nbvx {

using Vec3 = Eigen::Vector3d;
using Index3 = Eigen::Vector3i;

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double degToRad(double deg) { return deg * kPi / 180.0; }
inline double radToDeg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into [-pi, pi).
inline double wrapAngle(double a) {
  double w = std::fmod(a + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w - kPi;
}

/// Robot position plus heading about +z.
struct Pose {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

enum class ErrorKind {
  kInvalidArgument,
  kPoseInCollision,
  kPositionNotFree,
  kNoFreeSample,
  kSeedInvalid,
  kSingularSystem,
  kRepairFailed,
  kStuckNoPlan,
  kUnreachable,
  kParseError,
  kStartInCollision,
  kIo,
};

std::string_view errorKindName(ErrorKind kind);

/// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(errorKindName(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view errorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kPoseInCollision: return "PoseInCollision";
    case ErrorKind::kPositionNotFree: return "PositionNotFree";
    case ErrorKind::kNoFreeSample: return "NoFreeSample";
    case ErrorKind::kSeedInvalid: return "SeedInvalid";
    case ErrorKind::kSingularSystem: return "SingularSystem";
    case ErrorKind::kRepairFailed: return "RepairFailed";
    case ErrorKind::kStuckNoPlan: return "StuckNoPlan";
    case ErrorKind::kUnreachable: return "Unreachable";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kStartInCollision: return "StartInCollision";
    case ErrorKind::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace nbvx

#endif  // NBVX_COMMON_H_
