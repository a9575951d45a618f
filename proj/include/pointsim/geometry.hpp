#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

// Pointing-directive geometry.
//
// Conventions used throughout the library:
//  * Both the camera frame and the robot frame are right-handed with z up.
//    The camera x axis points forward (viewing direction), y left.
//  * The robot frame origin sits at the camera mount height h above the
//    floor, horizontally at the robot center, so the floor plane is z = -h.
//  * Yaw is the rotation of the pointing direction about the vertical (z)
//    axis; pitch is the angle between the finger axis and the horizontal
//    plane, positive when pointing downward.
//  * Lengths are millimeters, angles are radians internally and degrees in
//    every file format and CLI flag.
//
// Directions are mapped between frames with the rotation part of a rigid
// transform only; applying a translation to a unit direction is geometrically
// meaningless, so none is applied.

namespace pointsim::geo {

inline constexpr double kUnitTol = 1e-9;        // unit-norm / orthonormality checks
inline constexpr double kDegenerateTol = 1e-6;  // near-level pointing gate
inline constexpr double kZeroDirTol = 1e-12;    // zero-length direction gate

template <class S> using Vec3 = Eigen::Matrix<S, 3, 1>;
template <class S> using Mat3 = Eigen::Matrix<S, 3, 3>;
using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;

template <class S> constexpr S deg2rad(S deg) {
  return deg * std::numbers::pi_v<S> / S(180);
}
template <class S> constexpr S rad2deg(S rad) {
  return rad * S(180) / std::numbers::pi_v<S>;
}

/// Wrap an angle to (-pi, pi].
template <class S> S wrap_angle(S rad) {
  const S two_pi = S(2) * std::numbers::pi_v<S>;
  S a = std::fmod(rad, two_pi);
  if (a <= -std::numbers::pi_v<S>) a += two_pi;
  if (a > std::numbers::pi_v<S>) a -= two_pi;
  return a;
}

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroDirectionError : GeometryError {
  using GeometryError::GeometryError;
};
struct DegenerateDirectionError : GeometryError {
  using GeometryError::GeometryError;
};
struct PitchDomainError : GeometryError {
  using GeometryError::GeometryError;
};
struct NoFloorIntersectionError : GeometryError {
  using GeometryError::GeometryError;
};
struct BelowFloorError : GeometryError {
  using GeometryError::GeometryError;
};
struct DegenerateProjectionError : GeometryError {
  using GeometryError::GeometryError;
};
struct InvalidTransformError : GeometryError {
  using GeometryError::GeometryError;
};

/// Unit-norm direction vector. The constructor enforces the invariant;
/// normalized() builds one from any vector of usable length.
template <class S>
class UnitVec3 {
 public:
  UnitVec3() : v_(S(1), S(0), S(0)) {}

  UnitVec3(S x, S y, S z) : v_(x, y, z) {
    if (std::abs(v_.norm() - S(1)) > S(kUnitTol)) {
      throw GeometryError("UnitVec3: norm deviates from 1 beyond tolerance");
    }
  }

  explicit UnitVec3(const Vec3<S>& v) : UnitVec3(v.x(), v.y(), v.z()) {}

  static UnitVec3 normalized(const Vec3<S>& v) {
    const S n = v.norm();
    if (n <= S(kZeroDirTol)) {
      throw ZeroDirectionError("UnitVec3: cannot normalize near-zero vector");
    }
    UnitVec3 u;
    u.v_ = v / n;
    return u;
  }

  const Vec3<S>& vec() const { return v_; }
  S x() const { return v_.x(); }
  S y() const { return v_.y(); }
  S z() const { return v_.z(); }

 private:
  Vec3<S> v_;
};

using UnitVec3d = UnitVec3<double>;

/// Rigid map between frames: p' = R p + t. Rotation must be a proper
/// orthonormal matrix; validate() checks the invariant explicitly.
template <class S>
struct RigidTransform {
  Mat3<S> rotation = Mat3<S>::Identity();
  Vec3<S> translation = Vec3<S>::Zero();

  static RigidTransform identity() { return {}; }

  static RigidTransform from_translation(const Vec3<S>& t) {
    return {Mat3<S>::Identity(), t};
  }

  void validate() const {
    const Mat3<S> gram = rotation.transpose() * rotation;
    if ((gram - Mat3<S>::Identity()).cwiseAbs().maxCoeff() > S(kUnitTol)) {
      throw InvalidTransformError("RigidTransform: rotation not orthonormal");
    }
    if (std::abs(rotation.determinant() - S(1)) > S(kUnitTol)) {
      throw InvalidTransformError("RigidTransform: determinant not +1");
    }
  }
};

using RigidTransformd = RigidTransform<double>;

/// Rotation about the z axis (yaw).
template <class S>
Mat3<S> rot_z(S rad) {
  const S c = std::cos(rad), s = std::sin(rad);
  Mat3<S> m;
  m << c, -s, S(0), s, c, S(0), S(0), S(0), S(1);
  return m;
}

/// Half-line with a point of origin; used for floor-projected pointing lines.
template <class S>
struct Ray {
  Vec3<S> origin;
  UnitVec3<S> direction;
};

using Rayd = Ray<double>;

/// Pointing direction from pitch/yaw:
///   (cos(yaw) cos(pitch), sin(yaw) cos(pitch), -sin(pitch)).
/// Positive pitch points below the horizontal plane. |pitch| must be < 90 deg.
template <class S>
UnitVec3<S> direction_from_angles(S pitch_rad, S yaw_rad) {
  if (std::abs(pitch_rad) >= std::numbers::pi_v<S> / S(2)) {
    throw PitchDomainError("direction_from_angles: |pitch| must be < 90 deg");
  }
  const S cb = std::cos(pitch_rad);
  return UnitVec3<S>::normalized(Vec3<S>(
      std::cos(yaw_rad) * cb, std::sin(yaw_rad) * cb, -std::sin(pitch_rad)));
}

/// Inverse of direction_from_angles. Yaw is undefined for directions parallel
/// to the z axis; those raise DegenerateDirectionError.
/// Returns (pitch, yaw).
template <class S>
std::pair<S, S> angles_from_direction(const UnitVec3<S>& v) {
  const S horiz = std::hypot(v.x(), v.y());
  if (horiz <= S(kUnitTol)) {
    throw DegenerateDirectionError(
        "angles_from_direction: direction parallel to z axis, yaw undefined");
  }
  const S pitch = std::asin(std::clamp(-v.z(), S(-1), S(1)));
  const S yaw = std::atan2(v.y(), v.x());
  return {pitch, yaw};
}

template <class S, class Derived>
Vec3<S> transform_point(const RigidTransform<S>& a,
                        const Eigen::MatrixBase<Derived>& p) {
  return a.rotation * p + a.translation;
}

/// Directions rotate but do not translate.
template <class S>
UnitVec3<S> transform_direction(const RigidTransform<S>& a,
                                const UnitVec3<S>& v) {
  return UnitVec3<S>::normalized(a.rotation * v.vec());
}

template <class S>
RigidTransform<S> compose(const RigidTransform<S>& a,
                          const RigidTransform<S>& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

template <class S>
RigidTransform<S> invert(const RigidTransform<S>& a) {
  Mat3<S> rt = a.rotation.transpose();
  return {rt, -(rt * a.translation)};
}

/// Minimal distance between the target point and the line through key_point
/// along direction: ||(g - p) x v|| / ||v||.
template <class DerivedG, class DerivedP, class DerivedV>
typename DerivedG::Scalar pointing_error(
    const Eigen::MatrixBase<DerivedG>& target,
    const Eigen::MatrixBase<DerivedP>& key_point,
    const Eigen::MatrixBase<DerivedV>& direction) {
  using S = typename DerivedG::Scalar;
  const Vec3<S> v = direction;
  const S n = v.norm();
  if (n <= S(kZeroDirTol)) {
    throw ZeroDirectionError("pointing_error: near-zero direction vector");
  }
  return Vec3<S>(target - key_point).cross(v).norm() / n;
}

/// Distance along a downward pointing direction from the finger to the floor
/// plane z = -h (robot frame):  d = -(p_z + h) / x_z.
/// Requires the direction to actually descend (x_z < -1e-6) and the finger to
/// be above the floor (p_z + h > 0).
template <class S>
S floor_distance(const Vec3<S>& finger, const UnitVec3<S>& dir, S height) {
  if (dir.z() >= -S(kDegenerateTol)) {
    throw NoFloorIntersectionError(
        "floor_distance: pointing level or upward, no floor intersection");
  }
  if (finger.z() + height <= S(0)) {
    throw BelowFloorError("floor_distance: finger at or below the floor");
  }
  return -(finger.z() + height) / dir.z();
}

/// Pointed floor target: g = p + x * d, with g.z = -h by construction.
template <class S>
Vec3<S> resolve_target(const Vec3<S>& finger, const UnitVec3<S>& dir,
                       S height) {
  const S d = floor_distance(finger, dir, height);
  return finger + dir.vec() * d;
}

/// Floor-plane ray under the finger, aligned with the horizontal component of
/// the pointing direction. Vertical pointing has no defined projection.
template <class S>
Ray<S> project_to_floor_line(const Vec3<S>& finger, const UnitVec3<S>& dir,
                             S height) {
  if (std::hypot(dir.x(), dir.y()) <= S(kUnitTol)) {
    throw DegenerateProjectionError(
        "project_to_floor_line: vertical pointing direction");
  }
  return {Vec3<S>(finger.x(), finger.y(), -height),
          UnitVec3<S>::normalized(Vec3<S>(dir.x(), dir.y(), S(0)))};
}

/// Estimated pointing state: finger position (camera frame, mm) plus the
/// pitch/yaw of the pointing direction.
struct PointingFeature {
  Vec3d position_mm = Vec3d::Zero();
  double pitch_rad = 0.0;
  double yaw_rad = 0.0;

  UnitVec3d direction() const {
    return direction_from_angles(pitch_rad, yaw_rad);
  }

  void validate() const {
    if (!position_mm.allFinite()) {
      throw GeometryError("PointingFeature: non-finite position");
    }
    if (!std::isfinite(pitch_rad) || !std::isfinite(yaw_rad)) {
      throw GeometryError("PointingFeature: non-finite angles");
    }
    if (std::abs(pitch_rad) >= std::numbers::pi / 2) {
      throw PitchDomainError("PointingFeature: |pitch| must be < 90 deg");
    }
    if (std::abs(yaw_rad) > std::numbers::pi + kUnitTol) {
      throw GeometryError("PointingFeature: |yaw| must be <= 180 deg");
    }
  }
};

}  // namespace pointsim::geo
