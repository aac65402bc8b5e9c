#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>

namespace capsd {

using Vec3 = Eigen::Vector3d;
using RotMat3 = Eigen::Matrix3d;

constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
double wrapAngle(double a);

/// Z-Y-X (yaw, pitch, roll) Euler angles in radians.
/// The rotation they describe is Rz(yaw) * Ry(pitch) * Rx(roll).
struct EulerZYX {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

class GimbalLockError : public std::runtime_error {
 public:
  GimbalLockError() : std::runtime_error("GimbalLock: pitch at +/-90 deg, yaw and roll are not separable") {}
};

/**
 * Rigid transform [R, p] mapping coordinates of a child frame into a parent
 * frame: x_parent = rot * x_child + trans.
 *
 * Poses are named after the frames they relate, e.g. the ASV base in the
 * world frame is `world_T_base`, and chaining is plain composition:
 * world_T_sonar = compose(world_T_base, base_T_sonar).
 */
struct Pose3 {
  RotMat3 rot = RotMat3::Identity();
  Vec3 trans = Vec3::Zero();

  static Pose3 identity() { return {}; }
  static Pose3 fromTranslation(const Vec3& t) { return {RotMat3::Identity(), t}; }
  static Pose3 fromEuler(const EulerZYX& e, const Vec3& t = Vec3::Zero());
};

RotMat3 rotX(double angle);
RotMat3 rotY(double angle);
RotMat3 rotZ(double angle);

RotMat3 eulerZyxToRot(const EulerZYX& e);

/// Inverse of eulerZyxToRot. Throws GimbalLockError when |r(2,0)| >= 1 - 1e-9.
EulerZYX rotToEulerZyx(const RotMat3& r);

Pose3 compose(const Pose3& a, const Pose3& b);
Pose3 invert(const Pose3& p);

inline Pose3 operator*(const Pose3& a, const Pose3& b) { return compose(a, b); }

Vec3 transformPoint(const Pose3& p, const Vec3& v);
Vec3 transformDirection(const Pose3& p, const Vec3& v);

/// Orthonormality and det = +1, both within tol.
bool isRotation(const RotMat3& r, double tol = 1e-9);

}  // namespace capsd
