#include "capsd/geometry.hpp"

#include <cmath>

namespace capsd {

double wrapAngle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

RotMat3 rotX(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  RotMat3 r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

RotMat3 rotY(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  RotMat3 r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return r;
}

RotMat3 rotZ(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  RotMat3 r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

RotMat3 eulerZyxToRot(const EulerZYX& e) {
  const double cy = std::cos(e.yaw), sy = std::sin(e.yaw);
  const double cp = std::cos(e.pitch), sp = std::sin(e.pitch);
  const double cr = std::cos(e.roll), sr = std::sin(e.roll);
  RotMat3 r;
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp,     cp * sr,                cp * cr;
  return r;
}

EulerZYX rotToEulerZyx(const RotMat3& r) {
  if (std::abs(r(2, 0)) >= 1.0 - 1e-9) throw GimbalLockError();
  EulerZYX e;
  // atan2 form keeps pitch well conditioned close to the pole.
  e.pitch = std::atan2(-r(2, 0), std::hypot(r(0, 0), r(1, 0)));
  e.yaw = wrapAngle(std::atan2(r(1, 0), r(0, 0)));
  e.roll = wrapAngle(std::atan2(r(2, 1), r(2, 2)));
  return e;
}

Pose3 Pose3::fromEuler(const EulerZYX& e, const Vec3& t) { return {eulerZyxToRot(e), t}; }

Pose3 compose(const Pose3& a, const Pose3& b) {
  return {a.rot * b.rot, a.rot * b.trans + a.trans};
}

Pose3 invert(const Pose3& p) {
  const RotMat3 rt = p.rot.transpose();
  return {rt, -(rt * p.trans)};
}

Vec3 transformPoint(const Pose3& p, const Vec3& v) { return p.rot * v + p.trans; }

Vec3 transformDirection(const Pose3& p, const Vec3& v) { return p.rot * v; }

bool isRotation(const RotMat3& r, double tol) {
  if (!r.allFinite()) return false;
  const double ortho = (r.transpose() * r - RotMat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

}  // namespace capsd
