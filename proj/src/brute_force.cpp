// Dense-sampling oracle for solvePosition. Shares no code with the analytic
// path beyond the Pose3 type: the circle is built from the sonar's beam and
// z axes, not from the cutting-plane normal.

#include "capsd/capsd_solver.hpp"

#include <cmath>

namespace capsd {

namespace {

struct Circle {
  Vec3 center;
  Vec3 e1;  // beam direction at the detected azimuth
  Vec3 e2;  // sonar z axis
  double radius;

  Vec3 at(double angle) const { return center + radius * (std::cos(angle) * e1 + std::sin(angle) * e2); }
};

}  // namespace

std::vector<Vec3> bruteForceSolve(const SolverInput& inp, int n_samples) {
  if (n_samples < 1000) throw std::invalid_argument("bruteForceSolve: need at least 1000 samples");

  const RotMat3 rot = inp.asv_pose.rot * inp.mount.rot;
  const Vec3 origin = inp.asv_pose.rot * inp.mount.trans + inp.asv_pose.trans;
  const double az = inp.detection.azimuth;
  const Circle circle{origin, rot * Vec3(std::cos(az), std::sin(az), 0.0), rot * Vec3::UnitZ(),
                      inp.detection.range_m};
  const double target = inp.depth.z_depth;
  auto f = [&](double angle) { return circle.at(angle).z() - target; };

  const int n = n_samples;
  const double step = 2.0 * kPi / n;
  std::vector<double> angle(n), value(n);
  for (int i = 0; i < n; ++i) {
    angle[i] = -kPi + i * step;
    value[i] = f(angle[i]);
  }

  std::vector<double> roots;
  // Sign changes on each (periodic) sample interval.
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const double fa = value[i], fb = value[j];
    if (fa == 0.0) {
      roots.push_back(angle[i]);
      continue;
    }
    if (fa * fb >= 0.0) continue;
    double lo = angle[i], hi = angle[i] + step, flo = fa;
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }

  // Touching extrema: the depth plane tangent to the circle gives no sign change.
  const double touch_tol = 1e-9 * std::max(1.0, circle.radius);
  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n, next = (i + 1) % n;
    const double fi = value[i];
    if (fi == 0.0 || fi * value[prev] <= 0.0 || fi * value[next] <= 0.0) continue;
    if (std::abs(fi) > std::abs(value[prev]) || std::abs(fi) > std::abs(value[next])) continue;
    // Golden-section search for the extremum of |f| on [prev, next].
    const double sign = fi > 0.0 ? 1.0 : -1.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = angle[i] - step, hi = angle[i] + step;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = sign * f(x1), f2 = sign * f(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = sign * f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = sign * f(x2);
      }
    }
    const double best = 0.5 * (lo + hi);
    if (std::abs(f(best)) <= touch_tol) roots.push_back(best);
  }

  std::vector<Vec3> points;
  for (double r : roots) {
    const Vec3 p = circle.at(r);
    bool duplicate = false;
    for (const Vec3& q : points) duplicate = duplicate || (p - q).norm() < 1e-7;
    if (!duplicate) points.push_back(p);
  }
  return points;
}

}  // namespace capsd
