#include "capsd/capsd_solver.hpp"

#include <cmath>

namespace capsd {

namespace {

// Floating-point slack on FOV edges for points reconstructed from exact
// boundary measurements.
constexpr double kEdgeSlack = 1e-12;

bool acceptCandidate(const Vec3& q, double azimuth, const SonarConfig& cfg, const SolverOptions& opts) {
  if (!(q.x() > 0.0)) return false;
  const SonarPolar sp = toSonarPolar(q);
  if (std::abs(sp.azimuth) > 0.5 * cfg.hfov + opts.azimuth_tol) return false;
  if (sp.elevation < cfg.vmin - opts.aperture_margin - kEdgeSlack) return false;
  if (sp.elevation > cfg.vmax + opts.aperture_margin + kEdgeSlack) return false;
  if (sp.range > cfg.rmax * (1.0 + kEdgeSlack)) return false;
  return std::abs(wrapAngle(sp.azimuth - azimuth)) <= opts.azimuth_tol;
}

}  // namespace

const char* toString(SolveStatus s) {
  switch (s) {
    case SolveStatus::Ok: return "Ok";
    case SolveStatus::NoIntersection: return "NoIntersection";
    case SolveStatus::DegeneratePlane: return "DegeneratePlane";
    case SolveStatus::NoValidCandidate: return "NoValidCandidate";
    case SolveStatus::AmbiguousSolution: return "AmbiguousSolution";
  }
  return "Unknown";
}

Pose3 sonarPoseWorld(const Pose3& asv_pose, const Pose3& mount) { return compose(asv_pose, mount); }

CuttingPlane cuttingPlane(const Pose3& world_T_sonar, double azimuth) {
  const Vec3 n_sonar(std::sin(azimuth), -std::cos(azimuth), 0.0);
  return {transformDirection(world_T_sonar, n_sonar).normalized(), world_T_sonar.trans};
}

SolveResult solvePosition(const SolverInput& inp, const SolverOptions& opts) {
  SolveResult out;
  out.estimate.t = inp.detection.t;

  const Pose3 world_T_sonar = sonarPoseWorld(inp.asv_pose, inp.mount);
  const Vec3& ps = world_T_sonar.trans;
  const double range = inp.detection.range_m;
  const double z = inp.depth.z_depth;

  // Depth plane against the range sphere: slice circle centred under/over the sonar.
  const double h = z - ps.z();
  if (std::abs(h) > range) {
    out.status = SolveStatus::NoIntersection;
    return out;
  }
  const double rc2 = std::max(0.0, range * range - h * h);
  const double rc = std::sqrt(rc2);

  // Cutting plane restricted to the slice: A dx + B dy = -C h.
  const CuttingPlane plane = cuttingPlane(world_T_sonar, inp.detection.azimuth);
  const double a = plane.normal.x(), b = plane.normal.y(), c = plane.normal.z();
  const double ab2 = a * a + b * b;
  if (ab2 < opts.degenerate_eps * opts.degenerate_eps) {
    out.status = SolveStatus::DegeneratePlane;
    return out;
  }
  const double ab = std::sqrt(ab2);
  const double dist = std::abs(c * h) / ab;
  const double fx = -c * h * a / ab2, fy = -c * h * b / ab2;  // foot of the perpendicular
  const double ux = -b / ab, uy = a / ab;                      // line direction

  std::vector<Vec3>& cands = out.estimate.candidates;
  if (dist > rc * (1.0 + opts.tangency_rel)) {
    if (dist - rc > opts.consistency_tol) {
      out.status = SolveStatus::NoIntersection;
      return out;
    }
    cands.emplace_back(ps.x() + fx, ps.y() + fy, z);
  } else if (rc - dist <= opts.tangency_rel * rc) {
    cands.emplace_back(ps.x() + fx, ps.y() + fy, z);
  } else {
    const double half_chord = std::sqrt(rc2 - dist * dist);
    cands.emplace_back(ps.x() + fx + half_chord * ux, ps.y() + fy + half_chord * uy, z);
    cands.emplace_back(ps.x() + fx - half_chord * ux, ps.y() + fy - half_chord * uy, z);
  }

  // Keep candidates in the sonar's forward sensing region on the detected beam.
  const Pose3 sonar_T_world = invert(world_T_sonar);
  int chosen = -1, survivors = 0;
  for (size_t i = 0; i < cands.size(); ++i) {
    if (acceptCandidate(transformPoint(sonar_T_world, cands[i]), inp.detection.azimuth, inp.cfg, opts)) {
      chosen = static_cast<int>(i);
      ++survivors;
    }
  }
  if (survivors == 0) {
    out.status = SolveStatus::NoValidCandidate;
    return out;
  }
  if (survivors > 1) {
    out.status = SolveStatus::AmbiguousSolution;
    return out;
  }

  PositionEstimate& est = out.estimate;
  est.chosen_index = chosen;
  est.p = cands[chosen];
  const Vec3 rel = est.p - ps;
  est.residuals.sphere = std::abs(rel.norm() - range);
  est.residuals.plane = std::abs(plane.normal.dot(rel));
  est.residuals.depth = std::abs(est.p.z() - z);
  out.status = SolveStatus::Ok;
  return out;
}

}  // namespace capsd
