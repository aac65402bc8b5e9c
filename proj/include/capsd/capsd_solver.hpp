#pragma once

#include "capsd/geometry.hpp"
#include "capsd/sonar_model.hpp"

#include <vector>

namespace capsd {

/// World-frame z of the ROV reference point (negative underwater).
struct DepthSample {
  double t = 0.0;
  double z_depth = 0.0;
};

struct SolverInput {
  Pose3 asv_pose;  // world_T_base
  Pose3 mount;     // base_T_sonar
  PolarDetection detection;
  DepthSample depth;
  SonarConfig cfg;
};

struct SolverOptions {
  double tangency_rel = 1e-9;     // relative band for tangency / miss classification
  double consistency_tol = 0.05;  // metres a noisy near-miss may be clamped to tangency
  double azimuth_tol = 1e-6;      // rad, candidate azimuth vs detection azimuth
  double aperture_margin = 0.0;   // rad added to both sides of [vmin, vmax]
  double degenerate_eps = 1e-9;   // minimum horizontal norm of the plane normal
};

enum class SolveStatus { Ok, NoIntersection, DegeneratePlane, NoValidCandidate, AmbiguousSolution };

const char* toString(SolveStatus s);

struct Residuals {
  double sphere = 0.0;  // | |p - p_S| - R |
  double plane = 0.0;   // | n . (p - p_S) |
  double depth = 0.0;   // | p.z - z_depth |
};

struct PositionEstimate {
  Vec3 p = Vec3::Zero();
  double t = 0.0;
  std::vector<Vec3> candidates;  // raw circle / depth-plane intersections
  int chosen_index = -1;
  Residuals residuals;
};

/// `estimate.p` is meaningful only when status == Ok; candidates are filled
/// whenever the intersection step got that far.
struct SolveResult {
  SolveStatus status = SolveStatus::NoIntersection;
  PositionEstimate estimate;
  bool ok() const { return status == SolveStatus::Ok; }
};

struct CuttingPlane {
  Vec3 normal = Vec3::UnitY();
  Vec3 anchor = Vec3::Zero();
};

/// world_T_sonar = world_T_base * base_T_sonar.
Pose3 sonarPoseWorld(const Pose3& asv_pose, const Pose3& mount);

/// Plane through the sonar origin holding every elevation of the beam at
/// `azimuth`; its normal is the sonar-frame direction (sin, -cos, 0) rotated
/// into the world.
CuttingPlane cuttingPlane(const Pose3& world_T_sonar, double azimuth);

SolveResult solvePosition(const SolverInput& inp, const SolverOptions& opts = {});

/// Test oracle: samples the range-sphere / cutting-plane circle by angle and
/// returns every crossing of the depth plane (sign changes refined by
/// bisection, touching minima refined by golden-section search).
std::vector<Vec3> bruteForceSolve(const SolverInput& inp, int n_samples);

}  // namespace capsd
