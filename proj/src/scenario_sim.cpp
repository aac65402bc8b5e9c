#include "capsd/scenario_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace capsd {

namespace {

using Polyline = std::vector<Vec3>;

void requireFeasible(bool ok, const std::string& what) {
  if (!ok) throw SpecInfeasible("SpecInfeasible: " + what);
}

Polyline lawnmower(const Region& r, int lanes, double z, bool reverse) {
  Polyline pts;
  for (int i = 0; i < lanes; ++i) {
    const double y = r.y_min + (r.y_max - r.y_min) * i / (lanes - 1);
    const bool left_to_right = (i % 2 == 0);
    pts.emplace_back(left_to_right ? r.x_min : r.x_max, y, z);
    pts.emplace_back(left_to_right ? r.x_max : r.x_min, y, z);
  }
  if (reverse) std::reverse(pts.begin(), pts.end());
  return pts;
}

// Splits every segment so that consecutive points are at most `spacing` apart.
Polyline densify(const Polyline& in, double spacing) {
  Polyline out;
  for (size_t i = 0; i + 1 < in.size(); ++i) {
    const Vec3 d = in[i + 1] - in[i];
    const int n = std::max(1, static_cast<int>(std::ceil(d.norm() / spacing)));
    for (int k = 0; k < n; ++k) out.push_back(in[i] + d * (static_cast<double>(k) / n));
  }
  out.push_back(in.back());
  return out;
}

Polyline buildPattern(const TrajectorySpec& spec, const Region& r) {
  switch (spec.kind) {
    case TrajectoryKind::Square:
      return {Vec3(r.x_min, r.y_min, spec.depth), Vec3(r.x_max, r.y_min, spec.depth),
              Vec3(r.x_max, r.y_max, spec.depth), Vec3(r.x_min, r.y_max, spec.depth),
              Vec3(r.x_min, r.y_min, spec.depth)};
    case TrajectoryKind::Lawnmower:
      return lawnmower(r, spec.lanes, spec.depth, false);
    case TrajectoryKind::Bouncing: {
      // Planar sweep with the depth oscillating along the horizontal distance travelled.
      Polyline flat = densify(lawnmower(r, spec.lanes, spec.depth, false), spec.bounce_wavelength / 64.0);
      double travelled = 0.0;
      for (size_t i = 0; i < flat.size(); ++i) {
        if (i > 0) travelled += (flat[i].head<2>() - flat[i - 1].head<2>()).norm();
        flat[i].z() = spec.depth + spec.bounce_amplitude * std::sin(2.0 * kPi * travelled / spec.bounce_wavelength);
      }
      return flat;
    }
    case TrajectoryKind::Random: {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> ux(r.x_min, r.x_max), uy(r.y_min, r.y_max);
      Polyline pts{Vec3(0.5 * (r.x_min + r.x_max), 0.5 * (r.y_min + r.y_max), spec.depth)};
      for (int i = 0; i < spec.waypoints; ++i) {
        const double x = ux(rng);
        const double y = uy(rng);
        pts.emplace_back(x, y, spec.depth);
      }
      return pts;
    }
    case TrajectoryKind::TwoFloor: {
      Polyline pts = lawnmower(r, spec.lanes, spec.depth, false);
      Polyline lower = lawnmower(r, spec.lanes, spec.depth2, true);
      pts.insert(pts.end(), lower.begin(), lower.end());  // the join is the vertical ramp
      return pts;
    }
  }
  return {};
}

struct ArcLength {
  Polyline pts;
  std::vector<double> cum;

  explicit ArcLength(Polyline p) : pts(std::move(p)), cum(pts.size(), 0.0) {
    for (size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
  }
  double total() const { return cum.back(); }

  Vec3 at(double s) const {
    if (s <= 0.0) return pts.front();
    if (s >= total()) return pts.back();
    const size_t i = std::upper_bound(cum.begin(), cum.end(), s) - cum.begin();
    const double seg = cum[i] - cum[i - 1];
    const double w = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
    return pts[i - 1] + w * (pts[i] - pts[i - 1]);
  }
};

}  // namespace

const char* toString(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::Square: return "square";
    case TrajectoryKind::Lawnmower: return "lawnmower";
    case TrajectoryKind::Bouncing: return "bouncing";
    case TrajectoryKind::Random: return "random";
    case TrajectoryKind::TwoFloor: return "two_floor";
  }
  return "unknown";
}

TrajectoryKind trajectoryKindFromString(const std::string& s) {
  for (auto k : {TrajectoryKind::Square, TrajectoryKind::Lawnmower, TrajectoryKind::Bouncing, TrajectoryKind::Random,
                 TrajectoryKind::TwoFloor}) {
    if (s == toString(k)) return k;
  }
  throw std::invalid_argument("unknown trajectory kind '" + s + "'");
}

std::vector<RovSample> genTrajectory(const TrajectorySpec& spec, const TankSpec& tank) {
  requireFeasible(tank.length > 0 && tank.width > 0 && tank.depth > 0, "tank dimensions must be positive");
  requireFeasible(spec.speed > 0.0, "speed must be positive");
  requireFeasible(spec.dt > 0.0, "dt must be positive");
  requireFeasible(spec.margin >= 0.0, "margin must be non-negative");

  const Region r = spec.region.value_or(
      Region{spec.margin, tank.length - spec.margin, spec.margin, tank.width - spec.margin});
  requireFeasible(r.x_min < r.x_max && r.y_min < r.y_max, "working region is empty");
  requireFeasible(r.x_min >= spec.margin && r.x_max <= tank.length - spec.margin && r.y_min >= spec.margin &&
                      r.y_max <= tank.width - spec.margin,
                  "working region leaves the tank minus margin");

  const double floor_z = -tank.depth + spec.margin;
  auto depthOk = [&](double z) { return z >= floor_z && z <= 0.0; };
  double lo = spec.depth, hi = spec.depth;
  if (spec.kind == TrajectoryKind::Bouncing) {
    requireFeasible(spec.bounce_amplitude >= 0.0 && spec.bounce_wavelength > 0.0, "bad bounce parameters");
    lo -= spec.bounce_amplitude;
    hi += spec.bounce_amplitude;
  }
  if (spec.kind == TrajectoryKind::TwoFloor) {
    lo = std::min(lo, spec.depth2);
    hi = std::max(hi, spec.depth2);
  }
  requireFeasible(depthOk(lo) && depthOk(hi), "depth levels leave the tank minus margin");
  if (spec.kind == TrajectoryKind::Lawnmower || spec.kind == TrajectoryKind::Bouncing ||
      spec.kind == TrajectoryKind::TwoFloor) {
    requireFeasible(spec.lanes >= 2, "sweep patterns need at least two lanes");
  }
  if (spec.kind == TrajectoryKind::Random) requireFeasible(spec.waypoints >= 1, "random needs waypoints");

  const ArcLength path(buildPattern(spec, r));
  const double length = path.total();
  requireFeasible(length > 0.0, "pattern has zero length");

  const double period = length / spec.speed;
  const double duration = spec.duration > 0.0 ? spec.duration : period;
  const auto n = static_cast<size_t>(std::floor(duration / spec.dt + 1e-9));

  std::vector<RovSample> out;
  out.reserve(n + 1);
  for (size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * spec.dt;
    double s = std::fmod(spec.speed * t, 2.0 * length);
    if (s > length) s = 2.0 * length - s;  // ping-pong
    out.push_back({t, path.at(s)});
  }
  return out;
}

std::vector<Pose3> asvTrack(std::span<const RovSample> rov_path, const AsvTrackSpec& spec) {
  std::vector<Pose3> poses;
  poses.reserve(rov_path.size());
  Eigen::Vector2d xy = spec.position.head<2>();
  if (spec.mode == AsvMode::Hover && !rov_path.empty()) xy = rov_path.front().p.head<2>() + spec.offset;

  for (size_t k = 0; k < rov_path.size(); ++k) {
    const double t = rov_path[k].t;
    if (spec.mode == AsvMode::Hover && k > 0) {
      const double dt = t - rov_path[k - 1].t;
      const double alpha = spec.lag > 0.0 ? 1.0 - std::exp(-dt / spec.lag) : 1.0;
      xy += alpha * (rov_path[k].p.head<2>() + spec.offset - xy);
    }
    const double phase = 2.0 * kPi * spec.rock_freq * t;
    const EulerZYX e{spec.yaw, spec.rock_pitch * std::sin(phase + 0.5 * kPi), spec.rock_roll * std::sin(phase)};
    poses.push_back(Pose3::fromEuler(e, Vec3(xy.x(), xy.y(), spec.position.z())));
  }
  return poses;
}

std::vector<GroundTruthSample> combineTruth(std::span<const RovSample> rov_path, std::span<const Pose3> asv_poses) {
  if (rov_path.size() != asv_poses.size()) throw std::invalid_argument("combineTruth: length mismatch");
  std::vector<GroundTruthSample> gt(rov_path.size());
  for (size_t k = 0; k < gt.size(); ++k) gt[k] = {rov_path[k].t, rov_path[k].p, asv_poses[k]};
  return gt;
}

NoiseSpec NoiseSpec::noiseFree() {
  NoiseSpec n;
  n.gyro_std = n.accel_std = n.slam_pos_std = n.slam_yaw_std = 0.0;
  n.azimuth_std = n.range_std = n.pixel_std = n.depth_std = 0.0;
  n.dropout = n.outlier_rate = 0.0;
  return n;
}

SonarPolar observeTarget(const Pose3& world_T_sonar, const Vec3& target_world) {
  return toSonarPolar(transformPoint(invert(world_T_sonar), target_world));
}

std::vector<Record> synthesizeSensors(std::span<const GroundTruthSample> gt, const SonarConfig& cfg,
                                      const NoiseSpec& noise, const SensorRates& rates,
                                      const SynthesisOptions& opts) {
  std::vector<Record> out;
  if (gt.empty()) return out;
  const double dt = gt.size() > 1 ? gt[1].t - gt[0].t : 1.0 / std::max(rates.imu, 1.0);
  auto every = [dt](double rate) -> size_t {
    if (rate <= 0.0) return 0;
    return std::max<size_t>(1, static_cast<size_t>(std::lround(1.0 / (rate * dt))));
  };
  const size_t n_imu = every(rates.imu), n_slam = every(rates.slam), n_det = every(rates.detection),
               n_depth = every(rates.depth);

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vec3 gravity_world(0.0, 0.0, opts.gravity);
  const double accel_sign = opts.flip_accel_sign ? -1.0 : 1.0;

  for (size_t k = 0; k < gt.size(); ++k) {
    const GroundTruthSample& s = gt[k];
    const double t = s.t;
    out.push_back({t, GtRovRecord{s.rov_pos}});
    out.push_back({t, GtAsvRecord{s.asv_pose.trans, rotToEulerZyx(s.asv_pose.rot)}});

    if (n_imu && k % n_imu == 0) {
      // Body rates from the attitude change over the preceding IMU interval.
      Vec3 omega = Vec3::Zero();
      if (gt.size() > 1) {
        const size_t a = k >= n_imu ? k - n_imu : 0;
        const size_t b = k >= n_imu ? k : std::min(gt.size() - 1, n_imu);
        const Eigen::AngleAxisd rel(gt[a].asv_pose.rot.transpose() * gt[b].asv_pose.rot);
        omega = rel.axis() * rel.angle() / (gt[b].t - gt[a].t);
      }
      Vec3 accel = accel_sign * (s.asv_pose.rot.transpose() * gravity_world);
      for (int i = 0; i < 3; ++i) omega[i] += noise.gyro_std * gauss(rng);
      for (int i = 0; i < 3; ++i) accel[i] += noise.accel_std * gauss(rng);
      out.push_back({t, ImuSample{t, omega, accel}});
    }

    if (n_slam && k % n_slam == 0) {
      const double yaw = rotToEulerZyx(s.asv_pose.rot).yaw;
      const double x = s.asv_pose.trans.x() + noise.slam_pos_std * gauss(rng);
      const double y = s.asv_pose.trans.y() + noise.slam_pos_std * gauss(rng);
      const double yaw_noisy = wrapAngle(yaw + noise.slam_yaw_std * gauss(rng));
      out.push_back({t, SlamPose2D{t, x, y, yaw_noisy}});
    }

    if (n_depth && k % n_depth == 0) {
      out.push_back({t, DepthSample{t, s.rov_pos.z() + opts.depth_sensor_dz + noise.depth_std * gauss(rng)}});
    }

    if (n_det && k % n_det == 0) {
      // Fixed draw count per detection tick keeps streams aligned across noise levels.
      const double n_range = gauss(rng), n_az = gauss(rng), n_u = gauss(rng), n_v = gauss(rng);
      const double n_out_u = gauss(rng), n_out_v = gauss(rng);
      const double drop = unit(rng), outlier = unit(rng);

      const Pose3 world_T_sonar = compose(s.asv_pose, cfg.mount);
      const Vec3 q = transformPoint(invert(world_T_sonar), s.rov_pos);
      if (!inFov(q, cfg) || drop < noise.dropout) continue;

      PixelDetection px;
      if (opts.detector == DetectorKind::Centroid) {
        const ScanTarget target{s.rov_pos, opts.target_radius, 1.0};
        const SonarScan scan =
            renderScan(world_T_sonar, std::span<const ScanTarget>(&target, 1), cfg, {opts.scan_noise, &rng}, t);
        const auto found = centroidDetect(scan, opts.centroid_threshold);
        if (found.empty()) continue;
        px = found.front();
      } else {
        const SonarPolar truth = toSonarPolar(q);
        PolarDetection pd{std::clamp(truth.range + noise.range_std * n_range, 0.0, cfg.rmax),
                          std::clamp(truth.azimuth + noise.azimuth_std * n_az, -0.5 * cfg.hfov, 0.5 * cfg.hfov),
                          t, 1.0};
        px = polarToPixel(pd, cfg);
        px.u += noise.pixel_std * n_u;
        px.v += noise.pixel_std * n_v;
        if (outlier < noise.outlier_rate) {
          px.u += noise.outlier_pixel_std * n_out_u;
          px.v += noise.outlier_pixel_std * n_out_v;
        }
        px.u = std::clamp(px.u, 0.0, static_cast<double>(cfg.img_w - 1));
        px.v = std::clamp(px.v, 0.0, static_cast<double>(cfg.img_h - 1));
      }
      px.t = t;
      DetectionRecord det;
      det.polar = pixelToPolar(px, cfg);
      det.u = px.u;
      det.v = px.v;
      out.push_back({t, det});
    }
  }
  return out;
}

}  // namespace capsd
