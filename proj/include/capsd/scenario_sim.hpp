#pragma once

#include "capsd/dataset.hpp"
#include "capsd/geometry.hpp"
#include "capsd/sonar_model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace capsd {

/// Tank occupies x in [0, length], y in [0, width], z in [-depth, 0].
struct TankSpec {
  double length = 28.0;
  double width = 16.0;
  double depth = 8.0;
};

enum class TrajectoryKind { Square, Lawnmower, Bouncing, Random, TwoFloor };

const char* toString(TrajectoryKind k);
TrajectoryKind trajectoryKindFromString(const std::string& s);

struct Region {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Square;
  double speed = 0.5;     // m/s
  double dt = 0.01;       // s
  double duration = 0.0;  // s; <= 0 means a single pass over the pattern
  double margin = 1.0;    // m kept clear of the tank walls and floor
  std::optional<Region> region;  // horizontal working area; defaults to tank minus margin
  double depth = -3.0;           // world z of the pattern
  double depth2 = -5.0;          // second level for two_floor
  double bounce_amplitude = 0.5;
  double bounce_wavelength = 4.0;  // m of horizontal travel per depth oscillation
  int lanes = 4;                   // lawnmower / bouncing / two_floor sweep lines
  int waypoints = 8;               // random
  std::uint64_t seed = 42;
};

class SpecInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RovSample {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
};

/// Time-uniform ROV positions at spec.dt moving at spec.speed along the
/// pattern. Longer durations ping-pong over the pattern.
std::vector<RovSample> genTrajectory(const TrajectorySpec& spec, const TankSpec& tank);

enum class AsvMode { Stationary, Hover };

struct AsvTrackSpec {
  AsvMode mode = AsvMode::Stationary;
  Vec3 position = Vec3::Zero();    // stationary pose; z is used in both modes
  double yaw = 0.0;
  double lag = 1.0;                // s, first-order lag time constant (hover)
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();  // hover target relative to the ROV
  double rock_roll = 0.0;          // rad amplitude
  double rock_pitch = 0.0;         // rad amplitude
  double rock_freq = 0.5;          // Hz
};

std::vector<Pose3> asvTrack(std::span<const RovSample> rov_path, const AsvTrackSpec& spec);

struct GroundTruthSample {
  double t = 0.0;
  Vec3 rov_pos = Vec3::Zero();
  Pose3 asv_pose;
};

std::vector<GroundTruthSample> combineTruth(std::span<const RovSample> rov_path, std::span<const Pose3> asv_poses);

struct NoiseSpec {
  double gyro_std = 0.01;        // rad/s per sample
  double accel_std = 0.05;       // m/s^2
  double slam_pos_std = 0.01;    // m
  double slam_yaw_std = deg2rad(0.2);
  double azimuth_std = 0.0;      // rad, polar-space detection noise
  double range_std = 0.0;        // m
  double pixel_std = 2.0;        // px, pixel-space detection noise (both axes)
  double depth_std = 0.005;      // m
  double dropout = 0.0;          // probability a detection is lost
  double outlier_rate = 0.0;     // probability a detection gets an extra outlier kick
  double outlier_pixel_std = 20.0;
  std::uint64_t seed = 43;

  static NoiseSpec noiseFree();
};

/// Sensor rates in Hz; a rate <= 0 disables that stream. Each stream is
/// emitted every round(1 / (rate * dt)) truth ticks.
struct SensorRates {
  double imu = 100.0;
  double slam = 10.0;
  double detection = 10.0;
  double depth = 20.0;
};

enum class DetectorKind { Synthetic, Centroid };

struct SynthesisOptions {
  DetectorKind detector = DetectorKind::Synthetic;
  double target_radius = 0.3;       // m, ROV blob size for rendered scans
  double scan_noise = 0.05;         // speckle sigma for rendered scans
  double centroid_threshold = 0.5;
  double depth_sensor_dz = 0.0;     // depth sensor z offset from the ROV reference point
  double gravity = 9.80665;
  bool flip_accel_sign = false;
};

/// Interleaved, time-ordered sensor records plus gt_rov / gt_asv truth.
/// Every random draw comes from one generator seeded with noise.seed and
/// the draw sequence does not depend on the noise magnitudes.
std::vector<Record> synthesizeSensors(std::span<const GroundTruthSample> gt, const SonarConfig& cfg,
                                      const NoiseSpec& noise, const SensorRates& rates,
                                      const SynthesisOptions& opts = {});

/// Noise-free range and azimuth of a world point seen by the sonar.
SonarPolar observeTarget(const Pose3& world_T_sonar, const Vec3& target_world);

}  // namespace capsd
