#pragma once

#include "capsd/geometry.hpp"

#include <optional>
#include <stdexcept>

namespace capsd {

struct ImuSample {
  double t = 0.0;
  Vec3 omega = Vec3::Zero();  // body rates, rad/s
  Vec3 accel = Vec3::Zero();  // specific force, m/s^2
};

struct SlamPose2D {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

struct AttitudeState {
  double roll = 0.0;
  double pitch = 0.0;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity() * 0.03;
};

struct EkfConfig {
  double gyro_noise_density = 1e-3;  // (rad/s)/sqrt(Hz)
  double accel_noise_std = 0.05;     // m/s^2
  double initial_cov = 0.03;         // rad^2 on each angle
  double gravity = 9.80665;
  double gate = 0.3;                 // allowed | |a| - g | as a fraction of g
  bool flip_accel_sign = false;      // set when the IMU reads -g on body z at rest
  double max_dt = 0.1;               // longer predictions are split into substeps
  int update_iterations = 10;        // relinearizations per update; 1 gives the plain EKF
};

class NumericalDivergence : public std::runtime_error {
 public:
  explicit NumericalDivergence(double pitch);
};

class MeasurementRejected : public std::runtime_error {
 public:
  explicit MeasurementRejected(double norm, double gravity);
};

/// Accelerometer reading expected at rest for the given tilt (z-up, +g on body z when level).
Vec3 predictedAccel(double roll, double pitch, double gravity);

/// Euler-rate kinematics for roll and pitch given body rates.
Eigen::Vector2d tiltRates(double roll, double pitch, const Vec3& omega);

AttitudeState ekfPredict(const AttitudeState& s, const Vec3& omega, double dt, const EkfConfig& cfg);
AttitudeState ekfPredict(const AttitudeState& s, const ImuSample& imu, double dt, const EkfConfig& cfg);

AttitudeState ekfUpdate(const AttitudeState& s, const Vec3& accel, const EkfConfig& cfg);

/// Roll/pitch read off a single accelerometer sample, with cfg.initial_cov.
AttitudeState stateFromAccel(const Vec3& accel, const EkfConfig& cfg);

/// world_T_base from the filter's tilt and the SLAM (x, y, yaw).
Pose3 fuseAsvPose(const AttitudeState& s, const SlamPose2D& slam, double asv_z);

/// Sequential tilt filter for one vehicle. The first accepted IMU sample
/// initializes the state from its accelerometer reading.
class AttitudeFilter {
 public:
  explicit AttitudeFilter(EkfConfig cfg = {}) : cfg_(cfg) {}

  void reset(const AttitudeState& s, double t);

  /// Predicts to imu.t with the sample's rates, then corrects with its
  /// accelerometer. Returns false when the correction was gated out.
  bool process(const ImuSample& imu);

  bool initialized() const { return state_.has_value(); }
  const AttitudeState& state() const;
  const EkfConfig& config() const { return cfg_; }
  double lastTime() const { return last_t_; }

 private:
  EkfConfig cfg_;
  std::optional<AttitudeState> state_;
  double last_t_ = 0.0;
};

}  // namespace capsd
