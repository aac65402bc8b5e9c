#include "capsd/attitude_ekf.hpp"

#include <cmath>
#include <string>

namespace capsd {

namespace {

constexpr double kPitchLimit = kPi / 2.0 - 1e-3;

// d(roll_rate, pitch_rate) / d(omega)
Eigen::Matrix<double, 2, 3> rateInputJacobian(double roll, double pitch) {
  const double sr = std::sin(roll), cr = std::cos(roll), tp = std::tan(pitch);
  Eigen::Matrix<double, 2, 3> g;
  g << 1.0, sr * tp, cr * tp,
       0.0, cr, -sr;
  return g;
}

void symmetrize(Eigen::Matrix2d& m) { m = 0.5 * (m + m.transpose()).eval(); }

AttitudeState predictStep(const AttitudeState& s, const Vec3& omega, double dt, const EkfConfig& cfg) {
  const double sr = std::sin(s.roll), cr = std::cos(s.roll);
  const double tp = std::tan(s.pitch), sec2 = 1.0 + tp * tp;
  const double wy = omega.y(), wz = omega.z();

  Eigen::Matrix2d jac;
  jac << (wy * cr - wz * sr) * tp, (wy * sr + wz * cr) * sec2,
         -wy * sr - wz * cr,       0.0;
  const Eigen::Matrix2d f = Eigen::Matrix2d::Identity() + dt * jac;
  const auto g = rateInputJacobian(s.roll, s.pitch);
  const double q = cfg.gyro_noise_density * cfg.gyro_noise_density;

  const Eigen::Vector2d rates = tiltRates(s.roll, s.pitch, omega);
  AttitudeState out;
  out.roll = wrapAngle(s.roll + dt * rates.x());
  out.pitch = s.pitch + dt * rates.y();
  out.cov = f * s.cov * f.transpose() + dt * q * g * g.transpose();
  symmetrize(out.cov);
  if (!std::isfinite(out.pitch) || std::abs(out.pitch) >= kPitchLimit) throw NumericalDivergence(out.pitch);
  return out;
}

}  // namespace

NumericalDivergence::NumericalDivergence(double pitch)
    : std::runtime_error("NumericalDivergence: pitch " + std::to_string(rad2deg(pitch)) +
                         " deg reached the tan() singularity") {}

MeasurementRejected::MeasurementRejected(double norm, double gravity)
    : std::runtime_error("MeasurementRejected: |accel| = " + std::to_string(norm) + " m/s^2 vs g = " +
                         std::to_string(gravity)) {}

Vec3 predictedAccel(double roll, double pitch, double gravity) {
  const double cp = std::cos(pitch);
  return gravity * Vec3(-std::sin(pitch), std::sin(roll) * cp, std::cos(roll) * cp);
}

Eigen::Vector2d tiltRates(double roll, double pitch, const Vec3& omega) {
  const double sr = std::sin(roll), cr = std::cos(roll), tp = std::tan(pitch);
  return {omega.x() + omega.y() * sr * tp + omega.z() * cr * tp, omega.y() * cr - omega.z() * sr};
}

AttitudeState ekfPredict(const AttitudeState& s, const Vec3& omega, double dt, const EkfConfig& cfg) {
  if (!(dt > 0.0)) throw std::invalid_argument("ekfPredict: dt must be positive");
  const int steps = static_cast<int>(std::ceil(dt / cfg.max_dt));
  const double h = dt / steps;
  AttitudeState out = s;
  for (int i = 0; i < steps; ++i) out = predictStep(out, omega, h, cfg);
  return out;
}

AttitudeState ekfPredict(const AttitudeState& s, const ImuSample& imu, double dt, const EkfConfig& cfg) {
  return ekfPredict(s, imu.omega, dt, cfg);
}

AttitudeState ekfUpdate(const AttitudeState& s, const Vec3& accel, const EkfConfig& cfg) {
  const Vec3 a = cfg.flip_accel_sign ? Vec3(-accel) : accel;
  const double g = cfg.gravity;
  const double norm = a.norm();
  if (!std::isfinite(norm) || std::abs(norm - g) > cfg.gate * g) throw MeasurementRejected(norm, g);

  const double r = cfg.accel_noise_std * cfg.accel_noise_std;
  const Eigen::Vector2d x0(s.roll, s.pitch);
  Eigen::Vector2d x = x0;
  Eigen::Matrix<double, 2, 3> gain;
  Eigen::Matrix<double, 2, 3> pht;
  // Gauss-Newton relinearization; a single pass is the plain EKF update.
  for (int it = 0; it < std::max(1, cfg.update_iterations); ++it) {
    const double sr = std::sin(x.x()), cr = std::cos(x.x());
    const double sp = std::sin(x.y()), cp = std::cos(x.y());
    Eigen::Matrix<double, 3, 2> h;
    h << 0.0,          -g * cp,
         g * cr * cp,  -g * sr * sp,
         -g * sr * cp, -g * cr * sp;

    pht = s.cov * h.transpose();
    const Eigen::Matrix3d innov_cov = h * pht + r * Eigen::Matrix3d::Identity();
    const Eigen::LLT<Eigen::Matrix3d> llt(innov_cov);
    // gain^T = S^-1 (P H^T)^T
    gain = llt.solve(pht.transpose()).transpose();

    const Vec3 innovation = a - predictedAccel(x.x(), x.y(), g) - h * (x0 - x);
    const Eigen::Vector2d next = x0 + gain * innovation;
    const double step = (next - x).cwiseAbs().maxCoeff();
    x = next;
    if (step < 1e-13) break;
  }
  const Eigen::Vector2d dx = x - x0;

  AttitudeState out;
  out.roll = wrapAngle(s.roll + dx.x());
  out.pitch = s.pitch + dx.y();
  out.cov = s.cov - gain * pht.transpose();
  symmetrize(out.cov);
  if (std::abs(out.pitch) >= kPitchLimit) throw NumericalDivergence(out.pitch);
  return out;
}

AttitudeState stateFromAccel(const Vec3& accel, const EkfConfig& cfg) {
  const Vec3 a = cfg.flip_accel_sign ? Vec3(-accel) : accel;
  AttitudeState s;
  s.roll = std::atan2(a.y(), a.z());
  s.pitch = std::atan2(-a.x(), std::hypot(a.y(), a.z()));
  s.cov = Eigen::Matrix2d::Identity() * cfg.initial_cov;
  return s;
}

Pose3 fuseAsvPose(const AttitudeState& s, const SlamPose2D& slam, double asv_z) {
  return Pose3::fromEuler({slam.yaw, s.pitch, s.roll}, Vec3(slam.x, slam.y, asv_z));
}

void AttitudeFilter::reset(const AttitudeState& s, double t) {
  state_ = s;
  last_t_ = t;
}

bool AttitudeFilter::process(const ImuSample& imu) {
  if (!state_) {
    const double norm = (cfg_.flip_accel_sign ? Vec3(-imu.accel) : imu.accel).norm();
    if (std::abs(norm - cfg_.gravity) > cfg_.gate * cfg_.gravity) return false;
    reset(stateFromAccel(imu.accel, cfg_), imu.t);
    return true;
  }
  const double dt = imu.t - last_t_;
  if (dt > 0.0) state_ = ekfPredict(*state_, imu.omega, dt, cfg_);
  last_t_ = imu.t;
  try {
    state_ = ekfUpdate(*state_, imu.accel, cfg_);
  } catch (const MeasurementRejected&) {
    return false;
  }
  return true;
}

const AttitudeState& AttitudeFilter::state() const {
  if (!state_) throw std::logic_error("AttitudeFilter::state: filter not initialized");
  return *state_;
}

}  // namespace capsd
