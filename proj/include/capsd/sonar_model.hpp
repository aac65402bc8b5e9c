#pragma once

#include "capsd/geometry.hpp"

#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace capsd {

/**
 * Forward-looking multi-beam sonar geometry.
 *
 * The image is a rectangular range/azimuth grid: column u runs over azimuth
 * from -hfov/2 (u = 0) to +hfov/2 (u = img_w - 1), row v over range from 0
 * (v = 0) to rmax (v = img_h - 1). Azimuth is measured from the sonar x-axis,
 * positive toward sonar +y; elevation from the sonar x-y plane, positive
 * toward sonar +z.
 */
struct SonarConfig {
  double hfov = deg2rad(130.0);
  double vmin = deg2rad(-10.0);
  double vmax = deg2rad(10.0);
  double rmax = 10.0;
  int img_w = 512;
  int img_h = 512;
  Pose3 mount;  // base_T_sonar

  double azimuthBin() const { return hfov / (img_w - 1); }
  double rangeBin() const { return rmax / (img_h - 1); }

  /// Throws std::invalid_argument on a malformed configuration.
  void validate() const;
};

struct PixelDetection {
  double u = 0.0;
  double v = 0.0;
  double box_w = 0.0;
  double box_h = 0.0;
  double confidence = 1.0;
  double t = 0.0;
};

struct PolarDetection {
  double range_m = 0.0;
  double azimuth = 0.0;
  double t = 0.0;
  double confidence = 1.0;
};

struct SonarScan {
  int width = 0;
  int height = 0;
  double t = 0.0;
  std::vector<float> grid;  // row-major, height x width, values in [0, 1]
  SonarConfig config;

  float at(int u, int v) const { return grid[static_cast<size_t>(v) * width + u]; }
  float& at(int u, int v) { return grid[static_cast<size_t>(v) * width + u]; }
};

class OutOfImage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfFov : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PolarDetection pixelToPolar(const PixelDetection& px, const SonarConfig& cfg);
PixelDetection polarToPixel(const PolarDetection& pd, const SonarConfig& cfg);

enum class FovCheck { Inside, BehindSonar, OutsideAzimuth, OutsideAperture, BeyondRange };

const char* toString(FovCheck c);

struct FovResult {
  bool inside = false;
  FovCheck reason = FovCheck::BehindSonar;
  explicit operator bool() const { return inside; }
};

/// FOV membership of a point given in sonar coordinates. Conditions are
/// tested in the order x > 0, azimuth, aperture, range.
FovResult inFov(const Vec3& point_sonar, const SonarConfig& cfg);

/// Range, azimuth and elevation of a sonar-frame point.
struct SonarPolar {
  double range = 0.0;
  double azimuth = 0.0;
  double elevation = 0.0;
};
SonarPolar toSonarPolar(const Vec3& point_sonar);

struct ScanTarget {
  Vec3 center;
  double radius = 0.3;
  double intensity = 1.0;
};

struct ScanNoise {
  double sigma = 0.0;              // additive Gaussian speckle, clamped into [0, 1]
  std::mt19937_64* rng = nullptr;  // required when sigma > 0
};

SonarScan renderScan(const Pose3& world_T_sonar, std::span<const ScanTarget> targets, const SonarConfig& cfg,
                     ScanNoise noise = {}, double t = 0.0);

/// 4-connected components above threshold, each reported at its
/// intensity-weighted centroid, ordered by descending peak intensity.
/// Components smaller than min_area pixels are ignored.
std::vector<PixelDetection> centroidDetect(const SonarScan& scan, double threshold, int min_area = 4);

/// Binary (P5) 8-bit portable graymap.
void writePgm(const SonarScan& scan, std::ostream& out);
void writePgm(const SonarScan& scan, const std::string& path);

}  // namespace capsd
