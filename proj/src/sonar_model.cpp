#include "capsd/sonar_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace capsd {

void SonarConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("SonarConfig: " + what); };
  if (!(hfov > 0.0 && hfov < kPi)) fail("hfov must lie in (0, pi)");
  if (!(vmin < vmax)) fail("vmin must be below vmax");
  if (!(vmin >= -kPi / 2 && vmax <= kPi / 2)) fail("vertical aperture must lie in [-pi/2, pi/2]");
  if (!(rmax > 0.0)) fail("rmax must be positive");
  if (img_w < 2 || img_h < 2) fail("image must be at least 2x2 pixels");
  if (!isRotation(mount.rot)) fail("mount rotation is not orthonormal");
}

PolarDetection pixelToPolar(const PixelDetection& px, const SonarConfig& cfg) {
  if (!(px.u >= 0.0 && px.u <= cfg.img_w - 1 && px.v >= 0.0 && px.v <= cfg.img_h - 1)) {
    std::ostringstream msg;
    msg << "OutOfImage: pixel (" << px.u << ", " << px.v << ") outside " << cfg.img_w << "x" << cfg.img_h;
    throw OutOfImage(msg.str());
  }
  PolarDetection pd;
  pd.azimuth = -0.5 * cfg.hfov + px.u * cfg.hfov / (cfg.img_w - 1);
  pd.range_m = px.v * cfg.rmax / (cfg.img_h - 1);
  pd.t = px.t;
  pd.confidence = px.confidence;
  return pd;
}

PixelDetection polarToPixel(const PolarDetection& pd, const SonarConfig& cfg) {
  if (!(pd.range_m >= 0.0 && pd.range_m <= cfg.rmax && std::abs(pd.azimuth) <= 0.5 * cfg.hfov)) {
    std::ostringstream msg;
    msg << "OutOfFov: range " << pd.range_m << " m, azimuth " << rad2deg(pd.azimuth) << " deg";
    throw OutOfFov(msg.str());
  }
  PixelDetection px;
  px.u = (pd.azimuth + 0.5 * cfg.hfov) * (cfg.img_w - 1) / cfg.hfov;
  px.v = pd.range_m * (cfg.img_h - 1) / cfg.rmax;
  px.t = pd.t;
  px.confidence = pd.confidence;
  return px;
}

const char* toString(FovCheck c) {
  switch (c) {
    case FovCheck::Inside: return "Inside";
    case FovCheck::BehindSonar: return "BehindSonar";
    case FovCheck::OutsideAzimuth: return "OutsideAzimuth";
    case FovCheck::OutsideAperture: return "OutsideAperture";
    case FovCheck::BeyondRange: return "BeyondRange";
  }
  return "Unknown";
}

SonarPolar toSonarPolar(const Vec3& p) {
  return {p.norm(), std::atan2(p.y(), p.x()), std::atan2(p.z(), std::hypot(p.x(), p.y()))};
}

FovResult inFov(const Vec3& p, const SonarConfig& cfg) {
  if (!(p.x() > 0.0)) return {false, FovCheck::BehindSonar};
  const SonarPolar sp = toSonarPolar(p);
  if (std::abs(sp.azimuth) > 0.5 * cfg.hfov) return {false, FovCheck::OutsideAzimuth};
  if (sp.elevation < cfg.vmin || sp.elevation > cfg.vmax) return {false, FovCheck::OutsideAperture};
  if (sp.range > cfg.rmax) return {false, FovCheck::BeyondRange};
  return {true, FovCheck::Inside};
}

SonarScan renderScan(const Pose3& world_T_sonar, std::span<const ScanTarget> targets, const SonarConfig& cfg,
                     ScanNoise noise, double t) {
  SonarScan scan;
  scan.width = cfg.img_w;
  scan.height = cfg.img_h;
  scan.t = t;
  scan.config = cfg;
  scan.grid.assign(static_cast<size_t>(cfg.img_w) * cfg.img_h, 0.0f);

  const Pose3 sonar_T_world = invert(world_T_sonar);
  for (const ScanTarget& target : targets) {
    const Vec3 p = transformPoint(sonar_T_world, target.center);
    if (!inFov(p, cfg)) continue;
    const SonarPolar sp = toSonarPolar(p);
    const PixelDetection c = polarToPixel({sp.range, sp.azimuth, t, 1.0}, cfg);

    // Blob extent: target radius expressed in range bins and azimuth bins.
    const double sigma_v = std::max(0.7, 0.5 * target.radius / cfg.rangeBin());
    const double sigma_u = std::max(0.7, 0.5 * target.radius / (std::max(sp.range, 1e-6) * cfg.azimuthBin()));
    const int ru = static_cast<int>(std::ceil(4.0 * sigma_u));
    const int rv = static_cast<int>(std::ceil(4.0 * sigma_v));
    const int u0 = std::max(0, static_cast<int>(std::floor(c.u)) - ru);
    const int u1 = std::min(cfg.img_w - 1, static_cast<int>(std::ceil(c.u)) + ru);
    const int v0 = std::max(0, static_cast<int>(std::floor(c.v)) - rv);
    const int v1 = std::min(cfg.img_h - 1, static_cast<int>(std::ceil(c.v)) + rv);
    for (int v = v0; v <= v1; ++v) {
      for (int u = u0; u <= u1; ++u) {
        const double du = (u - c.u) / sigma_u, dv = (v - c.v) / sigma_v;
        const double value = target.intensity * std::exp(-0.5 * (du * du + dv * dv));
        float& cell = scan.at(u, v);
        cell = std::min(1.0f, std::max(cell, static_cast<float>(value)));
      }
    }
  }

  if (noise.sigma > 0.0) {
    if (noise.rng == nullptr) throw std::invalid_argument("renderScan: noise requested without a generator");
    std::normal_distribution<double> gauss(0.0, noise.sigma);
    for (float& cell : scan.grid) cell = static_cast<float>(std::clamp(cell + gauss(*noise.rng), 0.0, 1.0));
  }
  return scan;
}

std::vector<PixelDetection> centroidDetect(const SonarScan& scan, double threshold, int min_area) {
  const int w = scan.width, h = scan.height;
  std::vector<char> visited(scan.grid.size(), 0);
  std::vector<int> stack;
  std::vector<PixelDetection> found;

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const size_t idx = static_cast<size_t>(v) * w + u;
      if (visited[idx] || scan.grid[idx] <= threshold) continue;

      double sum = 0.0, su = 0.0, sv = 0.0, peak = 0.0;
      int area = 0, umin = u, umax = u, vmin = v, vmax = v;
      visited[idx] = 1;
      stack.assign(1, static_cast<int>(idx));
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int cu = cur % w, cv = cur / w;
        const double val = scan.grid[cur];
        sum += val;
        su += val * cu;
        sv += val * cv;
        peak = std::max(peak, val);
        ++area;
        umin = std::min(umin, cu);
        umax = std::max(umax, cu);
        vmin = std::min(vmin, cv);
        vmax = std::max(vmax, cv);
        const int nbr[4][2] = {{cu - 1, cv}, {cu + 1, cv}, {cu, cv - 1}, {cu, cv + 1}};
        for (const auto& n : nbr) {
          if (n[0] < 0 || n[0] >= w || n[1] < 0 || n[1] >= h) continue;
          const size_t ni = static_cast<size_t>(n[1]) * w + n[0];
          if (visited[ni] || scan.grid[ni] <= threshold) continue;
          visited[ni] = 1;
          stack.push_back(static_cast<int>(ni));
        }
      }
      if (area < min_area) continue;
      PixelDetection d;
      d.u = su / sum;
      d.v = sv / sum;
      d.box_w = umax - umin + 1;
      d.box_h = vmax - vmin + 1;
      d.confidence = peak;
      d.t = scan.t;
      found.push_back(d);
    }
  }
  // Stable sort keeps raster order among equal peaks.
  std::stable_sort(found.begin(), found.end(),
                   [](const PixelDetection& a, const PixelDetection& b) { return a.confidence > b.confidence; });
  return found;
}

void writePgm(const SonarScan& scan, std::ostream& out) {
  out << "P5\n" << scan.width << " " << scan.height << "\n255\n";
  std::string row(static_cast<size_t>(scan.width), '\0');
  for (int v = 0; v < scan.height; ++v) {
    for (int u = 0; u < scan.width; ++u) {
      const double x = std::clamp(static_cast<double>(scan.at(u, v)), 0.0, 1.0);
      row[u] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * x)));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void writePgm(const SonarScan& scan, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  writePgm(scan, out);
}

}  // namespace capsd
