#pragma once

#include "capsd/geometry.hpp"

#include <json.hpp>

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace capsd {

struct TimedPosition {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
};

struct PairedSample {
  double t = 0.0;
  Vec3 estimate = Vec3::Zero();
  Vec3 truth = Vec3::Zero();
};

struct Association {
  std::vector<PairedSample> pairs;
  size_t dropped = 0;
};

class EmptyOverlap : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pairs each estimate with truth linearly interpolated at its timestamp.
/// Outside the truth span an estimate is paired with the end sample only if
/// it lies within `window` seconds of it; otherwise it is dropped.
/// Both inputs must be time-ordered.
Association associate(std::span<const TimedPosition> estimates, std::span<const TimedPosition> truth,
                      double window = 0.05);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<int> x, y, z;  // counts per bin, one vector per axis
};

struct MetricsReport {
  Vec3 rmse = Vec3::Zero();
  Vec3 mean_error = Vec3::Zero();  // signed, estimate - truth
  double med = 0.0;
  double max_error = 0.0;
  size_t count = 0;
  size_t dropped = 0;
  Histogram histogram;
  std::map<std::string, int> error_counts;
};

MetricsReport computeMetrics(std::span<const PairedSample> pairs, int bins = 20);

/// Fixed millimetre resolution, one quantity per line.
std::string formatReport(const MetricsReport& r);
nlohmann::json reportToJson(const MetricsReport& r);

}  // namespace capsd
