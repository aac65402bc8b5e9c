#pragma once

#include "capsd/attitude_ekf.hpp"
#include "capsd/capsd_solver.hpp"
#include "capsd/geometry.hpp"
#include "capsd/sonar_model.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace capsd {

// Line-delimited dataset: one JSON object {"payload", "t", "type"} per line,
// header first. Angles in records are radians, lengths metres, world z up.

inline constexpr const char* kDatasetFormat = "capsd-dataset";
inline constexpr int kDatasetVersion = 1;

struct DetectionRecord {
  PolarDetection polar;
  double u = 0.0;  // pixel the detector reported
  double v = 0.0;
};

struct GtRovRecord {
  Vec3 p = Vec3::Zero();
};

struct GtAsvRecord {
  Vec3 p = Vec3::Zero();
  EulerZYX euler;
};

using RecordPayload = std::variant<ImuSample, SlamPose2D, DepthSample, DetectionRecord, GtRovRecord, GtAsvRecord>;

struct Record {
  double t = 0.0;
  RecordPayload payload;
};

const char* recordTypeName(const RecordPayload& p);

struct Dataset {
  nlohmann::json header;  // {"format", "version", "scenario", ...}
  std::vector<Record> records;
};

class MalformedDataset : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json makeDatasetHeader(const nlohmann::json& scenario);

void writeDataset(const Dataset& ds, std::ostream& out);
void writeDataset(const Dataset& ds, const std::string& path);

/// Throws MalformedDataset (with the offending line number) on any schema
/// violation, unknown version or decreasing timestamps.
Dataset readDataset(std::istream& in);
Dataset readDataset(const std::string& path);

// Shared JSON helpers for the line formats.
nlohmann::json vecToJson(const Vec3& v);
Vec3 vecFromJson(const nlohmann::json& j);

}  // namespace capsd
