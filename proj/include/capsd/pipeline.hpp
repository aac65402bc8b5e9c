#pragma once

#include "capsd/capsd_solver.hpp"
#include "capsd/dataset.hpp"
#include "capsd/metrics.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace capsd {

inline constexpr const char* kEstimatesFormat = "capsd-estimates";
inline constexpr int kEstimatesVersion = 1;

/// One line of the estimates file: either a position or the error code the
/// detection at time t produced.
struct EstimateRecord {
  double t = 0.0;
  std::string code = "Ok";  // SolveStatus name or a pipeline error
  PositionEstimate estimate;
  bool ok() const { return code == "Ok"; }
};

struct PipelineResult {
  nlohmann::json header;
  std::vector<EstimateRecord> records;
  std::map<std::string, int> error_counts;
  std::optional<MetricsReport> metrics;  // set when the dataset carries gt_rov

  std::vector<TimedPosition> positions() const;
};

/// Replays the dataset in record order: IMU drives the tilt filter, SLAM
/// and depth are held as latest values, and each detection is solved
/// against the fused ASV pose. Per-detection failures are counted, never
/// thrown.
PipelineResult runPipeline(const Dataset& ds, double window = 0.05);

std::vector<TimedPosition> truthFromDataset(const Dataset& ds);

void writeEstimates(const PipelineResult& r, std::ostream& out);
void writeEstimates(const PipelineResult& r, const std::string& path);

/// Reads back what writeEstimates produced; records keep only t, code and
/// the position fields.
PipelineResult readEstimates(std::istream& in);
PipelineResult readEstimates(const std::string& path);

/// Associates the estimates with the dataset's truth and adds the error
/// counts. Throws EmptyOverlap when nothing pairs.
MetricsReport evaluate(const PipelineResult& estimates, const Dataset& ds, double window = 0.05);

}  // namespace capsd
