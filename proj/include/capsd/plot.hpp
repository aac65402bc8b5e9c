#pragma once

#include "capsd/dataset.hpp"
#include "capsd/pipeline.hpp"

#include <string>
#include <vector>

namespace capsd {

/// Writes trajectory_xy.svg, axes.svg and histogram.svg into `dir` (created
/// if needed) and returns their paths. Throws EmptyOverlap when the
/// estimates do not pair with the dataset's truth.
std::vector<std::string> writePlots(const PipelineResult& estimates, const Dataset& ds, const std::string& dir,
                                    double window = 0.05);

}  // namespace capsd
