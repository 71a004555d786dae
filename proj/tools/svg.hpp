#pragma once

#include <string>
#include <vector>

#include "seqsync/dynsim.hpp"
#include "seqsync/limits.hpp"

namespace seqsync::app {

/// Polar plot of one or more region boundaries (first is drawn solid).
std::string region_svg(const std::vector<RegionBoundary>& regions, const std::vector<std::string>& labels);

/// Estimated frequencies and d-axis voltages against time.
std::string trace_svg(const Trace& trace);

} // namespace seqsync::app
