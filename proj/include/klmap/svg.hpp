#pragma once

#include <string>
#include <vector>

#include "klmap/bounds.hpp"

namespace klmap {

/// Self-contained SVG plot of err_x and bound_x against n on a log y-axis.
/// Pure text output; nonpositive values are dropped from the log plot.
std::string bounds_convergence_svg(const std::vector<BoundReport>& reports);

}  // namespace klmap
