#pragma once

#include <string>
#include <vector>

#include "policybound/bounds.hpp"
#include "policybound/sim.hpp"

namespace policybound {

// Static horizontal-bar chart of per-unit bound intervals: one bar per
// unit colored by sign (green strictly positive, red strictly negative,
// gray otherwise), a vertical zero line, and dot markers for the interval
// endpoints at each multiplier in z_dots.
std::string bounds_svg(const std::vector<BoundResult>& bounds,
                       const std::vector<std::vector<BoundResult>>& z_dots);

// Static chart of the illustration bundle: analytic curves over x plus
// the per-unit effect scatter colored by realized version.
std::string illustration_svg(const IllustrationBundle& bundle);

}  // namespace policybound
