#pragma once

#include <vector>

namespace fairbandit::detail {

/// Point of conv(points) nearest to `target` (Wolfe's minimum-norm-point
/// algorithm). All points must have the same dimension as `target`.
std::vector<double> nearest_in_hull(const std::vector<std::vector<double>>& points,
                                    const std::vector<double>& target);

}  // namespace fairbandit::detail
