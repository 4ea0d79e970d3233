#pragma once

#include "delaylab/types.hpp"

namespace delaylab {

/// Euclidean distance from `point` to conv(rows of `vertices`), exact for
/// dimension m <= 3: the nearest point is the projection onto the affine
/// hull of some vertex subset of size <= m + 1 with nonnegative barycentric
/// coordinates, so all such subsets are enumerated.
[[nodiscard]] double distance_to_hull(const Eigen::RowVectorXd& point, const Matrix& vertices);

[[nodiscard]] double distance_to_ball(const Eigen::RowVectorXd& point, const Eigen::RowVectorXd& center,
                                      double radius);

}  // namespace delaylab
