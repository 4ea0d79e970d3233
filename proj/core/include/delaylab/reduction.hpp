#pragma once

#include "delaylab/schedule.hpp"

#include <span>

namespace delaylab {

/// Continuous model of a discrete averaging schedule: on [k, k+1)
/// a_ij = -b_ij(k) ln b_ii(k) / (1 - b_ii(k)) with sawtooth delays
/// h_ij(t) = t - k + h_ij(k). Its solution interpolates the discrete one at
/// integer times.
struct ReductionResult {
    WeightSchedule weights;
    DelaySchedule delays;
    WeightSchedule source;
};

/// -ln(b) / (1 - b) for b in (0, 1], with the removable singularity at 1
/// evaluated by series for b > 1 - 1e-6.
[[nodiscard]] double exit_rate_factor(double b);

[[nodiscard]] ReductionResult reduce_discrete(const WeightSchedule& schedule, const DelaySchedule& delays);

/// Simulates both systems from the window x(-h), ..., x(0) (oldest first) and
/// returns max over k <= k_end and i of |x_i(k) - z_i(k)|.
[[nodiscard]] double verify_reduction(const WeightSchedule& schedule, const DelaySchedule& delays,
                                      std::span<const Matrix> window, int k_end);

}  // namespace delaylab
