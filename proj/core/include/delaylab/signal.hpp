#pragma once

#include "delaylab/types.hpp"

#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace delaylab {

/// Right-continuous piecewise-constant matrix-valued function of time.
///
/// Value v_s holds on [b_s, b_{s+1}); the last value extends to +infinity.
/// Queries before b_0 are out of range. Used for prehistories, disturbances,
/// damping gains, attraction weights and target selectors.
class StepSignal {
public:
    StepSignal() = default;
    StepSignal(std::vector<double> breakpoints, std::vector<Matrix> values);

    /// A signal equal to `value` on [start, infinity).
    static StepSignal constant(Matrix value, double start = -std::numeric_limits<double>::infinity());

    [[nodiscard]] bool empty() const noexcept { return !data_; }
    [[nodiscard]] Eigen::Index rows() const noexcept;
    [[nodiscard]] Eigen::Index cols() const noexcept;
    [[nodiscard]] double start() const noexcept;
    [[nodiscard]] std::span<const double> breakpoints() const noexcept;
    [[nodiscard]] std::span<const Matrix> values() const noexcept;

    [[nodiscard]] const Matrix& operator()(double t) const;

private:
    struct Data {
        std::vector<double> breakpoints;
        std::vector<Matrix> values;
    };
    std::shared_ptr<const Data> data_;
};

}  // namespace delaylab
