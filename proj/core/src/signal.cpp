#include "delaylab/signal.hpp"

#include <algorithm>
#include <string>

namespace delaylab {

StepSignal::StepSignal(std::vector<double> breakpoints, std::vector<Matrix> values) {
    if (breakpoints.empty() || breakpoints.size() != values.size())
        throw ArgumentError("StepSignal: need one value per breakpoint");
    for (std::size_t s = 1; s < breakpoints.size(); ++s)
        if (!(breakpoints[s] > breakpoints[s - 1]))
            throw ArgumentError("StepSignal: breakpoints must be strictly increasing");
    for (const auto& v : values) {
        if (v.rows() != values.front().rows() || v.cols() != values.front().cols())
            throw ArgumentError("StepSignal: inconsistent value shapes");
        if (!v.allFinite()) throw InvariantError("StepSignal: non-finite value");
    }
    data_ = std::make_shared<Data>(Data{std::move(breakpoints), std::move(values)});
}

StepSignal StepSignal::constant(Matrix value, double start) {
    return StepSignal({start}, {std::move(value)});
}

Eigen::Index StepSignal::rows() const noexcept { return data_ ? data_->values.front().rows() : 0; }
Eigen::Index StepSignal::cols() const noexcept { return data_ ? data_->values.front().cols() : 0; }
double StepSignal::start() const noexcept { return data_ ? data_->breakpoints.front() : 0.0; }

std::span<const double> StepSignal::breakpoints() const noexcept {
    if (!data_) return {};
    return data_->breakpoints;
}

std::span<const Matrix> StepSignal::values() const noexcept {
    if (!data_) return {};
    return data_->values;
}

const Matrix& StepSignal::operator()(double t) const {
    if (!data_) throw ArgumentError("StepSignal: evaluating an empty signal");
    const auto& bps = data_->breakpoints;
    if (t < bps.front())
        throw OutOfRangeError("StepSignal: time " + std::to_string(t) + " precedes the signal start " +
                              std::to_string(bps.front()));
    auto it = std::upper_bound(bps.begin(), bps.end(), t);
    return data_->values[static_cast<std::size_t>(std::distance(bps.begin(), it) - 1)];
}

}  // namespace delaylab
