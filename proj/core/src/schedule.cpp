#include "delaylab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace delaylab {

namespace {

constexpr double kTimeSlack = 1e-12;

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

void require_square(const Matrix& m, int n, const char* what) {
    if (m.rows() != n || m.cols() != n)
        throw ArgumentError(std::string(what) + ": expected " + std::to_string(n) + "x" +
                            std::to_string(n) + " matrix");
}

void require_increasing(const std::vector<double>& breakpoints, const char* what) {
    if (breakpoints.empty()) throw ArgumentError(std::string(what) + ": no breakpoints");
    if (breakpoints.front() != 0.0) throw ArgumentError(std::string(what) + ": first breakpoint must be 0");
    for (std::size_t s = 1; s < breakpoints.size(); ++s)
        if (!(breakpoints[s] > breakpoints[s - 1]))
            throw ArgumentError(std::string(what) + ": breakpoints must be strictly increasing");
}

}  // namespace

struct WeightSchedule::Data {
    int agents = 0;
    ScheduleKind kind = ScheduleKind::continuous;
    std::vector<double> breakpoints;
    std::vector<Matrix> segments;
    double horizon = 0.0;
};

WeightSchedule WeightSchedule::continuous(std::vector<double> breakpoints,
                                          std::vector<Matrix> segments,
                                          double horizon) {
    require_increasing(breakpoints, "WeightSchedule::continuous");
    if (segments.size() != breakpoints.size())
        throw ArgumentError("WeightSchedule::continuous: one segment per breakpoint required");
    if (!(horizon >= breakpoints.back()) || !std::isfinite(horizon))
        throw ArgumentError("WeightSchedule::continuous: horizon precedes the last breakpoint");
    const int n = static_cast<int>(segments.front().rows());
    if (n <= 0) throw ArgumentError("WeightSchedule::continuous: empty matrices");
    for (auto& m : segments) {
        require_square(m, n, "WeightSchedule::continuous");
        if (!m.allFinite()) throw InvariantError("WeightSchedule::continuous: non-finite weight");
        if ((m.array() < 0.0).any()) throw InvariantError("WeightSchedule::continuous: negative weight");
        m.diagonal().setZero();
    }
    auto data = std::make_shared<Data>();
    data->agents = n;
    data->kind = ScheduleKind::continuous;
    data->breakpoints = std::move(breakpoints);
    data->segments = std::move(segments);
    data->horizon = horizon;
    return WeightSchedule(std::move(data));
}

WeightSchedule WeightSchedule::discrete(std::vector<Matrix> steps) {
    if (steps.empty()) throw ArgumentError("WeightSchedule::discrete: empty sequence");
    const int n = static_cast<int>(steps.front().rows());
    if (n <= 0) throw ArgumentError("WeightSchedule::discrete: empty matrices");
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const auto& m = steps[k];
        require_square(m, n, "WeightSchedule::discrete");
        if (!m.allFinite() || (m.array() < 0.0).any())
            throw InvariantError("WeightSchedule::discrete: negative or non-finite entry at step " +
                                 std::to_string(k));
        for (int i = 0; i < n; ++i) {
            if (std::abs(m.row(i).sum() - 1.0) > kRowSumTolerance)
                throw InvariantError("WeightSchedule::discrete: row " + std::to_string(i) +
                                     " of step " + std::to_string(k) + " is not stochastic");
        }
    }
    auto data = std::make_shared<Data>();
    data->agents = n;
    data->kind = ScheduleKind::discrete;
    data->breakpoints.resize(steps.size());
    for (std::size_t k = 0; k < steps.size(); ++k) data->breakpoints[k] = static_cast<double>(k);
    data->horizon = static_cast<double>(steps.size());
    data->segments = std::move(steps);
    return WeightSchedule(std::move(data));
}

WeightSchedule WeightSchedule::constant(const Matrix& weights, double horizon) {
    return continuous({0.0}, {weights}, horizon);
}

int WeightSchedule::agents() const noexcept { return data_->agents; }
ScheduleKind WeightSchedule::kind() const noexcept { return data_->kind; }
double WeightSchedule::horizon() const noexcept { return data_->horizon; }
std::span<const double> WeightSchedule::breakpoints() const noexcept { return data_->breakpoints; }
std::span<const Matrix> WeightSchedule::segments() const noexcept { return data_->segments; }

std::size_t WeightSchedule::segment_index(double t) const {
    const auto& d = *data_;
    if (d.kind == ScheduleKind::discrete) {
        if (!(t >= 0.0) || !(t < d.horizon))
            throw OutOfRangeError("WeightSchedule: step " + std::to_string(t) + " outside [0, " +
                                  std::to_string(d.horizon) + ")");
        return static_cast<std::size_t>(std::floor(t));
    }
    if (!(t >= -kTimeSlack) || !(t <= d.horizon + kTimeSlack))
        throw OutOfRangeError("WeightSchedule: time " + std::to_string(t) + " outside [0, " +
                              std::to_string(d.horizon) + "]");
    auto it = std::upper_bound(d.breakpoints.begin(), d.breakpoints.end(), t);
    if (it == d.breakpoints.begin()) return 0;
    return static_cast<std::size_t>(std::distance(d.breakpoints.begin(), it) - 1);
}

double WeightSchedule::segment_end(std::size_t s) const {
    const auto& d = *data_;
    return s + 1 < d.breakpoints.size() ? d.breakpoints[s + 1] : d.horizon;
}

const Matrix& WeightSchedule::evaluate(double t) const { return data_->segments[segment_index(t)]; }

Matrix integrate_weights(const WeightSchedule& schedule, double t1, double t2) {
    if (t2 < t1) throw ArgumentError("integrate_weights: reversed interval");
    const int n = schedule.agents();
    Matrix total = Matrix::Zero(n, n);
    if (t1 < 0.0 || t2 > schedule.horizon() + kTimeSlack)
        throw OutOfRangeError("integrate_weights: interval outside the horizon");
    if (schedule.is_discrete()) {
        if (!is_integer(t1) || !is_integer(t2))
            throw ArgumentError("integrate_weights: discrete schedules need integer bounds");
        const auto segs = schedule.segments();
        for (auto k = static_cast<std::size_t>(t1); k < static_cast<std::size_t>(t2); ++k) total += segs[k];
        return total;
    }
    if (t1 == t2) return total;
    const auto bps = schedule.breakpoints();
    const auto segs = schedule.segments();
    for (std::size_t s = schedule.segment_index(t1); s < segs.size(); ++s) {
        const double lo = std::max(t1, bps[s]);
        const double hi = std::min(t2, schedule.segment_end(s));
        if (hi <= lo) {
            if (bps[s] >= t2) break;
            continue;
        }
        total += (hi - lo) * segs[s];
    }
    return total;
}

PersistentEstimate persistent_graph_estimate(const WeightSchedule& schedule, double growth_threshold) {
    if (!(growth_threshold > 0.0)) throw ArgumentError("persistent_graph_estimate: threshold must be positive");
    Matrix totals = integrate_weights(schedule, 0.0, schedule.horizon());
    totals.diagonal().setZero();
    return {epsilon_skeleton(totals, growth_threshold), std::move(totals)};
}

WeightSchedule make_intermittent(const Matrix& base, std::span<const Interval> on_intervals,
                                 std::optional<double> horizon) {
    if (base.rows() != base.cols() || base.rows() == 0)
        throw ArgumentError("make_intermittent: base must be a nonempty square matrix");
    const auto n = base.rows();
    double previous_end = 0.0;
    for (const auto& iv : on_intervals) {
        if (!(iv.begin >= 0.0) || !(iv.end > iv.begin))
            throw ArgumentError("make_intermittent: each on-interval needs 0 <= begin < end");
        if (iv.begin < previous_end)
            throw ArgumentError("make_intermittent: on-intervals overlap or are not increasing");
        previous_end = iv.end;
    }
    const double end = horizon.value_or(previous_end);
    if (end < previous_end) throw ArgumentError("make_intermittent: horizon cuts an on-interval");

    const Matrix zero = Matrix::Zero(n, n);
    std::vector<double> breakpoints;
    std::vector<Matrix> segments;
    auto push = [&](double t, const Matrix& m) {
        if (!breakpoints.empty() && breakpoints.back() == t) {
            segments.back() = m;
            return;
        }
        breakpoints.push_back(t);
        segments.push_back(m);
    };
    push(0.0, zero);
    for (const auto& iv : on_intervals) {
        push(iv.begin, base);
        push(iv.end, zero);
    }
    // A trailing zero segment that starts exactly at the horizon carries no time.
    if (breakpoints.size() > 1 && breakpoints.back() == end) {
        breakpoints.pop_back();
        segments.pop_back();
    }
    return WeightSchedule::continuous(std::move(breakpoints), std::move(segments), end);
}

// --- DelaySchedule -------------------------------------------------------

struct DelaySchedule::Data {
    int agents = 0;
    DelayKind kind = DelayKind::constant;
    double bound = 0.0;
    std::vector<double> breakpoints;
    std::vector<Matrix> segments;
    double horizon = std::numeric_limits<double>::infinity();
};

namespace {

void validate_delays(const Matrix& m, int n, double bound, const char* what) {
    require_square(m, n, what);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double h = m(i, j);
            if (!(h >= 0.0) || !(h <= bound))
                throw InvariantError(std::string(what) + ": delay " + std::to_string(h) + " outside [0, " +
                                     std::to_string(bound) + "]");
        }
}

}  // namespace

DelaySchedule DelaySchedule::none(int agents) { return constant(Matrix::Zero(agents, agents), 0.0); }

DelaySchedule DelaySchedule::constant(const Matrix& delays, double bound) {
    if (!(bound >= 0.0) || !std::isfinite(bound)) throw ArgumentError("DelaySchedule: bound must be finite and >= 0");
    const int n = static_cast<int>(delays.rows());
    validate_delays(delays, n, bound, "DelaySchedule::constant");
    auto data = std::make_shared<Data>();
    data->agents = n;
    data->kind = DelayKind::constant;
    data->bound = bound;
    data->breakpoints = {0.0};
    data->segments = {delays};
    data->segments.front().diagonal().setZero();
    return DelaySchedule(std::move(data));
}

DelaySchedule DelaySchedule::uniform(int agents, double h) {
    Matrix m = Matrix::Constant(agents, agents, h);
    m.diagonal().setZero();
    return constant(m, h);
}

DelaySchedule DelaySchedule::piecewise_constant(std::vector<double> breakpoints, std::vector<Matrix> segments,
                                                double bound) {
    require_increasing(breakpoints, "DelaySchedule::piecewise_constant");
    if (segments.size() != breakpoints.size())
        throw ArgumentError("DelaySchedule::piecewise_constant: one segment per breakpoint required");
    if (!(bound >= 0.0) || !std::isfinite(bound)) throw ArgumentError("DelaySchedule: bound must be finite and >= 0");
    const int n = static_cast<int>(segments.front().rows());
    for (auto& m : segments) {
        validate_delays(m, n, bound, "DelaySchedule::piecewise_constant");
        m.diagonal().setZero();
    }
    auto data = std::make_shared<Data>();
    data->agents = n;
    data->kind = DelayKind::piecewise_constant;
    data->bound = bound;
    data->breakpoints = std::move(breakpoints);
    data->segments = std::move(segments);
    return DelaySchedule(std::move(data));
}

DelaySchedule DelaySchedule::sawtooth(std::vector<Matrix> offsets, double bound) {
    if (offsets.empty()) throw ArgumentError("DelaySchedule::sawtooth: no unit intervals");
    if (!(bound >= 1.0) || !std::isfinite(bound))
        throw ArgumentError("DelaySchedule::sawtooth: bound must be at least 1");
    const int n = static_cast<int>(offsets.front().rows());
    for (auto& m : offsets) {
        require_square(m, n, "DelaySchedule::sawtooth");
        m.diagonal().setZero();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (!is_integer(m(i, j)) || m(i, j) < 0.0)
                    throw InvariantError("DelaySchedule::sawtooth: offsets must be nonnegative integers");
                if (m(i, j) + 1.0 > bound)
                    throw InvariantError("DelaySchedule::sawtooth: offset + 1 exceeds the bound");
            }
    }
    auto data = std::make_shared<Data>();
    data->agents = n;
    data->kind = DelayKind::sawtooth;
    data->bound = bound;
    data->breakpoints.resize(offsets.size());
    for (std::size_t k = 0; k < offsets.size(); ++k) data->breakpoints[k] = static_cast<double>(k);
    data->horizon = static_cast<double>(offsets.size());
    data->segments = std::move(offsets);
    return DelaySchedule(std::move(data));
}

int DelaySchedule::agents() const noexcept { return data_->agents; }
DelayKind DelaySchedule::kind() const noexcept { return data_->kind; }
double DelaySchedule::bound() const noexcept { return data_->bound; }
double DelaySchedule::horizon() const noexcept { return data_->horizon; }
std::span<const double> DelaySchedule::breakpoints() const noexcept { return data_->breakpoints; }
std::span<const Matrix> DelaySchedule::segments() const noexcept { return data_->segments; }

bool DelaySchedule::is_integer_valued() const noexcept {
    const auto& d = *data_;
    if (d.kind == DelayKind::sawtooth) return false;
    for (double b : d.breakpoints)
        if (!is_integer(b)) return false;
    for (const auto& m : d.segments)
        for (Eigen::Index k = 0; k < m.size(); ++k)
            if (!is_integer(m.data()[k])) return false;
    return true;
}

std::size_t DelaySchedule::segment_index(double t) const {
    const auto& d = *data_;
    if (d.kind == DelayKind::constant) return 0;
    if (!(t >= -kTimeSlack) || !(t <= d.horizon))
        throw OutOfRangeError("DelaySchedule: time " + std::to_string(t) + " outside the schedule");
    auto it = std::upper_bound(d.breakpoints.begin(), d.breakpoints.end(), t);
    if (it == d.breakpoints.begin()) return 0;
    return std::min<std::size_t>(static_cast<std::size_t>(std::distance(d.breakpoints.begin(), it) - 1),
                                 d.segments.size() - 1);
}

double DelaySchedule::delay(int i, int j, double t) const {
    const auto& d = *data_;
    if (i == j) return 0.0;
    const std::size_t s = segment_index(t);
    const double value = d.segments[s](i, j);
    if (d.kind == DelayKind::sawtooth) return t - static_cast<double>(s) + value;
    return value;
}

std::optional<double> DelaySchedule::frozen_argument(int i, int j, double begin, double end) const {
    const auto& d = *data_;
    const double mid = 0.5 * (begin + end);
    const std::size_t s = segment_index(mid);
    const double value = d.segments[s](i, j);
    if (d.kind == DelayKind::sawtooth) return static_cast<double>(s) - value;
    if (value == 0.0) return std::nullopt;
    return end - value;
}

}  // namespace delaylab
