#pragma once

#include "delaylab/graph.hpp"
#include "delaylab/types.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace delaylab {

enum class ScheduleKind { continuous, discrete };

/// Time-varying nonnegative weight matrix A(t).
///
/// Continuous kind: piecewise-constant on [b_s, b_{s+1}), the last segment
/// extends to the horizon. Diagonals are zeroed on construction since the
/// Laplacian flow only sums over j != i.
///
/// Discrete kind: a sequence B(0), ..., B(K-1) of row-stochastic matrices;
/// the horizon is K and B(k) is active on [k, k+1).
///
/// Instances share their (immutable) storage, so copies are cheap.
class WeightSchedule {
public:
    static WeightSchedule continuous(std::vector<double> breakpoints,
                                     std::vector<Matrix> segments,
                                     double horizon);
    static WeightSchedule discrete(std::vector<Matrix> steps);
    static WeightSchedule constant(const Matrix& weights, double horizon);

    [[nodiscard]] int agents() const noexcept;
    [[nodiscard]] ScheduleKind kind() const noexcept;
    [[nodiscard]] bool is_discrete() const noexcept { return kind() == ScheduleKind::discrete; }
    [[nodiscard]] double horizon() const noexcept;
    [[nodiscard]] std::span<const double> breakpoints() const noexcept;
    [[nodiscard]] std::span<const Matrix> segments() const noexcept;

    /// Index of the segment active at t (right-continuous at breakpoints).
    [[nodiscard]] std::size_t segment_index(double t) const;
    /// End time of segment s (the next breakpoint or the horizon).
    [[nodiscard]] double segment_end(std::size_t s) const;
    [[nodiscard]] const Matrix& evaluate(double t) const;

private:
    struct Data;
    explicit WeightSchedule(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
    std::shared_ptr<const Data> data_;
};

/// A_{t1}^{t2}: exact integral over [t1, t2) for continuous schedules, the
/// sum B(t1) + ... + B(t2 - 1) for discrete ones.
[[nodiscard]] Matrix integrate_weights(const WeightSchedule& schedule, double t1, double t2);

struct PersistentEstimate {
    SkeletonGraph graph;
    Matrix totals;  ///< per-entry integral (or sum) over the whole horizon
};

/// Finite-horizon surrogate for the persistent-interaction graph: arc (j, i)
/// is kept when the total weight a_ij over the horizon reaches the threshold.
[[nodiscard]] PersistentEstimate persistent_graph_estimate(const WeightSchedule& schedule,
                                                           double growth_threshold);

/// a_ij(t) = alpha(t) * base_ij with alpha the indicator of the on-intervals.
/// The horizon defaults to the end of the last interval.
[[nodiscard]] WeightSchedule make_intermittent(const Matrix& base,
                                               std::span<const Interval> on_intervals,
                                               std::optional<double> horizon = std::nullopt);

enum class DelayKind { constant, piecewise_constant, sawtooth };

/// Per-link delays h_ij(t) in [0, bound].
///
/// The sawtooth kind stores integer offsets h0_ij(k) and evaluates to
/// h_ij(t) = t - k + h0_ij(k) on [k, k+1), which freezes the delayed
/// argument at the grid point k - h0_ij(k).
class DelaySchedule {
public:
    static DelaySchedule none(int agents);
    static DelaySchedule constant(const Matrix& delays, double bound);
    /// Every off-diagonal link delayed by h.
    static DelaySchedule uniform(int agents, double h);
    static DelaySchedule piecewise_constant(std::vector<double> breakpoints,
                                            std::vector<Matrix> segments,
                                            double bound);
    static DelaySchedule sawtooth(std::vector<Matrix> offsets, double bound);

    [[nodiscard]] int agents() const noexcept;
    [[nodiscard]] DelayKind kind() const noexcept;
    [[nodiscard]] double bound() const noexcept;
    /// Last time covered; infinite for the constant kind.
    [[nodiscard]] double horizon() const noexcept;
    [[nodiscard]] std::span<const double> breakpoints() const noexcept;
    [[nodiscard]] std::span<const Matrix> segments() const noexcept;
    [[nodiscard]] bool is_integer_valued() const noexcept;

    [[nodiscard]] std::size_t segment_index(double t) const;
    [[nodiscard]] double delay(int i, int j, double t) const;

    /// Delayed argument held over the step [begin, end) by the exact stepper:
    /// end - h(end-) for constant and piecewise-constant delays, k - h0(k) for
    /// sawtooth ones. Returns nullopt when the link is instantaneous (h == 0).
    [[nodiscard]] std::optional<double> frozen_argument(int i, int j, double begin, double end) const;

private:
    struct Data;
    explicit DelaySchedule(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
    std::shared_ptr<const Data> data_;
};

}  // namespace delaylab
