#include "delaylab/reduction.hpp"

#include "delaylab/dynamics.hpp"

#include <cmath>
#include <string>

namespace delaylab {

double exit_rate_factor(double b) {
    if (!(b > 0.0) || b > 1.0 + kRowSumTolerance)
        throw ReductionDomainError("diagonal weight " + std::to_string(b) + " outside (0, 1]");
    const double u = 1.0 - b;
    if (u < 1e-6) {
        // -ln(1 - u) / u = 1 + u/2 + u^2/3 + ...
        return 1.0 + u * (0.5 + u * (1.0 / 3.0 + u * 0.25));
    }
    return -std::log(b) / u;
}

ReductionResult reduce_discrete(const WeightSchedule& schedule, const DelaySchedule& delays) {
    if (!schedule.is_discrete()) throw KindError("reduce_discrete needs a discrete schedule");
    if (delays.kind() == DelayKind::sawtooth || !delays.is_integer_valued())
        throw ArgumentError("reduce_discrete needs integer delays");
    const int n = schedule.agents();
    if (delays.agents() != n) throw ArgumentError("weight and delay schedules disagree on the agent count");
    const auto steps = schedule.segments();
    const auto count = steps.size();
    if (static_cast<double>(count) > delays.horizon()) throw OutOfRangeError("delay schedule shorter than the weights");

    std::vector<double> bps(count);
    std::vector<Matrix> rates(count);
    std::vector<Matrix> offsets(count);
    for (std::size_t k = 0; k < count; ++k) {
        const Matrix& b = steps[k];
        bps[k] = static_cast<double>(k);
        rates[k] = Matrix::Zero(n, n);
        offsets[k] = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            if (!(b(i, i) > 0.0))
                throw ReductionDomainError("b_ii(k) = 0 at k = " + std::to_string(k) + ", i = " + std::to_string(i));
            const double factor = exit_rate_factor(b(i, i));
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                rates[k](i, j) = b(i, j) * factor;
                offsets[k](i, j) = delays.delay(i, j, static_cast<double>(k) + 0.5);
            }
        }
    }
    return {WeightSchedule::continuous(std::move(bps), std::move(rates), static_cast<double>(count)),
            DelaySchedule::sawtooth(std::move(offsets), delays.bound() + 1.0), schedule};
}

double verify_reduction(const WeightSchedule& schedule, const DelaySchedule& delays, std::span<const Matrix> window,
                        int k_end) {
    if (k_end < 0) throw ArgumentError("k_end must be nonnegative");
    if (window.size() < static_cast<std::size_t>(std::round(delays.bound())) + 1)
        throw ArgumentError("initial window shorter than the delay bound");
    const ReductionResult reduced = reduce_discrete(schedule, delays);
    const InitialCondition discrete_init = InitialCondition::from_window(0.0, window);
    const Trajectory x = simulate_discrete(schedule, delays, discrete_init, k_end);

    // The sawtooth bound is one larger, so hold the oldest value one more unit.
    const auto past = static_cast<double>(window.size() - 1);
    std::vector<double> bps{-past - 1.0};
    std::vector<Matrix> vals{window.front()};
    for (std::size_t s = 0; s + 1 < window.size(); ++s) {
        bps.push_back(-past + static_cast<double>(s));
        vals.push_back(window[s]);
    }
    const InitialCondition continuous_init{0.0, window.back(), StepSignal(std::move(bps), std::move(vals))};
    const Trajectory z =
        simulate_continuous(reduced.weights, reduced.delays, continuous_init, std::nullopt, k_end, 1.0);

    double worst = 0.0;
    for (int k = 0; k <= k_end; ++k)
        worst = std::max(worst, (x.at(k) - z.at(k)).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace delaylab
