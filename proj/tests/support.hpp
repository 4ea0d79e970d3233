#pragma once

// Shared builders and closed-form oracles for the unit and acceptance tests.

#include "delaylab/connectivity.hpp"
#include "delaylab/dynamics.hpp"
#include "delaylab/schedule.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace delaylab::testing {

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

inline Matrix column(std::initializer_list<double> values) {
    Matrix m(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (double v : values) m(i++, 0) = v;
    return m;
}

inline Matrix complete_graph(int n, double w) {
    Matrix a = Matrix::Constant(n, n, w);
    a.diagonal().setZero();
    return a;
}

/// Directed path 0 -> 1 -> ... -> n-1 (agent k+1 listens to agent k).
inline Matrix chain_graph(int n, double w) {
    Matrix a = Matrix::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) a(k + 1, k) = w;
    return a;
}

/// Two agents, a_12 = a_21 = 1, no delay: x_1 - x_2 decays like e^{-2t}.
inline double two_agent_gap(double gap0, double t) { return gap0 * std::exp(-2.0 * t); }

inline std::vector<Interval> doubling_pulses(int last_power, double width = 1.0) {
    std::vector<Interval> on;
    for (int p = 0; p <= last_power; ++p) {
        const double s = std::ldexp(1.0, p);
        on.push_back({s, s + width});
    }
    return on;
}

/// Vanishing self-weight swap: B(k) = [[a_k, 1 - a_k], [1 - a_k, a_k]], a_k = 4^{-(k+1)}.
inline WeightSchedule swap_map(int steps) {
    std::vector<Matrix> b;
    for (int k = 0; k < steps; ++k) {
        const double a = std::pow(4.0, -(k + 1));
        b.push_back(mat({{a, 1.0 - a}, {1.0 - a, a}}));
    }
    return WeightSchedule::discrete(std::move(b));
}

/// Partial product prod_{m<k} (1 - 2 * 4^{-(m+1)}).
inline double swap_product(int k) {
    double p = 1.0;
    for (int m = 0; m < k; ++m) p *= 1.0 - 2.0 * std::pow(4.0, -(m + 1));
    return p;
}

struct RandomScenario {
    WeightSchedule weights;
    DelaySchedule delays;
    InitialCondition initial;
    std::optional<StepSignal> disturbance;
    double t_end = 0.0;
    double step = 0.25;
};

/// Random piecewise-constant schedule on a 0.25 grid, constant delays that are
/// multiples of 0.25 up to `bound`, piecewise-constant prehistory.
inline RandomScenario random_linear(std::mt19937& rng, int n, double bound = 2.0, double horizon = 10.0,
                                    bool with_disturbance = false) {
    const double grid = 0.25;
    std::uniform_int_distribution<int> gap(2, 12);
    std::uniform_real_distribution<double> weight(0.2, 2.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::bernoulli_distribution on(0.55);
    std::uniform_int_distribution<int> lag(0, static_cast<int>(bound / grid));

    std::vector<double> bps{0.0};
    while (bps.back() + grid * 2 < horizon) bps.push_back(bps.back() + grid * gap(rng));
    if (bps.back() >= horizon) bps.pop_back();
    std::vector<Matrix> segs;
    for (std::size_t s = 0; s < bps.size(); ++s) {
        Matrix a = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && on(rng)) a(i, j) = weight(rng);
        segs.push_back(a);
    }
    Matrix h = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) h(i, j) = grid * lag(rng);

    Matrix x = Matrix::Zero(n, 1);
    for (int i = 0; i < n; ++i) x(i, 0) = unit(rng);
    std::vector<double> pre_bps{-bound, -0.625 * bound, -0.25 * bound};
    std::vector<Matrix> pre_vals;
    for (std::size_t s = 0; s < pre_bps.size(); ++s) {
        Matrix v(n, 1);
        for (int i = 0; i < n; ++i) v(i, 0) = unit(rng);
        pre_vals.push_back(v);
    }
    RandomScenario sc{WeightSchedule::continuous(bps, segs, horizon), DelaySchedule::constant(h, bound),
                      InitialCondition{0.0, x, StepSignal(pre_bps, pre_vals)}, std::nullopt, horizon, grid};
    if (with_disturbance) {
        std::vector<double> fb{0.0, 1.5, 3.0, 5.25};
        std::vector<Matrix> fv;
        for (std::size_t s = 0; s < fb.size(); ++s) {
            Matrix v(n, 1);
            for (int i = 0; i < n; ++i) v(i, 0) = 0.5 * unit(rng);
            fv.push_back(s + 1 == fb.size() ? Matrix::Zero(n, 1) : v);
        }
        sc.disturbance = StepSignal(fb, fv);
    }
    return sc;
}

/// Random row-stochastic steps with diagonals >= floor and integer delays <= max_delay.
struct RandomDiscrete {
    WeightSchedule weights;
    DelaySchedule delays;
    std::vector<Matrix> window;
};

inline RandomDiscrete random_discrete(std::mt19937& rng, int n, int steps, int max_delay, double floor = 0.2) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> lag(0, max_delay);
    std::vector<Matrix> b;
    for (int k = 0; k < steps; ++k) {
        Matrix m = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            const double diag = floor + (1.0 - floor) * u(rng);
            double rest = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) rest += m(i, j) = u(rng) < 0.6 ? u(rng) : 0.0;
            m(i, i) = diag;
            if (rest > 0.0)
                for (int j = 0; j < n; ++j)
                    if (j != i) m(i, j) *= (1.0 - diag) / rest;
            if (rest == 0.0) m(i, i) = 1.0;
            // Renormalize to absorb rounding.
            m(i, i) = 1.0 - (m.row(i).sum() - m(i, i));
        }
        b.push_back(m);
    }
    Matrix h = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) h(i, j) = lag(rng);
    const double bound = h.maxCoeff();
    std::vector<Matrix> window;
    for (int s = 0; s <= static_cast<int>(bound); ++s) {
        Matrix v(n, 1);
        for (int i = 0; i < n; ++i) v(i, 0) = 2.0 * u(rng) - 1.0;
        window.push_back(v);
    }
    return {WeightSchedule::discrete(std::move(b)), DelaySchedule::constant(h, bound), std::move(window)};
}

}  // namespace delaylab::testing
