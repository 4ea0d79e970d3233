#include "delaylab/evolution.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

namespace delaylab {

namespace {

Trajectory column_run(const WeightSchedule& weights, const DelaySchedule& delays, double from, double to,
                      double step, int column) {
    const int n = weights.agents();
    Matrix e = Matrix::Zero(n, 1);
    e(column, 0) = 1.0;
    const auto init = InitialCondition::zero_history(from, e, delays.bound());
    if (weights.is_discrete()) {
        const double steps = to - from;
        if (steps != std::round(steps)) throw ArgumentError("discrete evolutionary matrices need integer times");
        return simulate_discrete(weights, delays, init, static_cast<int>(steps));
    }
    return simulate_continuous(weights, delays, init, std::nullopt, to, step);
}

// int_0^dt e^{M s} ds by composite 5-point Gauss-Legendre, panels short
// enough that each panel sees |M| h <= 0.25.
Matrix integrated_exponential(const Matrix& m, double dt) {
    static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                                 0.5384693101056831, 0.9061798459386640};
    static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                   0.4786286704993665, 0.2369268850561891};
    const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
    const int panels = std::max(1, static_cast<int>(std::ceil(norm * dt / 0.25)));
    const double h = dt / panels;
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (int p = 0; p < panels; ++p)
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const double s = h * (p + 0.5 * (nodes[q] + 1.0));
            out += (0.5 * h * weights[q]) * Matrix((m * s).exp());
        }
    return out;
}

double prehistory_extreme(const InitialCondition& init, double history, int coord, bool upper) {
    double v = upper ? init.state.col(coord).maxCoeff() : init.state.col(coord).minCoeff();
    if (!(history > 0.0)) return v;
    const auto bps = init.prehistory.breakpoints();
    const auto vals = init.prehistory.values();
    const double lo = init.start_time - history;
    for (std::size_t s = 0; s < bps.size(); ++s) {
        const double end = s + 1 < bps.size() ? bps[s + 1] : std::numeric_limits<double>::infinity();
        if (end <= lo || bps[s] >= init.start_time) continue;
        v = upper ? std::max(v, vals[s].col(coord).maxCoeff()) : std::min(v, vals[s].col(coord).minCoeff());
    }
    return v;
}

}  // namespace

void validate_evolutionary(EvolutionaryMatrix& u) {
    if (u.matrix.size() == 0) return;
    if (u.matrix.minCoeff() < -1e-12)
        throw InvariantError("evolutionary matrix has a negative entry " + std::to_string(u.matrix.minCoeff()));
    if (u.row_sums().maxCoeff() > 1.0 + 1e-9)
        throw InvariantError("evolutionary matrix row sum exceeds 1: " + std::to_string(u.row_sums().maxCoeff()));
    u.matrix = u.matrix.cwiseMax(0.0);
}

EvolutionaryMatrix compute_evolutionary(const WeightSchedule& weights, const DelaySchedule& delays, double from,
                                        double to, double step) {
    const double t[] = {to};
    return compute_evolutionary_series(weights, delays, from, t, step).front();
}

std::vector<EvolutionaryMatrix> compute_evolutionary_series(const WeightSchedule& weights,
                                                            const DelaySchedule& delays, double from,
                                                            std::span<const double> times, double step) {
    if (times.empty()) return {};
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < from) throw ArgumentError("evolutionary matrix needs t >= t*");
        if (k > 0 && times[k] < times[k - 1]) throw ArgumentError("evolutionary times must be increasing");
    }
    const int n = weights.agents();
    std::vector<EvolutionaryMatrix> out(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        out[k].from = from;
        out[k].to = times[k];
        out[k].matrix = Matrix::Zero(n, n);
    }
    for (int c = 0; c < n; ++c) {
        const Trajectory run = column_run(weights, delays, from, times.back(), step, c);
        for (std::size_t k = 0; k < times.size(); ++k) {
            auto idx = run.index_of(times[k]);
            if (idx) {
                out[k].matrix.col(c) = run.states[*idx].col(0);
                out[k].scheme = run.scheme;
                out[k].step = run.step;
            } else {
                const Trajectory own = column_run(weights, delays, from, times[k], step, c);
                out[k].matrix.col(c) = own.final_state().col(0);
                out[k].scheme = own.scheme;
                out[k].step = own.step;
            }
        }
    }
    for (auto& u : out) validate_evolutionary(u);
    return out;
}

RowSumFloor verify_row_sum_floor(const EvolutionaryMatrix& u, double mu) {
    RowSumFloor r;
    const auto n = u.matrix.rows();
    r.psi = std::exp(-static_cast<double>(n - 1) * mu);
    r.floor = n == 0 ? 1.0 : u.row_sums().minCoeff();
    r.ok = r.floor >= r.psi - 1e-9;
    return r;
}

SegmentStructure verify_segment_structure(const WeightSchedule& weights, const DelaySchedule& delays,
                                          const ConnectivityCertificate& certificate, int p, double step) {
    if (weights.is_discrete()) throw KindError("segment structure applies to continuous schedules");
    const auto& seq = certificate.sequence;
    if (p < 0 || static_cast<std::size_t>(p) + 2 >= seq.size())
        throw ArgumentError("certificate horizon too short for p = " + std::to_string(p));
    const double h = delays.bound();
    for (int q = p; q < p + 2; ++q)
        if (seq[q + 1] - seq[q] < h - 1e-12)
            throw ArgumentError("certificate gaps must reach the delay bound; thin it first");
    const int n = weights.agents();
    SegmentStructure s;
    s.index = p;
    s.span = {seq[p], seq[p + 2]};
    s.eta = std::exp(-2.0 * (n - 1) * certificate.ell);
    s.epsilon = certificate.epsilon * std::exp(-3.0 * (n - 1) * certificate.ell);
    const EvolutionaryMatrix u = compute_evolutionary(weights, delays, seq[p], seq[p + 2], step);
    s.min_diagonal = u.matrix.diagonal().minCoeff();
    s.diagonal_ok = s.min_diagonal >= s.eta;
    // Largest threshold at which the skeleton of U stays quasi-strongly connected.
    std::vector<double> levels;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && u.matrix(i, j) > 0.0) levels.push_back(u.matrix(i, j));
    std::sort(levels.begin(), levels.end(), std::greater<>());
    s.connectivity_level = n == 1 ? std::numeric_limits<double>::infinity() : 0.0;
    for (double level : levels)
        if (is_quasi_strongly_connected(epsilon_skeleton(u.matrix, level)).connected) {
            s.connectivity_level = level;
            break;
        }
    s.connected = n == 1 || is_quasi_strongly_connected(epsilon_skeleton(u.matrix, s.epsilon)).connected;
    return s;
}

CauchyParts cauchy_parts(const WeightSchedule& weights, const DelaySchedule& delays, const InitialCondition& initial,
                         const std::optional<StepSignal>& disturbance, double t, double step) {
    if (weights.is_discrete()) throw KindError("the Cauchy formula is implemented for continuous schedules");
    const int n = weights.agents();
    const int m = initial.dims();
    const LinearSystem system{weights, delays, std::nullopt, disturbance};
    const StepPlan plan = plan_steps(system, initial, t, step);
    const double t0 = initial.start_time;
    const double d = plan.step;

    CauchyParts parts;
    parts.direct = simulate(system, initial, t, step).final_state();
    const EvolutionaryMatrix u0 = compute_evolutionary(weights, delays, t0, t, d);
    parts.homogeneous = u0.matrix * initial.state;
    parts.row_sums = u0.row_sums();
    parts.forced = Matrix::Zero(n, m);
    parts.history = Matrix::Zero(n, m);

    std::map<double, Matrix> propagators;  // U(t, s) by start time s
    const auto propagator = [&](double s) -> const Matrix& {
        auto it = propagators.find(s);
        if (it == propagators.end()) {
            Matrix u = s >= t ? Matrix(Matrix::Identity(n, n)) : compute_evolutionary(weights, delays, s, t, d).matrix;
            it = propagators.emplace(s, std::move(u)).first;
        }
        return it->second;
    };
    const auto history_value = [&](double tau, int j) -> Eigen::RowVectorXd {
        if (plan.scheme == Scheme::exact_exponential) {
            const long idx = std::lround((tau - t0) / d);
            return initial.prehistory(t0 + (static_cast<double>(idx) + 0.5) * d).row(j);
        }
        return initial.prehistory(tau).row(j);
    };
    const double before = t0 - 1e-9 * std::max(1.0, std::abs(t0));

    if (plan.scheme == Scheme::exact_exponential) {
        Matrix cached_gen;
        Matrix cached_int;
        for (std::size_t k = 0; k + 1 < plan.times.size(); ++k) {
            const double a = plan.times[k];
            const double b = plan.times[k + 1];
            const double mid = 0.5 * (a + b);
            const Matrix& w = weights.evaluate(mid);
            Matrix gen = Matrix::Zero(n, n);
            Matrix g = Matrix::Zero(n, m);
            for (int i = 0; i < n; ++i) {
                double alpha = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (j == i || w(i, j) == 0.0) continue;
                    alpha += w(i, j);
                    const auto tau = delays.frozen_argument(i, j, a, b);
                    if (!tau) gen(i, j) = w(i, j);
                    else if (*tau < before) g.row(i) += w(i, j) * history_value(*tau, j);
                }
                gen(i, i) = -alpha;
            }
            const Matrix f = disturbance ? Matrix((*disturbance)(mid)) : Matrix::Zero(n, m);
            if (g.isZero(0.0) && f.isZero(0.0)) continue;
            if (cached_gen.size() == 0 || cached_gen.rows() != n || !(cached_gen.array() == gen.array()).all()) {
                cached_gen = gen;
                cached_int = integrated_exponential(gen, b - a);
            }
            const Matrix& u = propagator(b);
            parts.forced += u * cached_int * f;
            parts.history += u * cached_int * g;
        }
        return parts;
    }

    // Trapezoidal rule on the fallback grid.
    for (std::size_t k = 0; k + 1 < plan.times.size(); ++k) {
        const double a = plan.times[k];
        const double b = plan.times[k + 1];
        const double mid = 0.5 * (a + b);
        const Matrix& w = weights.evaluate(mid);
        const Matrix f = disturbance ? Matrix((*disturbance)(mid)) : Matrix::Zero(n, m);
        for (const double xi : {a, b}) {
            Matrix g = Matrix::Zero(n, m);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (j == i || w(i, j) == 0.0) continue;
                    const double tau = delays.kind() == DelayKind::sawtooth ? *delays.frozen_argument(i, j, a, b)
                                                                             : xi - delays.delay(i, j, mid);
                    if (tau < before) g.row(i) += w(i, j) * history_value(tau, j);
                }
            const Matrix& u = propagator(xi);
            parts.forced += 0.5 * (b - a) * u * f;
            parts.history += 0.5 * (b - a) * u * g;
        }
    }
    return parts;
}

double reconstruct_cauchy(const WeightSchedule& weights, const DelaySchedule& delays, const InitialCondition& initial,
                          const std::optional<StepSignal>& disturbance, double t, double step) {
    return cauchy_parts(weights, delays, initial, disturbance, t, step).discrepancy();
}

SandwichCheck check_sandwich(const WeightSchedule& weights, const DelaySchedule& delays,
                             const InitialCondition& initial, const std::optional<StepSignal>& disturbance, double t,
                             double step, double tolerance) {
    const CauchyParts parts = cauchy_parts(weights, delays, initial, disturbance, t, step);
    const Matrix middle = parts.direct - parts.homogeneous - parts.forced;
    const double h = delays.bound();
    SandwichCheck r;
    r.worst_violation = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < initial.dims(); ++c) {
        const double lo = prehistory_extreme(initial, h, c, false);
        const double hi = prehistory_extreme(initial, h, c, true);
        for (int i = 0; i < initial.agents(); ++i) {
            const double slack = 1.0 - parts.row_sums(i);
            r.worst_violation = std::max({r.worst_violation, lo * slack - middle(i, c), middle(i, c) - hi * slack});
        }
    }
    r.ok = r.worst_violation <= tolerance;
    return r;
}

double semigroup_discrepancy(const WeightSchedule& weights, const DelaySchedule& delays, double t0, double t1,
                             double t2, double step) {
    if (!(t0 <= t1 && t1 <= t2)) throw ArgumentError("semigroup check needs t0 <= t1 <= t2");
    const int n = weights.agents();
    const double h = delays.bound();
    double worst = 0.0;
    for (int c = 0; c < n; ++c) {
        const Trajectory run = column_run(weights, delays, t0, t2, step, c);
        const auto mid = run.index_of(t1);
        if (!mid) throw ArgumentError("t1 is not a grid point of the run");
        std::vector<double> bps;
        std::vector<Matrix> vals;
        for (std::size_t k = 0; k < *mid; ++k) {
            if (run.times[k + 1] <= t1 - h) continue;
            bps.push_back(run.times[k]);
            vals.push_back(run.states[k]);
        }
        InitialCondition init{t1, run.states[*mid],
                              bps.empty() ? StepSignal::constant(run.states[*mid], t1)
                                          : StepSignal(std::move(bps), std::move(vals))};
        const CauchyParts parts = cauchy_parts(weights, delays, init, std::nullopt, t2, run.step);
        worst = std::max(worst, (parts.reconstructed() - run.final_state()).cwiseAbs().maxCoeff());
    }
    return worst;
}

ConsensusLinks consensus_from_rows(std::span<const EvolutionaryMatrix> sequence, double tolerance) {
    ConsensusLinks out;
    if (sequence.empty()) return out;
    const Matrix& last = sequence.back().matrix;
    const auto n = last.rows();
    out.linked = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
    std::vector<bool> settled(static_cast<std::size_t>(n), false);
    if (sequence.size() >= 2) {
        const Matrix& prev = sequence[sequence.size() - 2].matrix;
        for (Eigen::Index i = 0; i < n; ++i)
            settled[static_cast<std::size_t>(i)] = (last.row(i) - prev.row(i)).cwiseAbs().maxCoeff() <= tolerance;
    }
    out.global = true;
    for (Eigen::Index i = 0; i < n; ++i) {
        out.linked(i, i) = true;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool agree = (last.row(i) - last.row(j)).cwiseAbs().maxCoeff() <= tolerance;
            out.linked(i, j) = agree && settled[static_cast<std::size_t>(i)] && settled[static_cast<std::size_t>(j)];
            out.global = out.global && out.linked(i, j);
        }
    }
    return out;
}

}  // namespace delaylab
