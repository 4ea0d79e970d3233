#include "delaylab/dynamics.hpp"

#include "delaylab/geometry.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace delaylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxRefinement = 512;
constexpr std::size_t kMaxSteps = 20'000'000;

bool is_multiple(double value, double unit) {
    const double r = value / unit;
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
}

void check_initial(const InitialCondition& init, int n, double history) {
    if (init.state.rows() != n) throw ArgumentError("initial state has the wrong number of agents");
    if (init.state.cols() < 1) throw ArgumentError("initial state has no coordinates");
    if (!init.state.allFinite()) throw InvariantError("initial state is not finite");
    if (history > 0.0) {
        if (init.prehistory.empty()) throw ArgumentError("delays present but no prehistory supplied");
        if (init.prehistory.rows() != n || init.prehistory.cols() != init.state.cols())
            throw ArgumentError("prehistory shape does not match the initial state");
        const double need = init.start_time - history;
        if (init.prehistory.start() > need + 1e-9 * std::max(1.0, std::abs(need)))
            throw ArgumentError("prehistory starts after t* - h");
    }
}

void check_signal(const std::optional<StepSignal>& s, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (!s) return;
    if (s->empty() || s->rows() != rows || s->cols() != cols)
        throw ArgumentError(std::string(what) + " has the wrong shape");
}

void add_breaks_in(std::vector<double>& out, std::span<const double> points, double lo, double hi) {
    for (double b : points)
        if (b > lo && b < hi && std::isfinite(b)) out.push_back(b);
}

// All event times in (t*, t_end) plus the delay values the exact scheme must
// resolve. Offsets are relative to t*.
struct Events {
    std::vector<double> offsets;  // must be grid multiples
    std::vector<double> times;    // absolute event times inside the run
    double min_positive_delay = kInf;
};

Events collect_events(const LinearSystem& sys, const InitialCondition& init, double t_end) {
    Events ev;
    const double t0 = init.start_time;
    const double h = sys.delays.bound();
    add_breaks_in(ev.times, sys.weights.breakpoints(), t0, t_end);
    if (sys.damping) add_breaks_in(ev.times, sys.damping->breakpoints(), t0, t_end);
    if (sys.input) add_breaks_in(ev.times, sys.input->breakpoints(), t0, t_end);
    if (sys.delays.kind() == DelayKind::sawtooth) {
        for (double k = std::ceil(t0 - h); k < t_end; k += 1.0)
            if (k > t0) ev.times.push_back(k);
            else ev.offsets.push_back(k - t0);
    } else {
        add_breaks_in(ev.times, sys.delays.breakpoints(), t0, t_end);
        for (const auto& seg : sys.delays.segments())
            for (Eigen::Index k = 0; k < seg.size(); ++k) {
                const double v = seg.data()[k];
                if (v > 0.0) {
                    ev.offsets.push_back(v);
                    ev.min_positive_delay = std::min(ev.min_positive_delay, v);
                }
            }
    }
    if (h > 0.0 && !init.prehistory.empty()) {
        for (double b : init.prehistory.breakpoints())
            if (b > t0 - h && b < t0) ev.offsets.push_back(b - t0);
    }
    for (double t : ev.times) ev.offsets.push_back(t - t0);
    ev.offsets.push_back(t_end - t0);
    std::sort(ev.times.begin(), ev.times.end());
    ev.times.erase(std::unique(ev.times.begin(), ev.times.end()), ev.times.end());
    return ev;
}

void check_run_window(const LinearSystem& sys, const InitialCondition& init, double t_end, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw ArgumentError("step must be positive and finite");
    if (!std::isfinite(t_end) || t_end < init.start_time) throw ArgumentError("t_end precedes the start time");
    if (init.start_time < 0.0) throw OutOfRangeError("start time precedes the schedule");
    const double slack = 1e-9 * std::max(1.0, t_end);
    if (t_end > sys.weights.horizon() + slack) throw OutOfRangeError("t_end exceeds the weight schedule horizon");
    if (t_end > sys.delays.horizon() + slack) throw OutOfRangeError("t_end exceeds the delay schedule horizon");
}

}  // namespace

// ---------------------------------------------------------------------------
// Initial conditions, couplings, sets

InitialCondition InitialCondition::constant_history(double start_time, Matrix state, double history) {
    if (!(history >= 0.0)) throw ArgumentError("history length must be nonnegative");
    StepSignal phi = StepSignal::constant(state, start_time - history);
    return {start_time, std::move(state), std::move(phi)};
}

InitialCondition InitialCondition::zero_history(double start_time, Matrix state, double history) {
    if (!(history >= 0.0)) throw ArgumentError("history length must be nonnegative");
    StepSignal phi = StepSignal::constant(Matrix::Zero(state.rows(), state.cols()), start_time - history);
    return {start_time, std::move(state), std::move(phi)};
}

InitialCondition InitialCondition::from_window(double start_time, std::span<const Matrix> window) {
    if (window.empty()) throw ArgumentError("from_window: empty window");
    const auto past = static_cast<double>(window.size() - 1);
    if (window.size() == 1) return {start_time, window.back(), StepSignal::constant(window.back(), start_time)};
    std::vector<double> bps;
    std::vector<Matrix> vals;
    for (std::size_t s = 0; s + 1 < window.size(); ++s) {
        bps.push_back(start_time - past + static_cast<double>(s));
        vals.push_back(window[s]);
    }
    return {start_time, window.back(), StepSignal(std::move(bps), std::move(vals))};
}

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::exact_exponential: return "exact_exponential";
        case Scheme::runge_kutta4: return "runge_kutta4";
        case Scheme::discrete_iteration: return "discrete_iteration";
    }
    return "unknown";
}

std::optional<std::size_t> Trajectory::index_of(double t) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(times.begin(), times.end(), t - tol);
    if (it == times.end() || std::abs(*it - t) > tol) return std::nullopt;
    return static_cast<std::size_t>(std::distance(times.begin(), it));
}

const Matrix& Trajectory::at(double t) const {
    const auto idx = index_of(t);
    if (!idx) throw OutOfRangeError("Trajectory: no sample at t = " + std::to_string(t));
    return states[*idx];
}

CouplingFunction CouplingFunction::unit() {
    return {"unit", [](const Eigen::RowVectorXd&, const Eigen::RowVectorXd&, int, int) { return 1.0; }, 1.0, 1.0};
}

CouplingFunction CouplingFunction::inverse_square() {
    return {"inverse_square",
            [](const Eigen::RowVectorXd& y, const Eigen::RowVectorXd& z, int, int) {
                return 1.0 / (1.0 + (y - z).squaredNorm());
            },
            0.0, 1.0};
}

StepSignal LeaderConfig::damping() const {
    if (attraction.empty()) throw ArgumentError("LeaderConfig: no attraction weights");
    std::vector<double> bps(attraction.breakpoints().begin(), attraction.breakpoints().end());
    std::vector<Matrix> vals;
    for (const auto& v : attraction.values()) vals.emplace_back(v.rowwise().sum());
    return StepSignal(std::move(bps), std::move(vals));
}

TargetSet TargetSet::polytope(Matrix vertices, StepSignal selector) {
    if (vertices.rows() == 0) throw ArgumentError("TargetSet: empty vertex set");
    TargetSet t;
    t.shape = Shape::polytope;
    t.vertices = std::move(vertices);
    t.selector = std::move(selector);
    return t;
}

TargetSet TargetSet::ball(Eigen::RowVectorXd center, double radius, StepSignal selector) {
    if (!(radius >= 0.0)) throw ArgumentError("TargetSet: negative radius");
    TargetSet t;
    t.shape = Shape::ball;
    t.center = std::move(center);
    t.radius = radius;
    t.selector = std::move(selector);
    return t;
}

double TargetSet::distance(const Eigen::RowVectorXd& point) const {
    return shape == Shape::ball ? distance_to_ball(point, center, radius) : distance_to_hull(point, vertices);
}

// ---------------------------------------------------------------------------
// Step planning

StepPlan plan_steps(const LinearSystem& sys, const InitialCondition& init, double t_end, double step) {
    if (sys.weights.is_discrete()) throw KindError("continuous simulation needs a continuous weight schedule");
    check_run_window(sys, init, t_end, step);
    const double t0 = init.start_time;
    const Events ev = collect_events(sys, init, t_end);
    StepPlan plan;
    const double span_len = t_end - t0;
    if (span_len == 0.0) {
        plan.step = step;
        plan.times = {t0};
        return plan;
    }
    for (int m = 1; m <= kMaxRefinement; ++m) {
        const double d = step / m;
        if (span_len / d > static_cast<double>(kMaxSteps)) break;
        if (!std::all_of(ev.offsets.begin(), ev.offsets.end(), [&](double o) { return is_multiple(o, d); }))
            continue;
        const auto k = static_cast<std::size_t>(std::llround(span_len / d));
        plan.scheme = Scheme::exact_exponential;
        plan.step = d;
        plan.times.resize(k + 1);
        for (std::size_t s = 0; s <= k; ++s) plan.times[s] = t0 + static_cast<double>(s) * d;
        plan.times.back() = t_end;
        return plan;
    }
    // Fallback: uniform grid no coarser than the shortest delay, through all events.
    plan.scheme = Scheme::runge_kutta4;
    plan.step = std::min(step, ev.min_positive_delay);
    const auto k = static_cast<std::size_t>(std::ceil(span_len / plan.step - 1e-9));
    if (k > kMaxSteps) throw ArgumentError("step too small for the requested horizon");
    std::vector<double> grid;
    grid.reserve(k + ev.times.size() + 1);
    for (std::size_t s = 0; s < k; ++s) grid.push_back(t0 + static_cast<double>(s) * plan.step);
    grid.insert(grid.end(), ev.times.begin(), ev.times.end());
    grid.push_back(t_end);
    std::sort(grid.begin(), grid.end());
    std::vector<double> merged;
    for (double g : grid) {
        if (g > t_end) continue;
        if (!merged.empty() && g - merged.back() <= 1e-12 * std::max(1.0, std::abs(g))) {
            merged.back() = std::max(merged.back(), g);
            continue;
        }
        merged.push_back(g);
    }
    merged.front() = t0;
    merged.back() = t_end;
    plan.times = std::move(merged);
    return plan;
}

// ---------------------------------------------------------------------------
// Engines

namespace {

struct Propagator {
    Matrix generator;
    double dt = 0.0;
    Matrix expm;      // e^{M dt}
    Matrix integral;  // int_0^dt e^{M s} ds
};

void build_propagator(const Matrix& gen, double dt, Propagator& p) {
    if (p.dt == dt && p.generator.rows() == gen.rows() && (p.generator.array() == gen.array()).all()) return;
    const auto n = gen.rows();
    p.generator = gen;
    p.dt = dt;
    bool diagonal = true;
    for (Eigen::Index i = 0; i < n && diagonal; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && gen(i, j) != 0.0) {
                diagonal = false;
                break;
            }
    p.expm = Matrix::Zero(n, n);
    p.integral = Matrix::Zero(n, n);
    if (diagonal) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = -gen(i, i);
            p.expm(i, i) = std::exp(-a * dt);
            p.integral(i, i) = a == 0.0 ? dt : -std::expm1(-a * dt) / a;
        }
        return;
    }
    Matrix aug = Matrix::Zero(2 * n, 2 * n);
    aug.topLeftCorner(n, n) = gen * dt;
    aug.topRightCorner(n, n) = Matrix::Identity(n, n) * dt;
    const Matrix e = aug.exp();
    p.expm = e.topLeftCorner(n, n);
    p.integral = e.topRightCorner(n, n);
}

class Runner {
public:
    Runner(const LinearSystem& sys, const InitialCondition& init, const CouplingFunction* coupling)
        : sys_(sys), init_(init), coupling_(coupling), n_(init.agents()), m_(init.dims()) {}

    Trajectory run(const StepPlan& plan) {
        plan_ = &plan;
        traj_.scheme = plan.scheme;
        traj_.step = plan.step;
        traj_.history_bound = sys_.delays.bound();
        add_prehistory_samples();
        traj_.run_begin = traj_.times.size();
        traj_.times.reserve(traj_.times.size() + plan.times.size());
        traj_.states.reserve(traj_.times.size() + plan.times.size());
        traj_.times.push_back(init_.start_time);
        traj_.states.push_back(init_.state);
        for (std::size_t k = 0; k + 1 < plan.times.size(); ++k) {
            const double a = plan.times[k];
            const double b = plan.times[k + 1];
            Matrix next = plan.scheme == Scheme::exact_exponential ? exact_step(k, a, b) : rk4_step(a, b);
            if (!next.allFinite()) throw InvariantError("simulation diverged at t = " + std::to_string(b));
            traj_.times.push_back(b);
            traj_.states.push_back(std::move(next));
        }
        return std::move(traj_);
    }

private:
    void add_prehistory_samples() {
        const double h = sys_.delays.bound();
        if (!(h > 0.0)) return;
        const double t0 = init_.start_time;
        std::vector<double> ts;
        if (plan_->scheme == Scheme::exact_exponential) {
            const auto count = static_cast<long>(std::ceil(h / plan_->step - 1e-9));
            for (long k = count; k >= 1; --k) ts.push_back(t0 - static_cast<double>(k) * plan_->step);
        } else {
            const auto count = static_cast<long>(std::ceil(h / plan_->step - 1e-9));
            for (long k = count; k >= 1; --k) ts.push_back(t0 - static_cast<double>(k) * plan_->step);
            for (double b : init_.prehistory.breakpoints())
                if (b > t0 - h && b < t0) ts.push_back(b);
            std::sort(ts.begin(), ts.end());
            ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        }
        const double lo = init_.prehistory.start();
        for (double t : ts) {
            const double probe = plan_->scheme == Scheme::exact_exponential ? t + 0.5 * plan_->step : t;
            if (probe < lo) continue;
            traj_.times.push_back(t);
            traj_.states.push_back(init_.prehistory(probe));
        }
    }

    // Delayed value at a grid point of the exact scheme.
    Eigen::RowVectorXd grid_value(double tau, int j, std::size_t current) const {
        const double t0 = init_.start_time;
        const double d = plan_->step;
        const double r = (tau - t0) / d;
        const long idx = std::lround(r);
        if (idx >= 0 || std::abs(r) < 1e-9) {
            const auto u = static_cast<std::size_t>(std::max(0L, idx));
            if (u > current) throw InvariantError("delayed argument lies in the future");
            return traj_.states[traj_.run_begin + u].row(j);
        }
        return init_.prehistory(t0 + (static_cast<double>(idx) + 0.5) * d).row(j);
    }

    // Delayed value at an arbitrary time, linear interpolation between samples.
    Eigen::RowVectorXd interp_value(double tau, int j) const {
        const double t0 = init_.start_time;
        if (tau < t0 - 1e-12 * std::max(1.0, std::abs(t0))) return init_.prehistory(tau).row(j);
        const auto first = traj_.times.begin() + static_cast<long>(traj_.run_begin);
        if (tau >= traj_.times.back()) return traj_.states.back().row(j);
        auto it = std::upper_bound(first, traj_.times.end(), tau);
        const auto hi = static_cast<std::size_t>(std::distance(traj_.times.begin(), it));
        const std::size_t lo = hi - 1;
        const double w = (tau - traj_.times[lo]) / (traj_.times[hi] - traj_.times[lo]);
        return (1.0 - w) * traj_.states[lo].row(j) + w * traj_.states[hi].row(j);
    }

    double gain(const Eigen::RowVectorXd& y, const Eigen::RowVectorXd& z, int i, int j) const {
        const double g = coupling_->gain(y, z, i, j);
        if (!(g > 0.0) || !std::isfinite(g))
            throw CouplingError("coupling " + coupling_->name + " returned a non-positive value " +
                                std::to_string(g));
        return g;
    }

    Vector damping_at(double t) const {
        if (!sys_.damping) return Vector::Zero(n_);
        return (*sys_.damping)(t).col(0);
    }

    Matrix exact_step(std::size_t k, double a, double b) {
        const double mid = 0.5 * (a + b);
        const Matrix& w = sys_.weights.evaluate(mid);
        const Matrix& x = traj_.states.back();
        Matrix gen = Matrix::Zero(n_, n_);
        Matrix forcing = sys_.input ? Matrix((*sys_.input)(mid)) : Matrix::Zero(n_, m_);
        const Vector damp = damping_at(mid);
        for (int i = 0; i < n_; ++i) {
            double alpha = 0.0;
            for (int j = 0; j < n_; ++j) {
                if (j == i || w(i, j) == 0.0) continue;
                const auto tau = sys_.delays.frozen_argument(i, j, a, b);
                Eigen::RowVectorXd y = tau ? grid_value(*tau, j, k) : Eigen::RowVectorXd(x.row(j));
                const double a_ij = coupling_ ? w(i, j) * gain(y, x.row(i), i, j) : w(i, j);
                alpha += a_ij;
                if (tau) forcing.row(i) += a_ij * y;
                else gen(i, j) = a_ij;
            }
            gen(i, i) = -(alpha + damp(i));
        }
        build_propagator(gen, b - a, prop_);
        return prop_.expm * x + prop_.integral * forcing;
    }

    // Right-hand side at time s with state y; delayed values at or after the
    // step start fall back to the interpolated trajectory (frozen at a).
    Matrix rhs(double s, const Matrix& y, double a, double b) const {
        const double mid = 0.5 * (a + b);
        const Matrix& w = sys_.weights.evaluate(mid);
        const Vector damp = damping_at(mid);
        Matrix out = sys_.input ? Matrix((*sys_.input)(mid)) : Matrix::Zero(n_, m_);
        const bool saw = sys_.delays.kind() == DelayKind::sawtooth;
        for (int i = 0; i < n_; ++i) {
            double alpha = 0.0;
            for (int j = 0; j < n_; ++j) {
                if (j == i || w(i, j) == 0.0) continue;
                Eigen::RowVectorXd v;
                if (saw) {
                    v = interp_value(*sys_.delays.frozen_argument(i, j, a, b), j);
                } else {
                    const double h = sys_.delays.delay(i, j, mid);
                    if (h == 0.0) v = y.row(j);
                    else v = interp_value(std::min(s - h, a), j);
                }
                const double a_ij = coupling_ ? w(i, j) * gain(v, y.row(i), i, j) : w(i, j);
                alpha += a_ij;
                out.row(i) += a_ij * v;
            }
            out.row(i) -= (alpha + damp(i)) * y.row(i);
        }
        return out;
    }

    Matrix rk4_step(double a, double b) const {
        const double dt = b - a;
        const Matrix& x = traj_.states.back();
        const Matrix k1 = rhs(a, x, a, b);
        const Matrix k2 = rhs(a + 0.5 * dt, x + 0.5 * dt * k1, a, b);
        const Matrix k3 = rhs(a + 0.5 * dt, x + 0.5 * dt * k2, a, b);
        const Matrix k4 = rhs(b, x + dt * k3, a, b);
        return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    const LinearSystem& sys_;
    const InitialCondition& init_;
    const CouplingFunction* coupling_;
    int n_;
    int m_;
    const StepPlan* plan_ = nullptr;
    Trajectory traj_;
    Propagator prop_;
};

}  // namespace

Trajectory simulate(const LinearSystem& system, const InitialCondition& initial, double t_end, double step,
                    const CouplingFunction* coupling) {
    const int n = system.weights.agents();
    if (system.delays.agents() != n) throw ArgumentError("weight and delay schedules disagree on the agent count");
    check_initial(initial, n, system.delays.bound());
    check_signal(system.damping, n, 1, "damping");
    if (system.damping)
        for (const auto& v : system.damping->values())
            if ((v.array() < 0.0).any()) throw ArgumentError("damping must be nonnegative");
    check_signal(system.input, n, initial.dims(), "input");
    const StepPlan plan = plan_steps(system, initial, t_end, step);
    return Runner(system, initial, coupling).run(plan);
}

Trajectory simulate_continuous(const WeightSchedule& weights, const DelaySchedule& delays,
                               const InitialCondition& initial, const std::optional<StepSignal>& disturbance,
                               double t_end, double step) {
    return simulate({weights, delays, std::nullopt, disturbance}, initial, t_end, step);
}

Trajectory simulate_discrete(const WeightSchedule& weights, const DelaySchedule& delays,
                             const InitialCondition& initial, std::optional<int> steps,
                             const CouplingFunction* coupling) {
    if (!weights.is_discrete()) throw KindError("simulate_discrete needs a discrete weight schedule");
    if (delays.kind() == DelayKind::sawtooth || !delays.is_integer_valued())
        throw ArgumentError("discrete runs need integer delays");
    const int n = weights.agents();
    if (delays.agents() != n) throw ArgumentError("weight and delay schedules disagree on the agent count");
    const double h = delays.bound();
    check_initial(initial, n, h);
    const double t0 = initial.start_time;
    if (t0 != std::round(t0) || t0 < 0.0) throw ArgumentError("discrete start time must be a nonnegative integer");
    const int k0 = static_cast<int>(t0);
    const int horizon = static_cast<int>(weights.horizon());
    const int count = steps.value_or(horizon - k0);
    if (count < 0) throw ArgumentError("negative step count");
    if (k0 + count > horizon) throw OutOfRangeError("requested steps exceed the schedule horizon");
    if (static_cast<double>(k0 + count) > delays.horizon()) throw OutOfRangeError("steps exceed the delay schedule");

    Trajectory traj;
    traj.scheme = Scheme::discrete_iteration;
    traj.step = 1.0;
    traj.history_bound = h;
    const int hist = static_cast<int>(std::round(h));
    for (int s = hist; s >= 1; --s) {
        traj.times.push_back(t0 - s);
        traj.states.push_back(initial.prehistory(t0 - s + 0.5));
    }
    traj.run_begin = traj.times.size();
    traj.times.push_back(t0);
    traj.states.push_back(initial.state);
    const auto value = [&](int k, int j) -> Eigen::RowVectorXd {
        if (k < k0) return initial.prehistory(static_cast<double>(k) + 0.5).row(j);
        return traj.states[traj.run_begin + static_cast<std::size_t>(k - k0)].row(j);
    };
    for (int k = k0; k < k0 + count; ++k) {
        const Matrix& b = weights.evaluate(k);
        const Matrix& x = traj.states.back();
        Matrix next = x;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (j == i || b(i, j) == 0.0) continue;
                const int lag = static_cast<int>(std::lround(delays.delay(i, j, k + 0.5)));
                const Eigen::RowVectorXd y = value(k - lag, j);
                double w = b(i, j);
                if (coupling) {
                    const double g = coupling->gain(y, x.row(i), i, j);
                    if (!(g > 0.0) || !(g <= 1.0))
                        throw CouplingError("coupling " + coupling->name + " left (0, 1]: " + std::to_string(g));
                    w *= g;
                }
                next.row(i) += w * (y - x.row(i));
            }
        traj.times.push_back(k + 1);
        traj.states.push_back(std::move(next));
    }
    return traj;
}

Trajectory simulate_nonlinear(const WeightSchedule& weights, const DelaySchedule& delays,
                              const InitialCondition& initial, const CouplingFunction& coupling, double t_end,
                              double step) {
    if (weights.is_discrete()) {
        const double steps = t_end - initial.start_time;
        if (steps != std::round(steps)) throw ArgumentError("discrete t_end must be an integer");
        return simulate_discrete(weights, delays, initial, static_cast<int>(steps), &coupling);
    }
    return simulate({weights, delays, std::nullopt, std::nullopt}, initial, t_end, step, &coupling);
}

Trajectory simulate_damped(const WeightSchedule& weights, const DelaySchedule& delays, const StepSignal& damping,
                           const InitialCondition& initial, double t_end, double step) {
    return simulate({weights, delays, damping, std::nullopt}, initial, t_end, step);
}

namespace {

// Pointwise combination of two step signals on the union of their breakpoints.
template <class F>
StepSignal combine(const StepSignal& a, const StepSignal& b, F&& f) {
    const double start = std::max(a.start(), b.start());
    std::vector<double> bps{start};
    for (double t : a.breakpoints())
        if (t > start) bps.push_back(t);
    for (double t : b.breakpoints())
        if (t > start) bps.push_back(t);
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    std::vector<Matrix> vals;
    vals.reserve(bps.size());
    for (double t : bps) vals.push_back(f(a(t), b(t)));
    return StepSignal(std::move(bps), std::move(vals));
}

StepSignal map_signal(const StepSignal& s, const std::function<Matrix(const Matrix&)>& f) {
    std::vector<double> bps(s.breakpoints().begin(), s.breakpoints().end());
    std::vector<Matrix> vals;
    for (const auto& v : s.values()) vals.push_back(f(v));
    return StepSignal(std::move(bps), std::move(vals));
}

void check_attraction(const LeaderConfig& leaders, int n, int m) {
    if (leaders.leaders() == 0) throw ArgumentError("empty leader set");
    if (leaders.positions.cols() != m) throw ArgumentError("leader positions have the wrong dimension");
    if (leaders.attraction.empty() || leaders.attraction.rows() != n ||
        leaders.attraction.cols() != leaders.leaders())
        throw ArgumentError("attraction weights must be n x L");
    for (const auto& v : leaders.attraction.values())
        if ((v.array() < 0.0).any()) throw ArgumentError("attraction weights must be nonnegative");
}

}  // namespace

Trajectory simulate_leader_following(const WeightSchedule& weights, const DelaySchedule& delays,
                                     const LeaderConfig& leader, const InitialCondition& initial, double t_end,
                                     double step) {
    check_attraction(leader, weights.agents(), initial.dims());
    if (leader.leaders() != 1) throw ArgumentError("leader following takes exactly one leader");
    return simulate_containment(weights, delays, leader, initial, t_end, step);
}

Trajectory simulate_containment(const WeightSchedule& weights, const DelaySchedule& delays,
                                const LeaderConfig& leaders, const InitialCondition& initial, double t_end,
                                double step) {
    check_attraction(leaders, weights.agents(), initial.dims());
    const Matrix positions = leaders.positions;
    StepSignal input = map_signal(leaders.attraction, [&](const Matrix& b) -> Matrix { return b * positions; });
    return simulate({weights, delays, leaders.damping(), std::move(input)}, initial, t_end, step);
}

Trajectory simulate_target_aggregation(const WeightSchedule& weights, const DelaySchedule& delays,
                                       const TargetSet& target, const StepSignal& damping,
                                       const InitialCondition& initial, double t_end, double step) {
    const int n = weights.agents();
    if (target.dims() != initial.dims()) throw ArgumentError("target dimension does not match the state");
    if (target.selector.empty() || target.selector.rows() != n || target.selector.cols() != initial.dims())
        throw ArgumentError("target selector must be n x m");
    for (const auto& v : target.selector.values())
        for (int i = 0; i < n; ++i)
            if (target.distance(v.row(i)) > 1e-9)
                throw InvariantError("target selector leaves the target set");
    if (damping.empty() || damping.rows() != n || damping.cols() != 1)
        throw ArgumentError("damping must be n x 1");
    StepSignal input = combine(damping, target.selector, [](const Matrix& d, const Matrix& w) -> Matrix {
        return w.array().colwise() * d.col(0).array();
    });
    return simulate({weights, delays, damping, std::move(input)}, initial, t_end, step);
}

InitialCondition shift_initial(const InitialCondition& initial, const Eigen::RowVectorXd& offset) {
    if (offset.size() != initial.dims()) throw ArgumentError("shift_initial: dimension mismatch");
    InitialCondition out = initial;
    out.state = initial.state.rowwise() - offset;
    if (!initial.prehistory.empty())
        out.prehistory = map_signal(initial.prehistory,
                                    [&](const Matrix& v) -> Matrix { return v.rowwise() - offset; });
    return out;
}

StepSignal geometric_pulses(const Matrix& amplitude, double start, double period, double width, double ratio,
                            int count) {
    if (!(period > 0.0) || !(width > 0.0) || width > period || count < 0)
        throw ArgumentError("pulses need 0 < width <= period and count >= 0");
    const Matrix zero = Matrix::Zero(amplitude.rows(), amplitude.cols());
    std::vector<double> bps{-kInf};
    std::vector<Matrix> vals{zero};
    double scale = 1.0;
    for (int p = 0; p < count; ++p) {
        const double on = start + p * period;
        if (on > bps.back()) {
            bps.push_back(on);
            vals.push_back(amplitude * scale);
        } else {
            vals.back() = amplitude * scale;
        }
        bps.push_back(on + width);
        vals.push_back(zero);
        scale *= ratio;
    }
    // Adjacent pulses (width == period) leave duplicated breakpoints; drop them.
    std::vector<double> b2;
    std::vector<Matrix> v2;
    for (std::size_t s = 0; s < bps.size(); ++s) {
        if (!b2.empty() && bps[s] <= b2.back()) {
            v2.back() = vals[s];
            continue;
        }
        b2.push_back(bps[s]);
        v2.push_back(vals[s]);
    }
    return StepSignal(std::move(b2), std::move(v2));
}

StepSignal constant_pulses(const Matrix& amplitude, double start, double period, double width, int count) {
    return geometric_pulses(amplitude, start, period, width, 1.0, count);
}

}  // namespace delaylab
