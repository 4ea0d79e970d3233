#pragma once

#include "delaylab/schedule.hpp"
#include "delaylab/signal.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace delaylab {

/// x(t*) = x*, x(s) = phi(s) on [t* - h, t*). States are n x m (m = 1 for
/// scalar agents); the prehistory is piecewise constant.
struct InitialCondition {
    double start_time = 0.0;
    Matrix state;
    StepSignal prehistory;

    /// phi equal to x* on [t* - history, t*).
    static InitialCondition constant_history(double start_time, Matrix state, double history);
    /// phi identically zero on [t* - history, t*) (the evolutionary-matrix convention).
    static InitialCondition zero_history(double start_time, Matrix state, double history);
    /// Discrete window x(t* - h), ..., x(t*) given oldest first; each past
    /// value is held on its unit interval.
    static InitialCondition from_window(double start_time, std::span<const Matrix> window);

    [[nodiscard]] int agents() const noexcept { return static_cast<int>(state.rows()); }
    [[nodiscard]] int dims() const noexcept { return static_cast<int>(state.cols()); }
};

enum class Scheme { exact_exponential, runge_kutta4, discrete_iteration };

[[nodiscard]] std::string to_string(Scheme scheme);

/// Sampled multi-agent states. Samples before `run_begin` are prehistory
/// samples (times < t*); the run starts at times[run_begin] == t*.
struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
    std::size_t run_begin = 0;
    Scheme scheme = Scheme::exact_exponential;
    double step = 0.0;
    double history_bound = 0.0;

    [[nodiscard]] int agents() const { return states.empty() ? 0 : static_cast<int>(states.front().rows()); }
    [[nodiscard]] int dims() const { return states.empty() ? 0 : static_cast<int>(states.front().cols()); }
    [[nodiscard]] double start_time() const { return times[run_begin]; }
    [[nodiscard]] double end_time() const { return times.back(); }
    [[nodiscard]] const Matrix& final_state() const { return states.back(); }
    [[nodiscard]] std::size_t run_size() const { return times.size() - run_begin; }
    /// Sample at time t (must coincide with a sample time up to 1e-9).
    [[nodiscard]] const Matrix& at(double t) const;
    /// Index of the sample at time t, or nullopt.
    [[nodiscard]] std::optional<std::size_t> index_of(double t) const;
};

/// psi_ij(y, z) > 0 scaling the link j -> i in the nonlinear flow
/// x_i' = sum_j a_ij psi_ij(x^_j, x_i) (x^_j - x_i).
struct CouplingFunction {
    std::string name;
    std::function<double(const Eigen::RowVectorXd& y, const Eigen::RowVectorXd& z, int i, int j)> gain;
    double declared_low = 0.0;
    double declared_high = 1.0;

    static CouplingFunction unit();
    /// psi(y, z) = 1 / (1 + |y - z|^2), values in (0, 1].
    static CouplingFunction inverse_square();
};

/// Static leaders with attraction weights b_ik(t) (n x L step signal).
struct LeaderConfig {
    Matrix positions;   ///< L x m
    StepSignal attraction;

    [[nodiscard]] int leaders() const noexcept { return static_cast<int>(positions.rows()); }
    /// d_i(t) = sum_k b_ik(t) as an n x 1 step signal.
    [[nodiscard]] StepSignal damping() const;
};

/// Convex target set (vertex polytope or Euclidean ball) with per-agent
/// selectors omega_i(t) in the set.
struct TargetSet {
    enum class Shape { polytope, ball };
    Shape shape = Shape::ball;
    Matrix vertices;            ///< polytope: V x m
    Eigen::RowVectorXd center;  ///< ball
    double radius = 0.0;
    StepSignal selector;        ///< n x m

    static TargetSet polytope(Matrix vertices, StepSignal selector);
    static TargetSet ball(Eigen::RowVectorXd center, double radius, StepSignal selector);

    [[nodiscard]] int dims() const noexcept {
        return static_cast<int>(shape == Shape::ball ? center.size() : vertices.cols());
    }
    /// Euclidean distance from a point to the set.
    [[nodiscard]] double distance(const Eigen::RowVectorXd& point) const;
};

/// Linear delayed flow x_i' = -(alpha_i + d_i) x_i + sum_j a_ij x^_j + u_i
/// with optional damping d and piecewise-constant input u.
struct LinearSystem {
    WeightSchedule weights;
    DelaySchedule delays;
    std::optional<StepSignal> damping;  ///< n x 1, nonnegative
    std::optional<StepSignal> input;    ///< n x m
};

struct StepPlan {
    Scheme scheme = Scheme::exact_exponential;
    double step = 0.0;
    std::vector<double> times;  ///< run grid from t* to t_end inclusive
};

/// Chooses the stepper. The exact-exponential scheme needs every breakpoint,
/// delay value and t_end - t* on a common grid; the step is refined by an
/// integer factor to find one. Otherwise a fourth-order grid through all
/// breakpoints is used.
[[nodiscard]] StepPlan plan_steps(const LinearSystem& system, const InitialCondition& initial, double t_end,
                                  double step);

/// General entry point; the named simulate_* operations below delegate here.
[[nodiscard]] Trajectory simulate(const LinearSystem& system, const InitialCondition& initial, double t_end,
                                  double step, const CouplingFunction* coupling = nullptr);

[[nodiscard]] Trajectory simulate_continuous(const WeightSchedule& weights, const DelaySchedule& delays,
                                             const InitialCondition& initial,
                                             const std::optional<StepSignal>& disturbance, double t_end,
                                             double step);

/// x_i(k+1) = x_i(k) + sum_{j != i} b_ij(k) (x_j(k - h_ij(k)) - x_i(k)).
/// Runs to `steps` (default: the schedule horizon).
[[nodiscard]] Trajectory simulate_discrete(const WeightSchedule& weights, const DelaySchedule& delays,
                                           const InitialCondition& initial, std::optional<int> steps = std::nullopt,
                                           const CouplingFunction* coupling = nullptr);

/// Continuous or discrete depending on the schedule kind; t_end and step are
/// ignored for discrete schedules beyond fixing the final step.
[[nodiscard]] Trajectory simulate_nonlinear(const WeightSchedule& weights, const DelaySchedule& delays,
                                            const InitialCondition& initial, const CouplingFunction& coupling,
                                            double t_end, double step);

[[nodiscard]] Trajectory simulate_damped(const WeightSchedule& weights, const DelaySchedule& delays,
                                         const StepSignal& damping, const InitialCondition& initial, double t_end,
                                         double step);

/// Single static leader x_omega = leader.positions.row(0).
[[nodiscard]] Trajectory simulate_leader_following(const WeightSchedule& weights, const DelaySchedule& delays,
                                                   const LeaderConfig& leader, const InitialCondition& initial,
                                                   double t_end, double step);

[[nodiscard]] Trajectory simulate_containment(const WeightSchedule& weights, const DelaySchedule& delays,
                                              const LeaderConfig& leaders, const InitialCondition& initial,
                                              double t_end, double step);

[[nodiscard]] Trajectory simulate_target_aggregation(const WeightSchedule& weights, const DelaySchedule& delays,
                                                     const TargetSet& target, const StepSignal& damping,
                                                     const InitialCondition& initial, double t_end, double step);

/// Same initial condition with every state and prehistory value shifted by -offset (row vector).
[[nodiscard]] InitialCondition shift_initial(const InitialCondition& initial, const Eigen::RowVectorXd& offset);

// Disturbance constructors (n x m step signals).

/// f_i = amplitude_i * ratio^p on [start + p * period, start + p * period + width), zero elsewhere.
[[nodiscard]] StepSignal geometric_pulses(const Matrix& amplitude, double start, double period, double width,
                                          double ratio, int count);
/// Pulses of equal mass: ratio 1.
[[nodiscard]] StepSignal constant_pulses(const Matrix& amplitude, double start, double period, double width,
                                         int count);

}  // namespace delaylab
