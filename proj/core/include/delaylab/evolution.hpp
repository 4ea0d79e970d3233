#pragma once

#include "delaylab/connectivity.hpp"
#include "delaylab/dynamics.hpp"

#include <optional>
#include <span>
#include <vector>

namespace delaylab {

/// U(t, t*): column i is the solution at t started from x* = e_i with zero
/// prehistory. Entries are clamped at zero after validation.
struct EvolutionaryMatrix {
    double from = 0.0;  ///< t*
    double to = 0.0;    ///< t
    Matrix matrix;
    Scheme scheme = Scheme::exact_exponential;
    double step = 0.0;

    [[nodiscard]] Vector row_sums() const { return matrix.rowwise().sum(); }
};

/// Checks nonnegativity (>= -1e-12) and substochasticity (<= 1 + 1e-9),
/// clamps tiny negatives; throws InvariantError otherwise.
void validate_evolutionary(EvolutionaryMatrix& u);

[[nodiscard]] EvolutionaryMatrix compute_evolutionary(const WeightSchedule& weights, const DelaySchedule& delays,
                                                      double from, double to, double step);

/// U(t_k, t*) for increasing t_k from one set of n column runs.
[[nodiscard]] std::vector<EvolutionaryMatrix> compute_evolutionary_series(const WeightSchedule& weights,
                                                                          const DelaySchedule& delays, double from,
                                                                          std::span<const double> times, double step);

struct RowSumFloor {
    bool ok = false;
    double floor = 0.0;  ///< measured min row sum
    double psi = 0.0;    ///< e^{-(n-1) mu}
};

[[nodiscard]] RowSumFloor verify_row_sum_floor(const EvolutionaryMatrix& u, double mu);

struct SegmentStructure {
    int index = 0;  ///< p
    Interval span;  ///< [t_p, t_{p+2}]
    double eta = 0.0;      ///< diagonal floor e^{-2(n-1) ell}
    double epsilon = 0.0;  ///< skeleton threshold eps * e^{-3(n-1) ell}
    double min_diagonal = 0.0;
    double connectivity_level = 0.0;  ///< largest threshold keeping U quasi-strongly connected
    bool diagonal_ok = false;
    bool connected = false;
    [[nodiscard]] bool ok() const noexcept { return diagonal_ok && connected; }
    [[nodiscard]] double diagonal_margin() const noexcept { return min_diagonal - eta; }
    [[nodiscard]] double connectivity_margin() const noexcept { return connectivity_level - epsilon; }
};

/// Structure of U(t_{p+2}, t_p) for an AQSC certificate whose gaps reach the
/// delay bound (thin it first).
[[nodiscard]] SegmentStructure verify_segment_structure(const WeightSchedule& weights, const DelaySchedule& delays,
                                                        const ConnectivityCertificate& certificate, int p,
                                                        double step);

/// Both sides of the variation-of-constants formula at time t.
struct CauchyParts {
    Matrix direct;       ///< simulated x(t)
    Matrix homogeneous;  ///< U(t, t*) x*
    Matrix forced;       ///< contribution of the disturbance f
    Matrix history;      ///< contribution of the prehistory term g
    Vector row_sums;     ///< U(t, t*) 1
    [[nodiscard]] Matrix reconstructed() const { return homogeneous + forced + history; }
    [[nodiscard]] double discrepancy() const { return (direct - reconstructed()).cwiseAbs().maxCoeff(); }
};

[[nodiscard]] CauchyParts cauchy_parts(const WeightSchedule& weights, const DelaySchedule& delays,
                                       const InitialCondition& initial, const std::optional<StepSignal>& disturbance,
                                       double t, double step);

/// Max-norm gap between simulation and the reconstruction.
[[nodiscard]] double reconstruct_cauchy(const WeightSchedule& weights, const DelaySchedule& delays,
                                        const InitialCondition& initial,
                                        const std::optional<StepSignal>& disturbance, double t, double step);

struct SandwichCheck {
    bool ok = false;
    double worst_violation = 0.0;  ///< largest amount by which a bound is exceeded (<= 0 when satisfied)
};

/// lambda(t*)(1 - U1) <= x(t) - U x* - int U f <= Lambda(t*)(1 - U1), per coordinate.
[[nodiscard]] SandwichCheck check_sandwich(const WeightSchedule& weights, const DelaySchedule& delays,
                                           const InitialCondition& initial,
                                           const std::optional<StepSignal>& disturbance, double t, double step,
                                           double tolerance = 1e-6);

/// Columns of U(t2, t0) reconstructed from the state and window at t1 via the
/// Cauchy formula; returns the max discrepancy against direct computation.
[[nodiscard]] double semigroup_discrepancy(const WeightSchedule& weights, const DelaySchedule& delays, double t0,
                                           double t1, double t2, double step);

struct ConsensusLinks {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> linked;
    bool global = false;
};

/// Agents i != j are linked when rows i and j of the last matrix agree within
/// tol and both rows moved by at most tol since the previous matrix.
[[nodiscard]] ConsensusLinks consensus_from_rows(std::span<const EvolutionaryMatrix> sequence, double tolerance);

}  // namespace delaylab
