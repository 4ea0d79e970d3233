#pragma once

#include "delaylab/connectivity.hpp"
#include "delaylab/dynamics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace delaylab {

/// lambda(t) / Lambda(t): min / max of the state over [t - h, t], per
/// coordinate, at every run sample. Prehistory samples take part.
struct WindowExtrema {
    std::vector<double> times;
    Matrix lower;  ///< samples x coordinates
    Matrix upper;
    double window = 0.0;
};

[[nodiscard]] WindowExtrema window_extrema(const Trajectory& trajectory, double window);

struct DiameterSeries {
    std::vector<double> times;
    std::vector<double> values;  ///< max over coordinates of Lambda - lambda

    [[nodiscard]] double initial() const { return values.front(); }
    [[nodiscard]] double final() const { return values.back(); }
    /// Value at the latest sample not after t.
    [[nodiscard]] double at_or_before(double t) const;
};

[[nodiscard]] DiameterSeries diameter_series(const WindowExtrema& extrema);

/// Pointwise max over coordinates of max_i x_i - min_i x_i (no window).
[[nodiscard]] DiameterSeries spread_series(const Trajectory& trajectory);

/// Final value below tol and the last quarter nonincreasing within 1e-10.
[[nodiscard]] bool consensus_verdict(const DiameterSeries& series, double tolerance);

struct MonotonicityCheck {
    bool ok = false;
    double worst = 0.0;  ///< largest increase of Lambda or decrease of lambda
};

[[nodiscard]] MonotonicityCheck check_window_monotonicity(const WindowExtrema& extrema, double tolerance);

/// x_i(t) <= x_i(s) e^{-int alpha_i} + Lambda(s)(1 - e^{-int alpha_i}) and the
/// mirror bound with lambda(s), over all run sample pairs s <= t.
[[nodiscard]] MonotonicityCheck check_envelope(const Trajectory& trajectory, const WeightSchedule& weights,
                                               const WindowExtrema& extrema, double tolerance);

struct ContractionReport {
    CertificateKind kind = CertificateKind::aqsc;
    int block_length = 0;  ///< 2(n - 1) certificate intervals
    std::vector<Interval> blocks;
    std::vector<double> ratios;
    int saturated_blocks = 0;  ///< blocks starting at roundoff level, excluded from theta
    double theta = 0.0;
    bool insufficient = false;
    bool pass = false;
    std::string note;
};

/// Block ratios D(t_{(k+1)b}) / D(t_{kb}), b = 2(n-1), each diameter read
/// at the latest sample not after the certificate time.
[[nodiscard]] ContractionReport contraction_fit(const DiameterSeries& diameter,
                                                const ConnectivityCertificate& certificate, int agents);

/// Distance from each row of `sample` (n x m) to conv(vertices).
[[nodiscard]] Vector hull_distance(const Matrix& sample, const Matrix& vertices);
[[nodiscard]] Vector hull_distance(const Matrix& sample, const TargetSet& target);

/// Per run sample, the max over agents of the distance to the set.
[[nodiscard]] std::vector<double> max_hull_distance_series(const Trajectory& trajectory, const Matrix& vertices);
[[nodiscard]] std::vector<double> max_hull_distance_series(const Trajectory& trajectory, const TargetSet& target);

struct DisturbanceReport {
    std::vector<Interval> intervals;
    std::vector<double> masses;  ///< int ||f||_inf over each certificate interval
    double total_mass = 0.0;
    double tail_mass = 0.0;      ///< largest mass of an interval in the final quarter
    double tail_diameter = 0.0;  ///< max D over the final quarter
    double final_diameter = 0.0;
    double a_priori_bound = 0.0;  ///< D(t*) + 2 * total mass
    bool masses_vanishing = false;
    bool tail_vanishing = false;
    bool bounded = false;
    bool implication_holds = false;  ///< masses vanishing => tail vanishing
    std::string note;
};

/// Final-quarter surrogates: masses count as vanishing when the final-quarter
/// maximum is at most 1% of the overall maximum; the tail vanishes when its
/// diameter is at most `tail_tolerance`.
[[nodiscard]] DisturbanceReport disturbance_bound_check(const DiameterSeries& diameter,
                                                        const ConnectivityCertificate& certificate,
                                                        const std::optional<StepSignal>& disturbance,
                                                        double tail_tolerance);

/// int_a^b ||f(t)||_inf dt for a piecewise-constant signal.
[[nodiscard]] double disturbance_mass(const StepSignal& disturbance, double a, double b);

}  // namespace delaylab
