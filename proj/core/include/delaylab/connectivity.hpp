#pragma once

#include "delaylab/graph.hpp"
#include "delaylab/schedule.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace delaylab {

enum class CertificateKind { aqsc, nits, uqsc };

/// Witness sequence (t_p) for aperiodic quasi-strong connectivity (AQSC),
/// non-instantaneous type-symmetry (NITS) or the uniform special case.
/// Everything is verified on the finite horizon only; `verified_horizon`
/// records how far.
struct ConnectivityCertificate {
    CertificateKind kind = CertificateKind::aqsc;
    std::vector<double> sequence;
    double epsilon = 0.0;      ///< AQSC / UQSC threshold
    double ratio_bound = 1.0;  ///< K for NITS
    double ell = 0.0;          ///< max_{p, i != j} of the interval integrals
    double verified_horizon = 0.0;
};

/// The t-boundedness constant: max over p and i != j of A_{t_p}^{t_{p+1}}(i, j).
[[nodiscard]] double interval_bound(const WeightSchedule& schedule, std::span<const double> sequence);

/// Re-checks every stored claim of the certificate against the schedule.
[[nodiscard]] bool verify_certificate(const WeightSchedule& schedule, const ConnectivityCertificate& certificate);

/// mu_D: largest integral of a single weight over any window of length D.
/// Window starts are the stride grid plus every breakpoint b and b - D,
/// which makes the value exact for piecewise-constant schedules.
[[nodiscard]] double compute_mu(const WeightSchedule& schedule, double window, double stride);

struct WindowMass {
    double start = 0.0;
    double mass = 0.0;  ///< max_{i != j} of the integral over [start, start + window]
};

[[nodiscard]] std::vector<WindowMass> window_mass_profile(const WeightSchedule& schedule,
                                                          std::span<const double> starts,
                                                          double window);

struct AqscSearch {
    std::optional<ConnectivityCertificate> certificate;
    Interval stalled;           ///< the tail on which no further interval closed
    SkeletonGraph last_union;   ///< epsilon-skeleton of the union over `stalled`
    [[nodiscard]] bool ok() const noexcept { return certificate.has_value(); }
};

/// Greedy construction t_0 = 0, t_{p+1} = inf{t > t_p : union over [t_p, t]
/// is quasi-strongly epsilon-connected}. Crossing times are solved exactly
/// on piecewise-constant segments.
[[nodiscard]] AqscSearch find_aqsc_sequence(const WeightSchedule& schedule, double epsilon);

struct NitsViolation {
    int interval = 0;
    int row = 0;  ///< i: the side whose integral exceeds K times the reverse
    int col = 0;  ///< j
    friend bool operator==(const NitsViolation&, const NitsViolation&) = default;
};

struct NitsCheck {
    bool ok = false;
    std::vector<NitsViolation> violations;
    double ell = 0.0;  ///< always finite on finite data; reported anyway
};

[[nodiscard]] NitsCheck check_nits(const WeightSchedule& schedule, std::span<const double> sequence,
                                   double ratio_bound);

/// NITS certificate for a caller-supplied sequence, if it verifies.
[[nodiscard]] std::optional<ConnectivityCertificate> certify_nits(const WeightSchedule& schedule,
                                                                  std::span<const double> sequence,
                                                                  double ratio_bound);

/// 0, T, 2T, ... up to the horizon (integer T for discrete schedules).
[[nodiscard]] std::vector<double> uniform_sequence(double period, double horizon);

struct ArcBalanceCheck {
    bool ok = false;
    double worst_ratio = 1.0;
};

[[nodiscard]] ArcBalanceCheck check_arc_balance(const WeightSchedule& schedule, const SkeletonGraph& persistent,
                                                double ratio_bound, std::span<const double> sample_times);

struct AperiodicityCheck {
    bool ok = false;
    double floor = 0.0;  ///< min over k and i of b_ii(k)
};

[[nodiscard]] AperiodicityCheck check_strong_aperiodicity(const WeightSchedule& schedule, double eta);

struct DwellThinning {
    std::optional<ConnectivityCertificate> certificate;
    int stride = 0;  ///< k: every k-th point of the original sequence is kept
};

/// Passes to the subsequence t_0, t_k, t_2k, ... with the smallest k whose
/// gaps all reach `dwell`.
[[nodiscard]] DwellThinning thin_by_dwell(const WeightSchedule& schedule, const ConnectivityCertificate& certificate,
                                          double dwell);

struct AnalysisReport {
    std::map<double, double> mu_table;
    std::optional<double> aperiodicity_floor;
    std::optional<double> arc_balance_ratio;
    std::string notes;
};

struct AnalysisRequest {
    std::vector<double> windows;  ///< D values for the mu table
    double stride = 1.0;
    std::optional<double> persistence_threshold;  ///< enables the arc-balance scan
};

[[nodiscard]] AnalysisReport analyze_schedule(const WeightSchedule& schedule, const AnalysisRequest& request);

[[nodiscard]] std::string to_string(CertificateKind kind);

}  // namespace delaylab
