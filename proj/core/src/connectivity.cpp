#include "delaylab/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace delaylab {

namespace {

constexpr double kIntegralRelTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

double max_off_diagonal(const Matrix& m) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j) best = std::max(best, m(i, j));
    return best;
}

bool union_is_connected(const WeightSchedule& schedule, double t1, double t2, double epsilon) {
    return is_quasi_strongly_connected(epsilon_skeleton(integrate_weights(schedule, t1, t2), epsilon)).connected;
}

void require_sequence(const WeightSchedule& schedule, std::span<const double> sequence, const char* what) {
    for (std::size_t p = 1; p < sequence.size(); ++p)
        if (!(sequence[p] > sequence[p - 1]))
            throw ArgumentError(std::string(what) + ": sequence must be strictly increasing");
    if (!sequence.empty() && (sequence.front() < 0.0 || sequence.back() > schedule.horizon()))
        throw OutOfRangeError(std::string(what) + ": sequence leaves the horizon");
    if (schedule.is_discrete())
        for (double t : sequence)
            if (t != std::floor(t)) throw ArgumentError(std::string(what) + ": discrete sequences must be integer");
}

// First time T >= from with integral_{from}^{T} a_ij >= epsilon, for every
// off-diagonal entry (infinity when it never happens before the horizon).
Matrix crossing_times(const WeightSchedule& schedule, double from, double epsilon) {
    const int n = schedule.agents();
    Matrix crossing = Matrix::Constant(n, n, kInf);
    Matrix accumulated = Matrix::Zero(n, n);
    const auto bps = schedule.breakpoints();
    const auto segs = schedule.segments();
    for (std::size_t s = schedule.segment_index(from); s < segs.size(); ++s) {
        const double lo = std::max(from, bps[s]);
        const double hi = schedule.segment_end(s);
        if (hi <= lo) continue;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j || std::isfinite(crossing(i, j))) continue;
                const double rate = segs[s](i, j);
                if (rate <= 0.0) continue;
                const double next = accumulated(i, j) + rate * (hi - lo);
                if (next >= epsilon) {
                    crossing(i, j) = std::min(hi, lo + (epsilon - accumulated(i, j)) / rate);
                }
                accumulated(i, j) = next;
            }
    }
    return crossing;
}

// Smallest candidate time at which the union becomes epsilon-connected, or
// infinity. Arcs enter in crossing order, so connectivity is monotone in the
// number of arcs and a binary search over that order suffices.
double next_connected_time(const WeightSchedule& schedule, double from, double epsilon) {
    const int n = schedule.agents();
    const Matrix crossing = crossing_times(schedule, from, epsilon);
    std::vector<std::pair<double, Arc>> order;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && std::isfinite(crossing(i, j))) order.push_back({crossing(i, j), Arc{j, i}});
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return std::tie(a.second.from, a.second.to) < std::tie(b.second.from, b.second.to);
    });
    auto connected_with = [&](std::size_t count) {
        SkeletonGraph g(n, epsilon);
        for (std::size_t k = 0; k < count; ++k) g.add_arc(order[k].second.from, order[k].second.to);
        return is_quasi_strongly_connected(g).connected;
    };
    if (n == 1) return kInf;
    if (!connected_with(order.size())) return kInf;
    std::size_t lo = 1, hi = order.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (connected_with(mid)) hi = mid;
        else lo = mid + 1;
    }
    // Every arc that crosses at the same instant joins simultaneously.
    return order[lo - 1].first;
}

// The analytic crossing time may miss the threshold by an ulp once the
// integral is recomputed; walk upward until the union verifies exactly.
std::optional<double> settle_crossing(const WeightSchedule& schedule, double from, double candidate, double epsilon) {
    double t = candidate;
    const double horizon = schedule.horizon();
    for (int attempt = 0; attempt < 200; ++attempt) {
        if (t > horizon) return std::nullopt;
        if (union_is_connected(schedule, from, t, epsilon)) return t;
        t = attempt < 64 ? std::nextafter(t, kInf) : t + 1e-14 * std::max(1.0, std::abs(t)) * (attempt - 63);
    }
    return std::nullopt;
}

}  // namespace

std::string to_string(CertificateKind kind) {
    switch (kind) {
        case CertificateKind::aqsc: return "AQSC";
        case CertificateKind::nits: return "NITS";
        case CertificateKind::uqsc: return "UQSC";
    }
    return "unknown";
}

double interval_bound(const WeightSchedule& schedule, std::span<const double> sequence) {
    double ell = 0.0;
    for (std::size_t p = 0; p + 1 < sequence.size(); ++p)
        ell = std::max(ell, max_off_diagonal(integrate_weights(schedule, sequence[p], sequence[p + 1])));
    return ell;
}

bool verify_certificate(const WeightSchedule& schedule, const ConnectivityCertificate& certificate) {
    const auto& seq = certificate.sequence;
    if (seq.size() < 2) return false;
    try {
        require_sequence(schedule, seq, "verify_certificate");
    } catch (const std::exception&) {
        return false;
    }
    const double ell = interval_bound(schedule, seq);
    if (!std::isfinite(certificate.ell) || std::abs(ell - certificate.ell) > kIntegralRelTol * std::max(1.0, ell))
        return false;
    if (certificate.verified_horizon > seq.back() + 1e-12) return false;
    switch (certificate.kind) {
        case CertificateKind::aqsc:
        case CertificateKind::uqsc:
            if (!(certificate.epsilon > 0.0)) return false;
            for (std::size_t p = 0; p + 1 < seq.size(); ++p)
                if (!union_is_connected(schedule, seq[p], seq[p + 1], certificate.epsilon)) return false;
            if (certificate.kind == CertificateKind::uqsc) {
                const double period = seq[1] - seq[0];
                for (std::size_t p = 1; p + 1 < seq.size(); ++p)
                    if (std::abs((seq[p + 1] - seq[p]) - period) > 1e-9 * std::max(1.0, period)) return false;
            }
            return true;
        case CertificateKind::nits:
            return check_nits(schedule, seq, certificate.ratio_bound).ok;
    }
    return false;
}

double compute_mu(const WeightSchedule& schedule, double window, double stride) {
    if (!(window > 0.0)) throw ArgumentError("compute_mu: window must be positive");
    if (window > schedule.horizon()) throw ArgumentError("compute_mu: window exceeds the horizon");
    double mu = 0.0;
    if (schedule.is_discrete()) {
        const auto length = static_cast<long>(std::ceil(window));
        const auto steps = static_cast<long>(schedule.horizon());
        for (long k = 0; k + length <= steps; ++k)
            mu = std::max(mu, max_off_diagonal(integrate_weights(schedule, static_cast<double>(k),
                                                                 static_cast<double>(k + length))));
        return mu;
    }
    if (!(stride > 0.0)) throw ArgumentError("compute_mu: stride must be positive");
    const double last_start = schedule.horizon() - window;
    std::set<double> starts;
    for (long k = 0;; ++k) {
        const double t = static_cast<double>(k) * stride;
        if (t > last_start) break;
        starts.insert(t);
    }
    for (double b : schedule.breakpoints()) {
        if (b <= last_start) starts.insert(b);
        if (b - window >= 0.0 && b - window <= last_start) starts.insert(b - window);
    }
    starts.insert(last_start);
    for (double t : starts) mu = std::max(mu, max_off_diagonal(integrate_weights(schedule, t, t + window)));
    return mu;
}

std::vector<WindowMass> window_mass_profile(const WeightSchedule& schedule, std::span<const double> starts,
                                            double window) {
    std::vector<WindowMass> profile;
    profile.reserve(starts.size());
    for (double t : starts)
        profile.push_back({t, max_off_diagonal(integrate_weights(schedule, t, t + window))});
    return profile;
}

AqscSearch find_aqsc_sequence(const WeightSchedule& schedule, double epsilon) {
    if (!(epsilon > 0.0)) throw ArgumentError("find_aqsc_sequence: epsilon must be positive");
    const double horizon = schedule.horizon();
    std::vector<double> sequence{0.0};
    double current = 0.0;
    while (current < horizon) {
        std::optional<double> next;
        if (schedule.is_discrete()) {
            for (double t = current + 1.0; t <= horizon; t += 1.0)
                if (union_is_connected(schedule, current, t, epsilon)) {
                    next = t;
                    break;
                }
        } else {
            const double candidate = next_connected_time(schedule, current, epsilon);
            if (std::isfinite(candidate)) next = settle_crossing(schedule, current, candidate, epsilon);
        }
        if (!next) break;
        sequence.push_back(*next);
        current = *next;
    }

    AqscSearch result;
    result.stalled = {current, horizon};
    result.last_union = epsilon_skeleton(integrate_weights(schedule, current, horizon), epsilon);
    if (sequence.size() >= 2) {
        ConnectivityCertificate cert;
        cert.kind = CertificateKind::aqsc;
        cert.epsilon = epsilon;
        cert.ell = interval_bound(schedule, sequence);
        cert.verified_horizon = sequence.back();
        cert.sequence = std::move(sequence);
        result.certificate = std::move(cert);
    }
    return result;
}

NitsCheck check_nits(const WeightSchedule& schedule, std::span<const double> sequence, double ratio_bound) {
    if (!(ratio_bound >= 1.0)) throw ArgumentError("check_nits: K must be at least 1");
    require_sequence(schedule, sequence, "check_nits");
    NitsCheck result;
    const int n = schedule.agents();
    for (std::size_t p = 0; p + 1 < sequence.size(); ++p) {
        const Matrix integral = integrate_weights(schedule, sequence[p], sequence[p + 1]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (integral(i, j) > ratio_bound * integral(j, i) * (1.0 + kIntegralRelTol))
                    result.violations.push_back({static_cast<int>(p), i, j});
            }
    }
    result.ell = interval_bound(schedule, sequence);
    result.ok = result.violations.empty() && std::isfinite(result.ell);
    return result;
}

std::optional<ConnectivityCertificate> certify_nits(const WeightSchedule& schedule, std::span<const double> sequence,
                                                    double ratio_bound) {
    if (sequence.size() < 2) return std::nullopt;
    const auto check = check_nits(schedule, sequence, ratio_bound);
    if (!check.ok) return std::nullopt;
    ConnectivityCertificate cert;
    cert.kind = CertificateKind::nits;
    cert.sequence.assign(sequence.begin(), sequence.end());
    cert.ratio_bound = ratio_bound;
    cert.ell = check.ell;
    cert.verified_horizon = sequence.back();
    return cert;
}

std::vector<double> uniform_sequence(double period, double horizon) {
    if (!(period > 0.0)) throw ArgumentError("uniform_sequence: period must be positive");
    std::vector<double> seq;
    for (long p = 0;; ++p) {
        const double t = static_cast<double>(p) * period;
        if (t > horizon * (1.0 + 1e-15)) break;
        seq.push_back(std::min(t, horizon));
    }
    return seq;
}

ArcBalanceCheck check_arc_balance(const WeightSchedule& schedule, const SkeletonGraph& persistent, double ratio_bound,
                                  std::span<const double> sample_times) {
    if (!(ratio_bound >= 1.0)) throw ArgumentError("check_arc_balance: K must be at least 1");
    ArcBalanceCheck result{true, 1.0};
    if (persistent.arcs().size() < 2) return result;
    std::set<std::size_t> visited;
    for (double t : sample_times) {
        const std::size_t s = schedule.segment_index(t);
        if (!visited.insert(s).second) continue;
        const Matrix& a = schedule.segments()[s];
        double lo = kInf, hi = 0.0;
        for (const auto& arc : persistent.arcs()) {
            const double w = a(arc.to, arc.from);
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
        double ratio = 1.0;
        if (hi > 0.0) ratio = lo > 0.0 ? hi / lo : kInf;
        result.worst_ratio = std::max(result.worst_ratio, ratio);
    }
    result.ok = result.worst_ratio <= ratio_bound * (1.0 + kIntegralRelTol);
    return result;
}

AperiodicityCheck check_strong_aperiodicity(const WeightSchedule& schedule, double eta) {
    if (!schedule.is_discrete()) throw KindError("check_strong_aperiodicity: needs a discrete schedule");
    if (!(eta > 0.0 && eta < 1.0)) throw ArgumentError("check_strong_aperiodicity: eta must lie in (0, 1)");
    double floor = 1.0;
    for (const auto& b : schedule.segments()) floor = std::min(floor, b.diagonal().minCoeff());
    return {floor >= eta, floor};
}

DwellThinning thin_by_dwell(const WeightSchedule& schedule, const ConnectivityCertificate& certificate, double dwell) {
    if (certificate.kind == CertificateKind::nits) throw KindError("thin_by_dwell: needs an AQSC certificate");
    if (!(dwell > 0.0)) throw ArgumentError("thin_by_dwell: dwell must be positive");
    const auto& seq = certificate.sequence;
    const std::size_t last = seq.empty() ? 0 : seq.size() - 1;
    for (std::size_t k = 1; k <= last; ++k) {
        std::vector<double> thinned;
        for (std::size_t idx = 0; idx <= last; idx += k) thinned.push_back(seq[idx]);
        if (thinned.size() < 2) break;
        bool ok = true;
        for (std::size_t p = 0; p + 1 < thinned.size() && ok; ++p) ok = thinned[p + 1] - thinned[p] >= dwell;
        if (!ok) continue;
        ConnectivityCertificate out = certificate;
        out.kind = CertificateKind::aqsc;
        out.ell = interval_bound(schedule, thinned);
        out.verified_horizon = thinned.back();
        out.sequence = std::move(thinned);
        return {std::move(out), static_cast<int>(k)};
    }
    return {std::nullopt, 0};
}

AnalysisReport analyze_schedule(const WeightSchedule& schedule, const AnalysisRequest& request) {
    AnalysisReport report;
    std::ostringstream notes;
    for (double d : request.windows) {
        if (d <= schedule.horizon()) report.mu_table[d] = compute_mu(schedule, d, request.stride);
        else notes << "window " << d << " exceeds the horizon; ";
    }
    if (schedule.is_discrete()) {
        double floor = 1.0;
        for (const auto& b : schedule.segments()) floor = std::min(floor, b.diagonal().minCoeff());
        report.aperiodicity_floor = floor;
    }
    if (request.persistence_threshold) {
        const auto persistent = persistent_graph_estimate(schedule, *request.persistence_threshold);
        std::vector<double> samples(schedule.breakpoints().begin(), schedule.breakpoints().end());
        report.arc_balance_ratio = check_arc_balance(schedule, persistent.graph, 1.0, samples).worst_ratio;
    }
    notes << "all conditions evaluated on [0, " << schedule.horizon() << "] only";
    report.notes = notes.str();
    return report;
}

}  // namespace delaylab
