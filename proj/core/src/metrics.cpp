#include "delaylab/metrics.hpp"

#include "delaylab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace delaylab {

namespace {

double time_slack(double t) { return 1e-9 * std::max(1.0, std::abs(t)); }

}  // namespace

WindowExtrema window_extrema(const Trajectory& traj, double window) {
    if (!(window >= 0.0)) throw ArgumentError("window must be nonnegative");
    if (traj.times.empty()) throw ArgumentError("empty trajectory");
    const int m = traj.dims();
    const std::size_t total = traj.times.size();
    WindowExtrema out;
    out.window = window;
    out.times.assign(traj.times.begin() + static_cast<long>(traj.run_begin), traj.times.end());
    out.lower.resize(static_cast<Eigen::Index>(out.times.size()), m);
    out.upper.resize(static_cast<Eigen::Index>(out.times.size()), m);
    for (int c = 0; c < m; ++c) {
        std::vector<double> lo(total), hi(total);
        for (std::size_t k = 0; k < total; ++k) {
            lo[k] = traj.states[k].col(c).minCoeff();
            hi[k] = traj.states[k].col(c).maxCoeff();
        }
        // Monotone deques of indices for the sliding min and max.
        std::deque<std::size_t> qmin, qmax;
        std::size_t first = 0;
        for (std::size_t k = 0; k < total; ++k) {
            while (!qmin.empty() && lo[qmin.back()] >= lo[k]) qmin.pop_back();
            qmin.push_back(k);
            while (!qmax.empty() && hi[qmax.back()] <= hi[k]) qmax.pop_back();
            qmax.push_back(k);
            const double edge = traj.times[k] - window - time_slack(traj.times[k]);
            while (traj.times[first] < edge) ++first;
            while (qmin.front() < first) qmin.pop_front();
            while (qmax.front() < first) qmax.pop_front();
            if (k >= traj.run_begin) {
                const auto r = static_cast<Eigen::Index>(k - traj.run_begin);
                out.lower(r, c) = lo[qmin.front()];
                out.upper(r, c) = hi[qmax.front()];
            }
        }
    }
    return out;
}

double DiameterSeries::at_or_before(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t + time_slack(t));
    if (it == times.begin()) throw OutOfRangeError("diameter series starts after t");
    return values[static_cast<std::size_t>(std::distance(times.begin(), it) - 1)];
}

DiameterSeries diameter_series(const WindowExtrema& extrema) {
    DiameterSeries d;
    d.times = extrema.times;
    d.values.resize(d.times.size());
    for (std::size_t k = 0; k < d.times.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        d.values[k] = (extrema.upper.row(r) - extrema.lower.row(r)).maxCoeff();
    }
    return d;
}

DiameterSeries spread_series(const Trajectory& traj) {
    DiameterSeries d;
    for (std::size_t k = traj.run_begin; k < traj.times.size(); ++k) {
        d.times.push_back(traj.times[k]);
        const Matrix& x = traj.states[k];
        d.values.push_back((x.colwise().maxCoeff() - x.colwise().minCoeff()).maxCoeff());
    }
    return d;
}

bool consensus_verdict(const DiameterSeries& series, double tolerance) {
    if (series.values.empty()) return false;
    if (!(series.final() < tolerance)) return false;
    const double t0 = series.times.front();
    const double start = series.times.back() - 0.25 * (series.times.back() - t0);
    for (std::size_t k = 1; k < series.values.size(); ++k)
        if (series.times[k - 1] >= start && series.values[k] > series.values[k - 1] + 1e-10) return false;
    return true;
}

MonotonicityCheck check_window_monotonicity(const WindowExtrema& e, double tolerance) {
    MonotonicityCheck r;
    for (Eigen::Index k = 1; k < e.upper.rows(); ++k)
        for (Eigen::Index c = 0; c < e.upper.cols(); ++c) {
            r.worst = std::max(r.worst, e.upper(k, c) - e.upper(k - 1, c));
            r.worst = std::max(r.worst, e.lower(k - 1, c) - e.lower(k, c));
        }
    r.ok = r.worst <= tolerance;
    return r;
}

MonotonicityCheck check_envelope(const Trajectory& traj, const WeightSchedule& weights, const WindowExtrema& e,
                                 double tolerance) {
    const std::size_t count = traj.run_size();
    const int n = traj.agents();
    // Cumulative exit-rate integrals at the run samples.
    Matrix cumulative = Matrix::Zero(static_cast<Eigen::Index>(count), n);
    for (std::size_t k = 1; k < count; ++k) {
        const double a = traj.times[traj.run_begin + k - 1];
        const double b = traj.times[traj.run_begin + k];
        const Matrix block = integrate_weights(weights, a, b);
        const auto r = static_cast<Eigen::Index>(k);
        cumulative.row(r) = cumulative.row(r - 1) + block.rowwise().sum().transpose();
    }
    MonotonicityCheck out;
    for (std::size_t s = 0; s < count; ++s) {
        const Matrix& xs = traj.states[traj.run_begin + s];
        const auto rs = static_cast<Eigen::Index>(s);
        for (std::size_t t = s; t < count; ++t) {
            const Matrix& xt = traj.states[traj.run_begin + t];
            const auto rt = static_cast<Eigen::Index>(t);
            for (int i = 0; i < n; ++i) {
                const double decay = std::exp(-(cumulative(rt, i) - cumulative(rs, i)));
                for (Eigen::Index c = 0; c < xt.cols(); ++c) {
                    const double upper = xs(i, c) * decay + e.upper(rs, c) * (1.0 - decay);
                    const double lower = xs(i, c) * decay + e.lower(rs, c) * (1.0 - decay);
                    out.worst = std::max({out.worst, xt(i, c) - upper, lower - xt(i, c)});
                }
            }
        }
    }
    out.ok = out.worst <= tolerance;
    return out;
}

ContractionReport contraction_fit(const DiameterSeries& diameter, const ConnectivityCertificate& certificate,
                                  int agents) {
    ContractionReport r;
    r.kind = certificate.kind;
    r.block_length = std::max(1, 2 * (agents - 1));
    const auto& seq = certificate.sequence;
    const double end = diameter.times.back();
    const double floor = 1e-12 * std::max(diameter.initial(), std::numeric_limits<double>::min());
    const auto b = static_cast<std::size_t>(r.block_length);
    for (std::size_t k = 0; (k + 1) * b < seq.size(); ++k) {
        const double t1 = seq[k * b];
        const double t2 = seq[(k + 1) * b];
        if (t1 < diameter.times.front() - time_slack(t1)) continue;
        if (t2 > end + time_slack(end)) break;
        r.blocks.push_back({t1, t2});
        const double d1 = diameter.at_or_before(t1);
        const double d2 = diameter.at_or_before(t2);
        if (d1 <= floor) {
            ++r.saturated_blocks;
            r.ratios.push_back(0.0);
            continue;
        }
        r.ratios.push_back(d2 / d1);
    }
    r.insufficient = r.blocks.empty();
    r.theta = r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end());
    r.pass = !r.insufficient && r.theta < 1.0;
    std::ostringstream note;
    if (r.insufficient) note << "no complete block of " << r.block_length << " certificate intervals";
    else note << r.blocks.size() << " complete blocks of " << r.block_length << " intervals";
    if (r.saturated_blocks > 0) note << "; " << r.saturated_blocks << " started at roundoff level (ratio 0)";
    r.note = note.str();
    return r;
}

Vector hull_distance(const Matrix& sample, const Matrix& vertices) {
    Vector out(sample.rows());
    for (Eigen::Index i = 0; i < sample.rows(); ++i) out(i) = distance_to_hull(sample.row(i), vertices);
    return out;
}

Vector hull_distance(const Matrix& sample, const TargetSet& target) {
    Vector out(sample.rows());
    for (Eigen::Index i = 0; i < sample.rows(); ++i) out(i) = target.distance(sample.row(i));
    return out;
}

std::vector<double> max_hull_distance_series(const Trajectory& traj, const Matrix& vertices) {
    std::vector<double> out;
    for (std::size_t k = traj.run_begin; k < traj.times.size(); ++k)
        out.push_back(hull_distance(traj.states[k], vertices).maxCoeff());
    return out;
}

std::vector<double> max_hull_distance_series(const Trajectory& traj, const TargetSet& target) {
    std::vector<double> out;
    for (std::size_t k = traj.run_begin; k < traj.times.size(); ++k)
        out.push_back(hull_distance(traj.states[k], target).maxCoeff());
    return out;
}

double disturbance_mass(const StepSignal& f, double a, double b) {
    if (b < a) throw ArgumentError("disturbance_mass: reversed interval");
    if (f.empty() || a == b) return 0.0;
    const auto bps = f.breakpoints();
    const auto vals = f.values();
    double total = 0.0;
    for (std::size_t s = 0; s < bps.size(); ++s) {
        const double lo = std::max(a, bps[s]);
        const double hi = std::min(b, s + 1 < bps.size() ? bps[s + 1] : b);
        if (hi > lo) total += (hi - lo) * vals[s].cwiseAbs().maxCoeff();
    }
    if (a < bps.front()) throw OutOfRangeError("disturbance_mass: interval precedes the signal");
    return total;
}

DisturbanceReport disturbance_bound_check(const DiameterSeries& diameter, const ConnectivityCertificate& certificate,
                                          const std::optional<StepSignal>& disturbance, double tail_tolerance) {
    DisturbanceReport r;
    const double t0 = diameter.times.front();
    const double t_end = diameter.times.back();
    const double quarter = t_end - 0.25 * (t_end - t0);
    const auto& seq = certificate.sequence;
    for (std::size_t p = 0; p + 1 < seq.size(); ++p) {
        const double a = std::max(seq[p], t0);
        const double b = std::min(seq[p + 1], t_end);
        if (b > a) r.intervals.push_back({a, b});
    }
    if (r.intervals.empty()) r.intervals.push_back({t0, t_end});
    double max_mass = 0.0;
    for (const auto& iv : r.intervals) {
        const double mass = disturbance ? disturbance_mass(*disturbance, iv.begin, iv.end) : 0.0;
        r.masses.push_back(mass);
        r.total_mass += mass;
        max_mass = std::max(max_mass, mass);
        if (iv.end > quarter) r.tail_mass = std::max(r.tail_mass, mass);
    }
    if (disturbance && seq.size() >= 2) {
        // Mass outside the certificate's coverage still counts toward the bound.
        const double covered_end = std::min(seq.back(), t_end);
        if (covered_end < t_end) r.total_mass += disturbance_mass(*disturbance, covered_end, t_end);
    }
    for (std::size_t k = 0; k < diameter.times.size(); ++k)
        if (diameter.times[k] >= quarter) r.tail_diameter = std::max(r.tail_diameter, diameter.values[k]);
    r.final_diameter = diameter.final();
    r.a_priori_bound = diameter.initial() + 2.0 * r.total_mass;
    r.masses_vanishing = max_mass == 0.0 || r.tail_mass <= 0.01 * max_mass;
    r.tail_vanishing = r.tail_diameter <= tail_tolerance;
    r.bounded = std::isfinite(r.tail_diameter) && r.tail_diameter <= r.a_priori_bound + 1e-9;
    r.implication_holds = !r.masses_vanishing || r.tail_vanishing;
    std::ostringstream note;
    note << "limsup surrogates over the final quarter [" << quarter << ", " << t_end << "]";
    if (!r.masses_vanishing) note << "; interval masses do not vanish";
    r.note = note.str();
    return r;
}

}  // namespace delaylab
