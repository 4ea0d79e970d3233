#include "pipeline.hpp"

#include "svg.hpp"

#include "delaylab/connectivity.hpp"
#include "delaylab/evolution.hpp"
#include "delaylab/io.hpp"
#include "delaylab/metrics.hpp"
#include "delaylab/reduction.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace delaylab::tools {

using nlohmann::json;

namespace {

std::string num(double v) { return format_number(v); }

json certificate_json(const ConnectivityCertificate& c) {
    return {{"kind", to_string(c.kind)}, {"sequence", c.sequence},     {"epsilon", c.epsilon},
            {"K", c.ratio_bound},        {"ell", c.ell},               {"verified_horizon", c.verified_horizon}};
}

class Pipeline {
public:
    Pipeline(const Scenario& sc, const RunOptions& opt) : sc_(sc), opt_(opt) {
        step_ = opt.step.value_or(sc.step);
    }

    RunResult run() {
        std::filesystem::create_directories(opt_.out_dir);
        simulate();
        extrema_ = window_extrema(traj_, sc_.delays.bound());
        diameter_ = diameter_series(extrema_);
        summarize();
        certificates();
        if (sc_.wants("mu")) mu();
        if (sc_.wants("evolution")) evolution();
        if (sc_.wants("contraction")) contraction();
        if (sc_.wants("cauchy-check")) cauchy();
        if (sc_.wants("reduction-check")) reduction();
        if (sc_.wants("hull")) hull();
        if (sc_.wants("disturbance")) disturbance();
        if (sc_.wants("components")) components();
        expectations();
        write_outputs();
        return {sc_.name, opt_.out_dir, checks_};
    }

private:
    void check(std::string name, bool pass, std::string detail) {
        checks_.push_back({std::move(name), pass, std::move(detail)});
    }

    [[nodiscard]] bool plain_consensus() const {
        return !sc_.leaders && !sc_.target && !sc_.disturbance;
    }

    void simulate() {
        const std::optional<StepSignal> f =
            sc_.disturbance ? std::optional<StepSignal>(sc_.disturbance->signal) : std::nullopt;
        if (sc_.discrete()) {
            const auto steps = static_cast<int>(std::lround(sc_.t_end));
            if (sc_.coupling == Coupling::inverse_square) {
                const auto psi = CouplingFunction::inverse_square();
                traj_ = simulate_discrete(sc_.weights, sc_.delays, sc_.initial, steps, &psi);
            } else {
                traj_ = simulate_discrete(sc_.weights, sc_.delays, sc_.initial, steps);
            }
        } else if (sc_.leaders) {
            traj_ = simulate_containment(sc_.weights, sc_.delays, *sc_.leaders, sc_.initial, sc_.t_end, step_);
        } else if (sc_.target) {
            traj_ = simulate_target_aggregation(sc_.weights, sc_.delays, *sc_.target, *sc_.damping, sc_.initial,
                                                sc_.t_end, step_);
        } else if (sc_.coupling == Coupling::inverse_square) {
            if (f) throw ArgumentError("nonlinear runs do not take a disturbance");
            traj_ = simulate_nonlinear(sc_.weights, sc_.delays, sc_.initial, CouplingFunction::inverse_square(),
                                       sc_.t_end, step_);
        } else {
            traj_ = simulate_continuous(sc_.weights, sc_.delays, sc_.initial, f, sc_.t_end, step_);
        }
    }

    void summarize() {
        report_["spec_version"] = kSpecVersion;
        report_["scenario"] = sc_.name;
        report_["description"] = sc_.description;
        report_["covers"] = sc_.covers;
        report_["generator"] = sc_.generator;
        report_["agents"] = traj_.agents();
        report_["dims"] = traj_.dims();
        report_["scheme"] = to_string(traj_.scheme);
        report_["step"] = traj_.step;
        report_["t_end"] = traj_.end_time();
        report_["history_bound"] = traj_.history_bound;
        report_["coupling"] = sc_.coupling == Coupling::linear ? "linear" : "inverse-square";
        report_["initial_diameter"] = diameter_.initial();
        report_["final_diameter"] = diameter_.final();
        report_["diameter_limit_estimate"] = diameter_.final();
        const bool verdict = consensus_verdict(diameter_, sc_.expect.consensus_tolerance);
        report_["consensus"] = verdict;
        report_["consensus_tolerance"] = sc_.expect.consensus_tolerance;
        notes_.push_back("limits are read off the finite horizon: consensus means the final window diameter is "
                         "below the tolerance with a nonincreasing final quarter");
        if (plain_consensus()) {
            const auto mono = check_window_monotonicity(extrema_, 1e-10);
            check("window-monotonicity", mono.ok, "largest violation " + num(mono.worst));
        }
    }

    void certificates() {
        if (sc_.wants("aqsc")) {
            const auto search = find_aqsc_sequence(sc_.weights, sc_.epsilon);
            if (search.ok()) {
                aqsc_ = *search.certificate;
                report_["aqsc"] = certificate_json(*aqsc_);
                check("aqsc-certificate", true, std::to_string(aqsc_->sequence.size() - 1) + " intervals");
            } else {
                report_["aqsc"] = {{"found", false},
                                   {"stalled_from", search.stalled.begin},
                                   {"arcs_in_last_union", search.last_union.arcs().size()}};
                check("aqsc-certificate", false, "no interval closes after t = " + num(search.stalled.begin));
            }
        }
        if (sc_.wants("nits")) {
            const auto& spec = *sc_.nits;
            const auto seq = spec.sequence.empty() ? uniform_sequence(spec.period, sc_.weights.horizon())
                                                   : spec.sequence;
            const auto chk = check_nits(sc_.weights, seq, spec.ratio_bound);
            json j{{"ok", chk.ok}, {"ell", chk.ell}, {"violations", chk.violations.size()}, {"sequence", seq}};
            report_["nits"] = j;
            if (chk.ok) nits_ = certify_nits(sc_.weights, seq, spec.ratio_bound);
            check("nits-certificate", chk.ok && nits_.has_value(),
                  std::to_string(chk.violations.size()) + " violations at K = " + num(spec.ratio_bound));
        }
    }

    void mu() {
        json j;
        const double h = sc_.delays.bound();
        const WeightSchedule* w = &sc_.weights;
        std::optional<WeightSchedule> reduced;
        if (sc_.discrete()) {
            reduced = reduce_discrete(sc_.weights, sc_.delays).weights;
            w = &*reduced;
            j["schedule"] = "reduced continuous";
            std::vector<double> per_segment;
            for (int k = 0; static_cast<double>(k) < w->horizon(); ++k) {
                Matrix a = integrate_weights(*w, k, k + 1);
                a.diagonal().setZero();
                per_segment.push_back(a.maxCoeff());
            }
            j["mu_1_by_segment"] = per_segment;
        }
        json table = json::object();
        for (double d : {1.0, h}) {
            if (d > 0.0 && d <= w->horizon()) table[num(d)] = compute_mu(*w, d, std::min(d, 0.25));
        }
        j["mu"] = table;
        report_["mu"] = j;
    }

    void evolution() {
        json j;
        try {
            const double t = sc_.t_end;
            std::vector<double> times{0.5 * t, 0.75 * t, t};
            if (sc_.discrete())
                for (double& s : times) s = std::floor(s);
            const auto series = compute_evolutionary_series(sc_.weights, sc_.delays, 0.0, times, step_);
            const auto& u = series.back();
            j["t"] = t;
            j["min_entry"] = u.matrix.minCoeff();
            j["max_row_sum"] = u.row_sums().maxCoeff();
            check("evolution-substochastic", u.matrix.minCoeff() >= 0.0 && u.row_sums().maxCoeff() <= 1.0 + 1e-9,
                  "max row sum " + num(u.row_sums().maxCoeff()));
            if (!sc_.discrete()) {
                const double h = sc_.delays.bound();
                const double mu_h = h > 0.0 ? compute_mu(sc_.weights, h, std::min(h, 0.25)) : 0.0;
                const auto floor = verify_row_sum_floor(u, mu_h);
                j["row_sum_floor"] = floor.floor;
                j["psi"] = floor.psi;
                check("evolution-row-sum-floor", floor.ok, "floor " + num(floor.floor) + " vs " + num(floor.psi));
            }
            const auto links = consensus_from_rows(series, sc_.expect.consensus_tolerance);
            j["rows_agree"] = links.global;
            std::ofstream out(opt_.out_dir / "evolutionary_matrix.csv");
            write_matrix_csv(out, u);
        } catch (const InvariantError& e) {
            check("evolution-substochastic", false, e.what());
        }
        report_["evolution"] = j;
    }

    void contraction() {
        const ConnectivityCertificate* cert = nits_ ? &*nits_ : aqsc_ ? &*aqsc_ : nullptr;
        if (!cert) {
            check("contraction", false, "no certificate available (request aqsc or nits)");
            return;
        }
        const auto rep = contraction_fit(diameter_, *cert, traj_.agents());
        report_["contraction"] = {{"certificate", to_string(rep.kind)},
                                  {"block_length", rep.block_length},
                                  {"ratios", rep.ratios},
                                  {"theta", rep.theta},
                                  {"saturated_blocks", rep.saturated_blocks},
                                  {"insufficient", rep.insufficient},
                                  {"pass", rep.pass},
                                  {"note", rep.note}};
        contraction_pass_ = rep.pass;
        if (!sc_.expect.contraction) check("contraction", rep.pass, "theta " + num(rep.theta) + "; " + rep.note);
    }

    void cauchy() {
        if (sc_.discrete() || sc_.leaders || sc_.target || sc_.coupling != Coupling::linear) {
            notes_.push_back("cauchy-check applies to linear consensus runs only; skipped");
            return;
        }
        const std::optional<StepSignal> f =
            sc_.disturbance ? std::optional<StepSignal>(sc_.disturbance->signal) : std::nullopt;
        double worst = 0.0;
        for (double t : {0.5 * sc_.t_end, sc_.t_end})
            worst = std::max(worst, reconstruct_cauchy(sc_.weights, sc_.delays, sc_.initial, f, t, step_));
        const auto sandwich = check_sandwich(sc_.weights, sc_.delays, sc_.initial, f, sc_.t_end, step_);
        report_["cauchy"] = {{"discrepancy", worst}, {"sandwich_worst", sandwich.worst_violation}};
        const double limit = sc_.expect.cauchy_max.value_or(traj_.scheme == Scheme::exact_exponential ? 1e-6 : 1e-3);
        check("cauchy-reconstruction", worst <= limit, "discrepancy " + num(worst) + " (limit " + num(limit) + ")");
        check("cauchy-sandwich", sandwich.ok, "worst " + num(sandwich.worst_violation));
    }

    void reduction() {
        const int k_end = static_cast<int>(std::lround(sc_.t_end));
        const double gap = verify_reduction(sc_.weights, sc_.delays, sc_.window, k_end);
        const double limit = sc_.expect.reduction_max.value_or(1e-12);
        report_["reduction"] = {{"k_end", k_end}, {"discrepancy", gap}};
        check("reduction-agreement", gap <= limit, "discrepancy " + num(gap) + " (limit " + num(limit) + ")");
    }

    void hull() {
        const auto series = sc_.leaders ? max_hull_distance_series(traj_, sc_.leaders->positions)
                                        : max_hull_distance_series(traj_, *sc_.target);
        // Forward invariance: once every agent is inside, nobody leaves.
        bool inside = false, kept = true;
        double worst_after = 0.0;
        for (double d : series) {
            if (inside) {
                worst_after = std::max(worst_after, d);
                if (d > 1e-10) kept = false;
            }
            if (d <= 1e-10) inside = true;
        }
        report_["hull"] = {{"initial_distance", series.front()},
                           {"final_distance", series.back()},
                           {"entered", inside},
                           {"worst_after_entry", worst_after}};
        check("hull-invariance", kept, "largest distance after entry " + num(worst_after));
        if (sc_.expect.hull_final_max)
            check("hull-final", series.back() <= *sc_.expect.hull_final_max,
                  "final distance " + num(series.back()) + " (limit " + num(*sc_.expect.hull_final_max) + ")");
    }

    void disturbance() {
        const ConnectivityCertificate* cert = nits_ ? &*nits_ : aqsc_ ? &*aqsc_ : nullptr;
        if (!cert) {
            check("disturbance", false, "no certificate available (request aqsc or nits)");
            return;
        }
        const std::optional<StepSignal> f =
            sc_.disturbance ? std::optional<StepSignal>(sc_.disturbance->signal) : std::nullopt;
        const double tol = sc_.expect.final_diameter_max.value_or(1e-3);
        const auto rep = disturbance_bound_check(diameter_, *cert, f, tol);
        report_["disturbance"] = {{"total_mass", rep.total_mass},
                                  {"tail_mass", rep.tail_mass},
                                  {"tail_diameter", rep.tail_diameter},
                                  {"final_diameter", rep.final_diameter},
                                  {"a_priori_bound", rep.a_priori_bound},
                                  {"masses_vanishing", rep.masses_vanishing},
                                  {"tail_vanishing", rep.tail_vanishing},
                                  {"bounded", rep.bounded},
                                  {"implication_holds", rep.implication_holds},
                                  {"note", rep.note}};
        check("disturbance-bounded", rep.bounded,
              "tail diameter " + num(rep.tail_diameter) + " vs a-priori " + num(rep.a_priori_bound));
        check("disturbance-implication", rep.implication_holds, rep.note);
        if (sc_.expect.masses_vanishing)
            check("disturbance-masses", rep.masses_vanishing == *sc_.expect.masses_vanishing,
                  std::string("masses vanishing: ") + (rep.masses_vanishing ? "yes" : "no"));
        if (sc_.expect.tail_vanishing)
            check("disturbance-tail", rep.tail_vanishing == *sc_.expect.tail_vanishing,
                  std::string("tail vanishing: ") + (rep.tail_vanishing ? "yes" : "no"));
    }

    void components() {
        const Matrix& x = traj_.final_state();
        json groups = json::array();
        std::vector<Eigen::RowVectorXd> means;
        bool all_agree = true;
        for (const auto& c : sc_.components) {
            Matrix sub(static_cast<Eigen::Index>(c.size()), x.cols());
            for (std::size_t k = 0; k < c.size(); ++k) sub.row(static_cast<Eigen::Index>(k)) = x.row(c[k]);
            const double spread = (sub.colwise().maxCoeff() - sub.colwise().minCoeff()).maxCoeff();
            means.push_back(sub.colwise().mean());
            all_agree = all_agree && spread <= sc_.expect.consensus_tolerance;
            groups.push_back({{"agents", c}, {"spread", spread}, {"mean", std::vector<double>(means.back().data(),
                                                                   means.back().data() + means.back().size())}});
        }
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < means.size(); ++a)
            for (std::size_t b = a + 1; b < means.size(); ++b)
                gap = std::min(gap, (means[a] - means[b]).cwiseAbs().maxCoeff());
        report_["components"] = {{"groups", groups}, {"min_gap", gap}};
        check("components-agree", all_agree, "tolerance " + num(sc_.expect.consensus_tolerance));
        if (sc_.expect.component_gap_min)
            check("components-separated", gap >= *sc_.expect.component_gap_min,
                  "smallest gap " + num(gap) + " (needs " + num(*sc_.expect.component_gap_min) + ")");
    }

    void expectations() {
        const auto& e = sc_.expect;
        const double d_end = diameter_.final();
        if (e.consensus) {
            const bool verdict = consensus_verdict(diameter_, e.consensus_tolerance);
            check("consensus", verdict == *e.consensus,
                  std::string("verdict ") + (verdict ? "true" : "false") + ", expected " +
                      (*e.consensus ? "true" : "false") + "; final diameter " + num(d_end));
        }
        if (e.final_diameter_max)
            check("final-diameter", d_end <= *e.final_diameter_max,
                  num(d_end) + " (limit " + num(*e.final_diameter_max) + ")");
        if (e.final_diameter_ratio_max) {
            const double ratio = diameter_.initial() > 0.0 ? d_end / diameter_.initial() : 0.0;
            check("final-diameter-ratio", ratio <= *e.final_diameter_ratio_max,
                  num(ratio) + " (limit " + num(*e.final_diameter_ratio_max) + ")");
        }
        if (e.diameter_limit) {
            const double gap = std::abs(d_end - *e.diameter_limit);
            check("diameter-limit", gap <= e.diameter_limit_tolerance,
                  num(d_end) + " vs " + num(*e.diameter_limit) + " (tolerance " + num(e.diameter_limit_tolerance) +
                      ")");
        }
        if (e.contraction) {
            const bool pass = contraction_pass_.value_or(false);
            check("contraction", pass == *e.contraction,
                  std::string("contraction ") + (pass ? "holds" : "fails") + ", expected " +
                      (*e.contraction ? "to hold" : "to fail"));
        }
    }

    void write_outputs() {
        {
            std::ofstream out(opt_.out_dir / "trajectory.csv");
            write_trajectory_csv(out, traj_);
        }
        {
            std::ofstream out(opt_.out_dir / "diameter.csv");
            write_diameter_csv(out, diameter_);
        }
        json checks = json::array();
        bool ok = true;
        for (const auto& c : checks_) {
            checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
            ok = ok && c.pass;
        }
        report_["checks"] = checks;
        report_["status"] = ok ? "pass" : "fail";
        report_["notes"] = notes_;
        {
            std::ofstream out(opt_.out_dir / "report.json");
            out << report_.dump(2) << '\n';
        }
        if (opt_.plots && sc_.plots) plots();
    }

    void plots() {
        write_line_chart(opt_.out_dir / "diameter.svg", sc_.name + ": window diameter", "t", "D(t)",
                         {{"D", diameter_.times, diameter_.values}}, true);
        std::vector<Series> agents;
        const int n = std::min(traj_.agents(), 8);
        for (int i = 0; i < n; ++i) {
            Series s{"agent " + std::to_string(i), {}, {}};
            for (std::size_t k = 0; k < traj_.times.size(); ++k) {
                s.x.push_back(traj_.times[k]);
                s.y.push_back(traj_.states[k](i, 0));
            }
            agents.push_back(std::move(s));
        }
        write_line_chart(opt_.out_dir / "trajectories.svg", sc_.name + ": coordinate 0", "t", "x", agents);
    }

    const Scenario& sc_;
    const RunOptions& opt_;
    double step_ = 0.25;
    Trajectory traj_;
    WindowExtrema extrema_;
    DiameterSeries diameter_;
    std::optional<ConnectivityCertificate> aqsc_, nits_;
    std::optional<bool> contraction_pass_;
    std::vector<Check> checks_;
    std::vector<std::string> notes_;
    json report_;
};

}  // namespace

bool RunResult::ok() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
    return Pipeline(scenario, options).run();
}

}  // namespace delaylab::tools
