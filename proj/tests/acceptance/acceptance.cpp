// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "support.hpp"

#include "config.hpp"

#include "delaylab/evolution.hpp"
#include "delaylab/geometry.hpp"
#include "delaylab/metrics.hpp"
#include "delaylab/reduction.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace delaylab;
using delaylab::testing::random_discrete;
using delaylab::testing::random_linear;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[" << what << "] ";
        }
    }
};

tools::Scenario bundled(const std::string& name) {
    return tools::load_scenario(std::string(DELAYLAB_SCENARIO_DIR) + "/" + name + ".json");
}

Trajectory simulate(const tools::Scenario& sc) {
    return simulate_continuous(sc.weights, sc.delays, sc.initial, std::nullopt, sc.t_end, sc.step);
}

DiameterSeries diameter_of(const Trajectory& traj, double window) {
    return diameter_series(window_extrema(traj, window));
}

constexpr int kRandomSuite = 24;

void ac1(Outcome& o) {
    std::mt19937 rng(2024);
    double worst_mono = 0.0, worst_env = 0.0;
    for (int s = 0; s < kRandomSuite; ++s) {
        const int n = 2 + s % 5;
        const auto sc = random_linear(rng, n, 2.0, 10.0);
        const auto traj = simulate_continuous(sc.weights, sc.delays, sc.initial, std::nullopt, sc.t_end, sc.step);
        o.require(traj.scheme == Scheme::exact_exponential, "scenario " + std::to_string(s) + " not exact");
        const auto ext = window_extrema(traj, 2.0);
        const auto mono = check_window_monotonicity(ext, 1e-10);
        const auto env = check_envelope(traj, sc.weights, ext, 1e-8);
        worst_mono = std::max(worst_mono, mono.worst);
        worst_env = std::max(worst_env, env.worst);
        o.require(mono.ok, "monotonicity " + std::to_string(s));
        o.require(env.ok, "envelope " + std::to_string(s));
    }
    o.detail << kRandomSuite << " random runs, worst window step " << worst_mono << ", worst envelope excess "
             << worst_env;
}

void ac2(Outcome& o) {
    std::mt19937 rng(2024);
    double worst_sum = 0.0, worst_margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < kRandomSuite; ++s) {
        const int n = 2 + s % 5;
        const auto sc = random_linear(rng, n, 2.0, 10.0);
        const double mu = compute_mu(sc.weights, 2.0, 0.25);
        const double psi = std::exp(-(n - 1) * mu);
        const std::vector<double> times{2.5, 5.0, 10.0};
        try {
            for (const auto& u : compute_evolutionary_series(sc.weights, sc.delays, 0.0, times, sc.step)) {
                worst_sum = std::max(worst_sum, u.row_sums().maxCoeff());
                worst_margin = std::min(worst_margin, u.row_sums().minCoeff() - psi);
                o.require(u.matrix.minCoeff() >= 0.0, "negative entry " + std::to_string(s));
                o.require(u.row_sums().maxCoeff() <= 1.0 + 1e-9, "row sum " + std::to_string(s));
                o.require(u.row_sums().minCoeff() >= psi - 1e-9, "floor " + std::to_string(s));
            }
        } catch (const InvariantError& e) {
            o.require(false, e.what());
        }
    }
    o.detail << "largest row sum " << worst_sum << ", smallest floor margin " << worst_margin;
}

void ac3(Outcome& o) {
    std::mt19937 rng(77);
    double worst = 0.0;
    for (int s = 0; s < 12; ++s) {
        const auto sc = random_linear(rng, 2 + s % 4, 2.0, 8.0, true);
        for (double t : {1.0, 3.75, 8.0}) {
            const double d = reconstruct_cauchy(sc.weights, sc.delays, sc.initial, sc.disturbance, t, sc.step);
            worst = std::max(worst, d);
        }
    }
    o.require(worst <= 1e-6, "discrepancy");
    o.detail << "12 runs with prehistory and disturbance, worst discrepancy " << worst;
}

void ac4(Outcome& o) {
    for (const char* name : {"intermittent-chain", "complete-graph-delayed"}) {
        const auto sc = bundled(name);
        const auto traj = simulate(sc);
        const auto diam = diameter_of(traj, sc.delays.bound());
        const auto search = find_aqsc_sequence(sc.weights, sc.epsilon);
        o.require(search.ok(), std::string(name) + " AQSC");
        if (!search.ok()) continue;
        const auto fit = contraction_fit(diam, *search.certificate, traj.agents());
        bool all_below = !fit.ratios.empty();
        for (double r : fit.ratios) all_below = all_below && r < 1.0;
        const double rel = diam.final() / diam.initial();
        o.require(fit.pass && all_below, std::string(name) + " theta");
        o.require(rel <= 1e-6, std::string(name) + " final diameter");
        o.detail << name << ": theta " << fit.theta << " over " << fit.ratios.size() << " blocks, D(end)/D(0) "
                 << rel << "; ";
    }
}

void ac5(Outcome& o) {
    std::mt19937 rng(5);
    double worst = 0.0;
    for (int s = 0; s < 12; ++s) {
        const auto d = random_discrete(rng, 2 + s % 5, 50, 3, 0.2);
        o.require(d.delays.bound() <= 3.0, "delay bound");
        o.require(check_strong_aperiodicity(d.weights, 0.2).ok, "aperiodicity " + std::to_string(s));
        const double gap = verify_reduction(d.weights, d.delays, d.window, 50);
        worst = std::max(worst, gap);
        o.require(gap <= 1e-12, "reduction " + std::to_string(s));
    }
    o.detail << "12 random schedules, worst discrepancy " << worst;
}

void ac6(Outcome& o) {
    const auto sc = bundled("appendix-a-counterexample");
    const int steps = static_cast<int>(sc.t_end);
    const auto disc = simulate_discrete(sc.weights, sc.delays, sc.initial, steps);
    const auto red = reduce_discrete(sc.weights, sc.delays);
    // The sawtooth delays reach back one unit; that history is never read at grid points.
    const auto init = InitialCondition::constant_history(0.0, sc.initial.state, red.delays.bound());
    const auto cont = simulate_continuous(red.weights, red.delays, init, std::nullopt, steps, 0.25);
    o.require(cont.scheme == Scheme::exact_exponential, "exact stepper");
    double gap = 0.0;
    for (int k = 0; k <= steps; ++k)
        gap = std::max(gap, (disc.at(k) - cont.at(k)).cwiseAbs().maxCoeff());
    o.require(gap <= 1e-12, "continuous vs discrete");

    // Oracle: the infinite product, truncated where the factors round to 1.
    const double limit = testing::swap_product(200);
    const auto diam = diameter_of(disc, 0.0);
    o.require(std::abs(diam.final() - limit) <= 1e-6, "diameter limit");
    o.require(!consensus_verdict(diam, 1e-6), "consensus should fail");
    o.require(find_aqsc_sequence(sc.weights, 0.5).ok(), "AQSC certificate");

    double mu_gap = 0.0;
    for (int k = 0; k < steps; ++k) {
        Matrix a = integrate_weights(red.weights, k, k + 1);
        a.diagonal().setZero();
        mu_gap = std::max(mu_gap, std::abs(a.maxCoeff() - (k + 1) * std::log(4.0)));
    }
    o.require(mu_gap <= 1e-9, "mu_1 by segment");
    o.detail << "grid gap " << gap << ", D(" << steps << ") = " << diam.final() << " vs " << limit
             << ", mu_1 deviation from (k+1) ln 4 " << mu_gap;
}

void ac7(Outcome& o) {
    {
        const auto sc = bundled("nits-type-symmetric");
        o.require(sc.delays.bound() == 1.0, "delay bound 1");
        o.require(certify_nits(sc.weights, sc.nits->sequence, sc.nits->ratio_bound).has_value(), "NITS");
        const auto diam = diameter_of(simulate(sc), sc.delays.bound());
        o.require(diam.final() <= 1e-4, "diameter");
        o.detail << "type-symmetric D(end) " << diam.final() << "; ";
    }
    {
        const auto sc = bundled("two-component-persistent");
        const auto x = simulate(sc).final_state();
        double spread = 0.0;
        std::vector<double> means;
        for (const auto& comp : sc.components) {
            double lo = x(comp[0], 0), hi = lo, sum = 0.0;
            for (int i : comp) {
                lo = std::min(lo, x(i, 0));
                hi = std::max(hi, x(i, 0));
                sum += x(i, 0);
            }
            spread = std::max(spread, hi - lo);
            means.push_back(sum / static_cast<double>(comp.size()));
        }
        const double gap = std::abs(means[0] - means[1]);
        o.require(spread <= 1e-4, "component consensus");
        o.require(gap >= 0.1, "component gap");
        o.detail << "two components: spread " << spread << ", gap " << gap;
    }
}

void ac8(Outcome& o) {
    for (const char* name : {"intermittent-chain", "complete-graph-delayed", "nits-type-symmetric"}) {
        const auto sc = bundled(name);
        const auto lin = simulate(sc);
        const auto unit =
            simulate_nonlinear(sc.weights, sc.delays, sc.initial, CouplingFunction::unit(), sc.t_end, sc.step);
        bool identical = lin.states.size() == unit.states.size();
        for (std::size_t k = 0; identical && k < lin.states.size(); ++k)
            identical = lin.states[k] == unit.states[k] && lin.times[k] == unit.times[k];
        o.require(identical, std::string(name) + " unit coupling");
        const auto nl = simulate_nonlinear(sc.weights, sc.delays, sc.initial, CouplingFunction::inverse_square(),
                                           sc.t_end, sc.step);
        const double d = diameter_of(nl, sc.delays.bound()).final();
        o.require(d <= 1e-4, std::string(name) + " inverse-square");
        o.detail << name << ": inverse-square D(end) " << d << "; ";
    }
}

double max_after_inside(const Trajectory& traj, const Matrix& vertices, int agent, bool& started_inside) {
    double worst = -1.0;
    started_inside = false;
    for (std::size_t k = traj.run_begin; k < traj.states.size(); ++k) {
        const double d = distance_to_hull(traj.states[k].row(agent), vertices);
        if (k == traj.run_begin) started_inside = d <= 1e-10;
        if (started_inside) worst = std::max(worst, d);
    }
    return worst;
}

void ac9(Outcome& o) {
    {
        const auto sc = bundled("containment-two-leaders");
        const auto traj =
            simulate_containment(sc.weights, sc.delays, *sc.leaders, sc.initial, sc.t_end, sc.step);
        const Vector final_d = hull_distance(traj.final_state(), sc.leaders->positions);
        o.require(final_d.maxCoeff() <= 1e-4, "containment");
        int inside = 0;
        for (int i = 0; i < traj.agents(); ++i) {
            bool in = false;
            const double worst = max_after_inside(traj, sc.leaders->positions, i, in);
            if (!in) continue;
            ++inside;
            o.require(worst <= 1e-10, "agent " + std::to_string(i) + " left the hull");
        }
        o.require(inside > 0, "no follower starts inside");
        o.detail << "containment max distance " << final_d.maxCoeff() << ", " << inside
                 << " follower(s) starting inside stay inside; ";
    }
    {
        // All followers inside the hull from the start, constant prehistory.
        const auto sc = bundled("containment-two-leaders");
        Matrix x(3, 2);
        x << 0.1, 0.0, 0.9, 0.0, 0.5, 0.0;
        const auto init = InitialCondition::constant_history(0.0, x, sc.delays.bound());
        const auto traj = simulate_containment(sc.weights, sc.delays, *sc.leaders, init, sc.t_end, sc.step);
        double worst = 0.0;
        for (std::size_t k = traj.run_begin; k < traj.states.size(); ++k)
            worst = std::max(worst, hull_distance(traj.states[k], sc.leaders->positions).maxCoeff());
        o.require(worst <= 1e-10, "forward invariance");
        o.detail << "invariance run worst distance " << worst << "; ";
    }
    {
        const auto sc = bundled("target-ball-aggregation");
        const auto traj = simulate_target_aggregation(sc.weights, sc.delays, *sc.target, *sc.damping, sc.initial,
                                                      sc.t_end, sc.step);
        double d = 0.0;
        for (int i = 0; i < traj.agents(); ++i)
            d = std::max(d, distance_to_ball(traj.final_state().row(i), sc.target->center, sc.target->radius));
        o.require(d <= 1e-3, "aggregation");
        o.detail << "ball distance " << d;
    }
}

void ac10(Outcome& o) {
    for (const char* name : {"vanishing-disturbance", "constant-mass-disturbance"}) {
        const auto sc = bundled(name);
        const std::optional<StepSignal> f = sc.disturbance->signal;
        const auto traj = simulate_continuous(sc.weights, sc.delays, sc.initial, f, sc.t_end, sc.step);
        const auto diam = diameter_of(traj, sc.delays.bound());
        const auto search = find_aqsc_sequence(sc.weights, sc.epsilon);
        o.require(search.ok(), std::string(name) + " AQSC");
        if (!search.ok()) continue;
        const auto rep = disturbance_bound_check(diam, *search.certificate, f, 1e-3);
        const bool geometric = sc.disturbance->kind == "geometric";
        if (geometric) {
            o.require(diam.final() <= 1e-3, "geometric diameter");
            o.require(rep.masses_vanishing && rep.tail_vanishing, "geometric flags");
        } else {
            o.require(rep.bounded, "constant-mass bounded");
            o.require(!rep.masses_vanishing, "constant-mass masses flagged");
            o.require(!rep.tail_vanishing, "constant-mass tail");
        }
        o.detail << name << ": D(end) " << diam.final() << ", tail " << rep.tail_diameter << " (bound "
                 << rep.a_priori_bound << "); ";
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
        {"AC1 monotone window and envelope", ac1},
        {"AC2 evolutionary matrix structure", ac2},
        {"AC3 Cauchy reconstruction", ac3},
        {"AC4 contraction on intermittent chain and complete graph", ac4},
        {"AC5 discrete-to-continuous reduction", ac5},
        {"AC6 counterexample without bounded weights", ac6},
        {"AC7 type-symmetric consensus and components", ac7},
        {"AC8 nonlinear couplings", ac8},
        {"AC9 containment and aggregation", ac9},
        {"AC10 disturbance robustness", ac10},
    };
    int failed = 0;
    for (const auto& [label, fn] : criteria) {
        Outcome o;
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", label, o.detail.str().c_str());
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
