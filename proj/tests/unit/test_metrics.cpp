#include "support.hpp"

#include "delaylab/connectivity.hpp"
#include "delaylab/geometry.hpp"
#include "delaylab/metrics.hpp"

#include <doctest.h>

#include <random>

using namespace delaylab;
using delaylab::testing::column;
using delaylab::testing::mat;

namespace {

Trajectory two_agent_run(double t_end, double delay = 0.0) {
    const auto s = WeightSchedule::constant(delaylab::testing::complete_graph(2, 1.0), t_end);
    const auto d = delay > 0.0 ? DelaySchedule::uniform(2, delay) : DelaySchedule::none(2);
    return simulate_continuous(s, d, InitialCondition::constant_history(0.0, column({0, 1}), delay), std::nullopt,
                               t_end, 0.25);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("window extrema basics") {
    const auto flat = simulate_continuous(WeightSchedule::constant(delaylab::testing::complete_graph(3, 1.0), 3.0),
                                          DelaySchedule::uniform(3, 1.0),
                                          InitialCondition::constant_history(0.0, Matrix::Constant(3, 1, 2.5), 1.0),
                                          std::nullopt, 3.0, 0.5);
    const auto ex = window_extrema(flat, 1.0);
    CHECK((ex.lower.array() == 2.5).all());
    CHECK((ex.upper.array() == 2.5).all());
    CHECK(ex.times.size() == flat.run_size());

    const auto run = two_agent_run(4.0);
    const auto pointwise = window_extrema(run, 0.0);
    for (std::size_t k = 0; k < pointwise.times.size(); ++k) {
        const Matrix& x = run.states[run.run_begin + k];
        CHECK(pointwise.lower(static_cast<Eigen::Index>(k), 0) == x.minCoeff());
        CHECK(pointwise.upper(static_cast<Eigen::Index>(k), 0) == x.maxCoeff());
    }
    const auto d = diameter_series(pointwise);
    for (std::size_t k = 0; k < d.times.size(); ++k)
        CHECK(std::abs(d.values[k] - delaylab::testing::two_agent_gap(1.0, d.times[k])) <= 1e-14);
}

TEST_CASE("window extrema against a brute-force scan") {
    std::mt19937 rng(41);
    const auto sc = delaylab::testing::random_linear(rng, 4);
    const auto traj = simulate_continuous(sc.weights, sc.delays, sc.initial, std::nullopt, sc.t_end, sc.step);
    const double h = sc.delays.bound();
    const auto ex = window_extrema(traj, h);
    for (std::size_t k = 0; k < ex.times.size(); ++k) {
        const double t = ex.times[k];
        double lo = 1e300, hi = -1e300;
        for (std::size_t s = 0; s < traj.times.size(); ++s)
            if (traj.times[s] <= t + 1e-12 && traj.times[s] >= t - h - 1e-12) {
                lo = std::min(lo, traj.states[s].minCoeff());
                hi = std::max(hi, traj.states[s].maxCoeff());
            }
        CHECK(ex.lower(static_cast<Eigen::Index>(k), 0) == lo);
        CHECK(ex.upper(static_cast<Eigen::Index>(k), 0) == hi);
    }
}

TEST_CASE("window monotonicity and envelope on random runs") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const auto sc = delaylab::testing::random_linear(rng, 2 + trial % 5);
        const auto traj = simulate_continuous(sc.weights, sc.delays, sc.initial, std::nullopt, sc.t_end, sc.step);
        const auto ex = window_extrema(traj, sc.delays.bound());
        CHECK(check_window_monotonicity(ex, 1e-10).ok);
        CHECK(check_envelope(traj, sc.weights, ex, 1e-8).ok);
        const auto d = diameter_series(ex);
        for (std::size_t k = 1; k < d.values.size(); ++k) CHECK(d.values[k] <= d.values[k - 1] + 1e-10);
    }
}

TEST_CASE("monotonicity check detects growth") {
    WindowExtrema ex;
    ex.times = {0.0, 1.0};
    ex.lower = mat({{0.0}, {-0.5}});
    ex.upper = mat({{1.0}, {1.0}});
    const auto chk = check_window_monotonicity(ex, 1e-10);
    CHECK_FALSE(chk.ok);
    CHECK(chk.worst == doctest::Approx(0.5));
}

TEST_CASE("diameter series helpers") {
    DiameterSeries d{{0.0, 1.0, 2.0}, {1.0, 0.5, 0.25}};
    CHECK(d.at_or_before(1.5) == 0.5);
    CHECK(d.at_or_before(2.0) == 0.25);
    CHECK(d.initial() == 1.0);
    CHECK(d.final() == 0.25);
    CHECK(consensus_verdict(d, 0.3));
    CHECK_FALSE(consensus_verdict(d, 0.1));
    DiameterSeries bumpy{{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}, {1.0, 0.5, 0.2, 0.1, 0.05, 0.01, 0.005, 0.02}};
    CHECK_FALSE(consensus_verdict(bumpy, 0.1));

    // Swap recursion: D(k) = prod_{m<k} (1 - 2 a_m).
    const int steps = 40;
    const Matrix w[] = {column({0, 1})};
    const auto traj =
        simulate_discrete(delaylab::testing::swap_map(steps), DelaySchedule::none(2), InitialCondition::from_window(0.0, w));
    const auto spread = diameter_series(window_extrema(traj, 0.0));
    for (int k = 0; k <= steps; ++k) {
        CHECK(std::abs(spread.values[static_cast<std::size_t>(k)] - delaylab::testing::swap_product(k)) <= 1e-14);
        CHECK(spread.values[static_cast<std::size_t>(k)] > 0.41);
    }
    CHECK_FALSE(consensus_verdict(spread, 1e-3));
}

TEST_CASE("spread series") {
    Trajectory t;
    t.times = {0.0};
    t.states = {mat({{0, 3}, {1, 1}})};
    CHECK(spread_series(t).values.front() == 2.0);
}

TEST_CASE("contraction fit") {
    const int n = 2;
    const auto run = two_agent_run(10.0);
    const auto diameter = diameter_series(window_extrema(run, 0.0));
    const auto cert = ConnectivityCertificate{CertificateKind::uqsc, uniform_sequence(0.5, 10.0), 1.0, 1.0, 0.5, 10.0};
    const auto rep = contraction_fit(diameter, cert, n);
    CHECK(rep.block_length == 2);
    CHECK(rep.pass);
    CHECK_FALSE(rep.insufficient);
    REQUIRE_FALSE(rep.ratios.empty());
    // Late blocks lose relative accuracy to cancellation in x_2 - x_1.
    for (double r : rep.ratios) CHECK(r == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
    CHECK(rep.theta < 1.0);

    const auto short_cert = ConnectivityCertificate{CertificateKind::uqsc, {0.0, 0.5}, 1.0, 1.0, 0.5, 0.5};
    const auto tiny = contraction_fit(diameter, short_cert, n);
    CHECK(tiny.insufficient);
    CHECK_FALSE(tiny.pass);

    // Flat diameter fails.
    DiameterSeries flat{{0.0, 1.0, 2.0, 3.0, 4.0}, {1.0, 1.0, 1.0, 1.0, 1.0}};
    const auto stuck = contraction_fit(flat, ConnectivityCertificate{CertificateKind::aqsc, {0, 1, 2, 3, 4}, 1, 1, 1, 4}, 2);
    CHECK_FALSE(stuck.pass);
}

TEST_CASE("contraction ratios stay in [0, 1] on random undisturbed runs") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + trial % 3;
        auto sc = delaylab::testing::random_linear(rng, n, 1.0, 20.0);
        const auto traj = simulate_continuous(sc.weights, sc.delays, sc.initial, std::nullopt, sc.t_end, sc.step);
        const auto diameter = diameter_series(window_extrema(traj, sc.delays.bound()));
        const auto cert = ConnectivityCertificate{CertificateKind::uqsc, uniform_sequence(1.0, 20.0), 1.0, 1.0, 1.0, 20.0};
        const auto rep = contraction_fit(diameter, cert, n);
        for (double r : rep.ratios) {
            CHECK(r >= 0.0);
            CHECK(r <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("hull and ball distances") {
    const Matrix seg = mat({{0, 0}, {1, 0}});
    CHECK(hull_distance(mat({{2, 0}}), seg)(0) == doctest::Approx(1.0));
    CHECK(hull_distance(mat({{0.5, 0}}), seg)(0) == 0.0);
    const Matrix tri = mat({{0, 0}, {2, 0}, {0, 2}});
    CHECK(hull_distance(mat({{0.5, 0.5}}), tri)(0) == 0.0);
    CHECK(hull_distance(mat({{2, 2}}), tri)(0) == doctest::Approx(std::sqrt(2.0)));
    const auto ball = TargetSet::ball(Eigen::RowVector2d(0, 0), 1.0, StepSignal::constant(Matrix::Zero(1, 2)));
    CHECK(hull_distance(mat({{1, 1}}), ball)(0) == doctest::Approx(std::sqrt(2.0) - 1.0));
    CHECK(hull_distance(mat({{0.2, 0.1}}), ball)(0) == 0.0);
    CHECK_THROWS_AS((void)hull_distance(mat({{1, 1}}), Matrix(0, 2)), ArgumentError);

    // Random points against a brute-force grid scan of the tetrahedron.
    const Matrix tet = mat({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    std::mt19937 rng(44);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::RowVector3d p(u(rng), u(rng), u(rng));
        double best = 1e300;
        const int g = 60;
        for (int a = 0; a <= g; ++a)
            for (int b = 0; a + b <= g; ++b)
                for (int c = 0; a + b + c <= g; ++c) {
                    const Eigen::RowVector3d q(double(a) / g, double(b) / g, double(c) / g);
                    best = std::min(best, (p - q).norm());
                }
        const double exact = distance_to_hull(p, tet);
        CHECK(exact <= best + 1e-12);
        CHECK(exact >= best - 0.03);
    }
}

TEST_CASE("hull distance series") {
    const auto none = WeightSchedule::constant(Matrix::Zero(1, 1), 6.0);
    const LeaderConfig leaders{mat({{0, 0}, {1, 0}}), StepSignal::constant(mat({{1, 1}}))};
    const auto t = simulate_containment(none, DelaySchedule::none(1), leaders,
                                        InitialCondition::constant_history(0.0, mat({{3, 0}}), 0.0), 6.0, 0.25);
    const auto series = max_hull_distance_series(t, leaders.positions);
    REQUIRE(series.size() == t.run_size());
    CHECK(series.front() == doctest::Approx(2.0));
    for (std::size_t k = 0; k < series.size(); ++k)
        CHECK(series[k] == doctest::Approx(std::max(0.0, 2.5 * std::exp(-2.0 * t.times[k]) - 0.5)).epsilon(1e-9));
}

TEST_CASE("disturbance masses") {
    const StepSignal f({0.0, 1.0, 3.0}, {column({1, -2}), column({0.5, 0}), column({0, 0})});
    CHECK(disturbance_mass(f, 0.0, 1.0) == doctest::Approx(2.0));
    CHECK(disturbance_mass(f, 0.5, 2.0) == doctest::Approx(1.5));
    CHECK(disturbance_mass(f, 3.0, 10.0) == 0.0);
}

TEST_CASE("disturbance bound check") {
    const auto s = WeightSchedule::constant(delaylab::testing::complete_graph(3, 1.0), 40.0);
    const auto init = InitialCondition::constant_history(0.0, column({0, 1, -1}), 0.0);
    const auto cert = ConnectivityCertificate{CertificateKind::uqsc, uniform_sequence(1.0, 40.0), 1.0, 1.0, 1.0, 40.0};

    const auto clean = simulate_continuous(s, DelaySchedule::none(3), init, std::nullopt, 40.0, 0.5);
    const auto clean_d = diameter_series(window_extrema(clean, 0.0));
    const auto base = disturbance_bound_check(clean_d, cert, std::nullopt, 1e-3);
    CHECK(base.total_mass == 0.0);
    CHECK(base.tail_vanishing);
    CHECK(base.implication_holds);
    CHECK(base.tail_diameter == clean_d.at_or_before(30.0));

    const auto geo = geometric_pulses(column({1, 0, -1}), 0.0, 1.0, 0.5, 0.5, 40);
    const auto g = simulate_continuous(s, DelaySchedule::none(3), init, geo, 40.0, 0.5);
    const auto g_rep = disturbance_bound_check(diameter_series(window_extrema(g, 0.0)), cert, geo, 1e-3);
    CHECK(g_rep.masses_vanishing);
    CHECK(g_rep.tail_vanishing);
    CHECK(g_rep.implication_holds);
    CHECK(g_rep.bounded);

    const auto flat = constant_pulses(column({1, 0, -1}), 0.0, 1.0, 0.5, 40);
    const auto c = simulate_continuous(s, DelaySchedule::none(3), init, flat, 40.0, 0.5);
    const auto c_rep = disturbance_bound_check(diameter_series(window_extrema(c, 0.0)), cert, flat, 1e-3);
    CHECK_FALSE(c_rep.masses_vanishing);
    CHECK_FALSE(c_rep.tail_vanishing);
    CHECK(c_rep.tail_diameter > 1e-3);
    CHECK(c_rep.bounded);
    CHECK(c_rep.implication_holds);
    CHECK(c_rep.tail_diameter <= c_rep.a_priori_bound);
}

TEST_CASE("current extremes approach the window extremes on consensus runs") {
    // Bounded weights with uniform connectivity: the gaps between min_i x_i(t)
    // and lambda(t) (and max vs Lambda) must not grow from the first quarter to the last.
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> w(0.5, 1.5), x0(-1.0, 1.0);
    std::uniform_int_distribution<int> lag(0, 8);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 3 + trial % 3;
        Matrix a = Matrix::Zero(n, n), h = Matrix::Zero(n, n), x(n, 1);
        for (int i = 0; i < n; ++i) {
            x(i, 0) = x0(rng);
            for (int j = 0; j < n; ++j)
                if (i != j) {
                    a(i, j) = w(rng);
                    h(i, j) = 0.25 * lag(rng);
                }
        }
        const double bound = h.maxCoeff();
        const auto traj = simulate_continuous(WeightSchedule::constant(a, 40.0), DelaySchedule::constant(h, bound),
                                              InitialCondition::constant_history(0.0, x, bound), std::nullopt, 40.0,
                                              0.25);
        const auto ext = window_extrema(traj, bound);
        double first = 0.0, last = 0.0;
        for (std::size_t k = 0; k < ext.times.size(); ++k) {
            const Matrix& s = traj.at(ext.times[k]);
            const double gap = std::max(std::abs(s.minCoeff() - ext.lower(static_cast<Eigen::Index>(k), 0)),
                                        std::abs(s.maxCoeff() - ext.upper(static_cast<Eigen::Index>(k), 0)));
            if (ext.times[k] <= 10.0) first = std::max(first, gap);
            if (ext.times[k] >= 30.0) last = std::max(last, gap);
        }
        CAPTURE(trial);
        CHECK(last <= 10.0 * first);
        CHECK(last <= 1e-3);
    }
}

}  // TEST_SUITE
