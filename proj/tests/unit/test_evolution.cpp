#include "support.hpp"

#include "delaylab/connectivity.hpp"
#include "delaylab/evolution.hpp"

#include <doctest.h>

#include <random>

using namespace delaylab;
using delaylab::testing::column;
using delaylab::testing::mat;

namespace {

Matrix two_agent_u(double t) {
    const double e = std::exp(-2.0 * t);
    return mat({{(1 + e) / 2, (1 - e) / 2}, {(1 - e) / 2, (1 + e) / 2}});
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("trivial evolutionary matrices") {
    const auto single = WeightSchedule::constant(Matrix::Zero(1, 1), 5.0);
    CHECK(compute_evolutionary(single, DelaySchedule::none(1), 0.0, 4.0, 0.5).matrix == Matrix::Identity(1, 1));
    const auto zero = WeightSchedule::constant(Matrix::Zero(3, 3), 5.0);
    CHECK(compute_evolutionary(zero, DelaySchedule::uniform(3, 1.0), 0.0, 3.0, 0.5).matrix ==
          Matrix::Identity(3, 3));
    const auto pair = WeightSchedule::constant(delaylab::testing::complete_graph(2, 1.0), 5.0);
    CHECK(compute_evolutionary(pair, DelaySchedule::none(2), 1.0, 1.0, 0.5).matrix == Matrix::Identity(2, 2));
}

TEST_CASE("two-agent closed form") {
    const auto pair = WeightSchedule::constant(delaylab::testing::complete_graph(2, 1.0), 5.0);
    for (double t : {0.5, 1.0, 3.0}) {
        const auto u = compute_evolutionary(pair, DelaySchedule::none(2), 0.0, t, 0.25);
        CHECK((u.matrix - two_agent_u(t)).cwiseAbs().maxCoeff() <= 1e-14);
    }
    const double times[] = {1.0, 2.0, 4.0};
    const auto series = compute_evolutionary_series(pair, DelaySchedule::none(2), 0.0, times, 0.25);
    REQUIRE(series.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(series[k].to == times[k]);
        CHECK((series[k].matrix - two_agent_u(times[k])).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("validation clamps roundoff and rejects real violations") {
    EvolutionaryMatrix u{0.0, 1.0, mat({{1.0, -1e-14}, {0.0, 1.0}}), Scheme::exact_exponential, 0.5};
    validate_evolutionary(u);
    CHECK(u.matrix(0, 1) == 0.0);
    EvolutionaryMatrix neg{0.0, 1.0, mat({{1.0, -1e-6}, {0.0, 1.0}}), Scheme::exact_exponential, 0.5};
    CHECK_THROWS_AS(validate_evolutionary(neg), InvariantError);
    EvolutionaryMatrix big{0.0, 1.0, mat({{0.6, 0.6}, {0.0, 1.0}}), Scheme::exact_exponential, 0.5};
    CHECK_THROWS_AS(validate_evolutionary(big), InvariantError);
}

TEST_CASE("random runs are substochastic with the row-sum floor") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + trial % 4;
        const auto sc = delaylab::testing::random_linear(rng, n);
        const double mu = compute_mu(sc.weights, sc.delays.bound(), 0.25);
        const double times[] = {2.0, 5.0, 10.0};
        for (const auto& u : compute_evolutionary_series(sc.weights, sc.delays, 0.0, times, sc.step)) {
            CHECK(u.matrix.minCoeff() >= 0.0);
            CHECK(u.row_sums().maxCoeff() <= 1.0 + 1e-9);
            const auto floor = verify_row_sum_floor(u, mu);
            CHECK(floor.ok);
            CHECK(floor.psi == doctest::Approx(std::exp(-(n - 1) * mu)));
        }
    }
}

TEST_CASE("row-sum floor examples") {
    EvolutionaryMatrix id{0.0, 1.0, Matrix::Identity(3, 3), Scheme::exact_exponential, 0.5};
    const auto f = verify_row_sum_floor(id, 5.0);
    CHECK(f.ok);
    CHECK(f.floor == 1.0);

    const auto pair = WeightSchedule::constant(delaylab::testing::complete_graph(2, 1.0), 12.0);
    const auto u = compute_evolutionary(pair, DelaySchedule::uniform(2, 1.0), 0.0, 10.0, 0.25);
    const auto delayed = verify_row_sum_floor(u, compute_mu(pair, 1.0, 0.25));
    CHECK(delayed.psi == doctest::Approx(std::exp(-1.0)));
    CHECK(delayed.ok);
    CHECK(delayed.floor < 1.0);
}

TEST_CASE("segment structure on the complete graph") {
    const int n = 3;
    const auto s = WeightSchedule::constant(delaylab::testing::complete_graph(n, 1.0), 20.0);
    const auto delays = DelaySchedule::uniform(n, 1.0);
    const auto search = find_aqsc_sequence(s, 0.5);
    REQUIRE(search.ok());
    const auto thinned = thin_by_dwell(s, *search.certificate, delays.bound());
    REQUIRE(thinned.certificate);
    const auto& cert = *thinned.certificate;
    for (int p = 0; p + 2 < static_cast<int>(cert.sequence.size()); p += 3) {
        const auto rep = verify_segment_structure(s, delays, cert, p, 0.25);
        CHECK(rep.ok());
        CHECK(rep.diagonal_margin() > 0.0);
        CHECK(rep.connectivity_margin() > 0.0);
        CHECK(rep.eta == doctest::Approx(std::exp(-2.0 * (n - 1) * cert.ell)));
        CHECK(rep.epsilon == doctest::Approx(cert.epsilon * std::exp(-3.0 * (n - 1) * cert.ell)));
    }
    CHECK_THROWS_AS((void)verify_segment_structure(s, delays, cert, static_cast<int>(cert.sequence.size()) - 2, 0.25),
                    ArgumentError);
    CHECK_THROWS_AS((void)verify_segment_structure(s, delays, *search.certificate, 0, 0.25), ArgumentError);
}

TEST_CASE("Cauchy reconstruction") {
    std::mt19937 rng(22);
    for (int trial = 0; trial < 8; ++trial) {
        const auto sc = delaylab::testing::random_linear(rng, 2 + trial % 3, 2.0, 10.0, true);
        for (double t : {0.0, 3.0, 7.5}) {
            const auto parts = cauchy_parts(sc.weights, sc.delays, sc.initial, sc.disturbance, t, sc.step);
            CHECK(parts.discrepancy() <= 1e-6);
        }
    }
    const auto sc = delaylab::testing::random_linear(rng, 3);
    const auto zero = InitialCondition::zero_history(0.0, sc.initial.state, sc.delays.bound());
    const auto p0 = cauchy_parts(sc.weights, sc.delays, zero, std::nullopt, 6.0, sc.step);
    CHECK(p0.history.isZero(0.0));
    CHECK(p0.forced.isZero(0.0));
    CHECK(p0.discrepancy() <= 1e-8);
    CHECK(reconstruct_cauchy(sc.weights, sc.delays, sc.initial, std::nullopt, 0.0, sc.step) == 0.0);
    const auto flat = InitialCondition::constant_history(0.0, sc.initial.state, sc.delays.bound());
    CHECK(reconstruct_cauchy(sc.weights, sc.delays, flat, std::nullopt, 9.0, sc.step) <= 1e-6);
}

TEST_CASE("Cauchy reconstruction off the exact grid") {
    const double b = std::sqrt(2.0);
    const auto s = WeightSchedule::continuous({0.0, b}, {mat({{0, 1}, {1, 0}}), mat({{0, 2}, {0.5, 0}})}, 4.0);
    const auto init = InitialCondition::constant_history(0.0, column({0, 1}), 0.5);
    const StepSignal f({0.0, 1.0}, {column({0.3, -0.2}), column({0, 0})});
    const auto parts = cauchy_parts(s, DelaySchedule::uniform(2, 0.5), init, f, 3.0, 0.01);
    CHECK(parts.discrepancy() <= 1e-3);
}

TEST_CASE("sandwich estimate") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 8; ++trial) {
        const auto sc = delaylab::testing::random_linear(rng, 2 + trial % 4, 2.0, 10.0, trial % 2 == 0);
        for (double t : {1.0, 4.0, 9.0}) {
            const auto chk = check_sandwich(sc.weights, sc.delays, sc.initial, sc.disturbance, t, sc.step);
            CHECK(chk.ok);
            CHECK(chk.worst_violation <= 1e-6);
        }
    }
}

TEST_CASE("semigroup property") {
    std::mt19937 rng(24);
    for (int trial = 0; trial < 6; ++trial) {
        const auto sc = delaylab::testing::random_linear(rng, 3);
        CHECK(semigroup_discrepancy(sc.weights, sc.delays, 0.0, 3.0, 8.0, sc.step) <= 1e-6);
    }
    // Undelayed: plain matrix product.
    const auto sc = delaylab::testing::random_linear(rng, 4);
    const auto none = DelaySchedule::none(4);
    const auto u20 = compute_evolutionary(sc.weights, none, 0.0, 8.0, 0.25);
    const auto u21 = compute_evolutionary(sc.weights, none, 3.0, 8.0, 0.25);
    const auto u10 = compute_evolutionary(sc.weights, none, 0.0, 3.0, 0.25);
    CHECK((u20.matrix - u21.matrix * u10.matrix).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(semigroup_discrepancy(sc.weights, none, 0.0, 3.0, 8.0, 0.25) <= 1e-9);
}

TEST_CASE("consensus from rows") {
    const EvolutionaryMatrix id{0.0, 1.0, Matrix::Identity(3, 3), Scheme::exact_exponential, 0.5};
    const EvolutionaryMatrix id2{0.0, 2.0, Matrix::Identity(3, 3), Scheme::exact_exponential, 0.5};
    const EvolutionaryMatrix ids[] = {id, id2};
    const auto none = consensus_from_rows(ids, 1e-6);
    CHECK_FALSE(none.global);
    CHECK_FALSE(none.linked(0, 1));

    const auto pair = WeightSchedule::constant(delaylab::testing::complete_graph(2, 1.0), 10.0);
    const double late[] = {6.5, 7.0};
    const auto rows = compute_evolutionary_series(pair, DelaySchedule::none(2), 0.0, late, 0.25);
    const auto linked = consensus_from_rows(rows, 1e-6);
    CHECK(linked.global);
    CHECK(linked.linked(0, 1));
    const double early[] = {1.0, 1.5};
    CHECK_FALSE(consensus_from_rows(compute_evolutionary_series(pair, DelaySchedule::none(2), 0.0, early, 0.25), 1e-6)
                    .global);

    const EvolutionaryMatrix one{0.0, 1.0, Matrix::Identity(1, 1), Scheme::exact_exponential, 0.5};
    const EvolutionaryMatrix ones[] = {one};
    CHECK(consensus_from_rows(ones, 1e-6).global);
}

}  // TEST_SUITE
