#include "support.hpp"

#include "delaylab/connectivity.hpp"
#include "delaylab/reduction.hpp"

#include <doctest.h>

#include <random>

using namespace delaylab;
using delaylab::testing::column;
using delaylab::testing::mat;

TEST_SUITE("reduction") {

TEST_CASE("exit rate factor") {
    CHECK(exit_rate_factor(1.0) == 1.0);
    CHECK(exit_rate_factor(0.5) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
    // Near 1 the series must agree with the direct formula evaluated in long double.
    for (double u : {1e-7, 3e-8, 1e-10}) {
        const long double b = 1.0L - static_cast<long double>(u);
        const long double direct = -std::log(b) / (1.0L - b);
        CHECK(std::abs(exit_rate_factor(1.0 - u) - static_cast<double>(direct)) <= 1e-12);
    }
    CHECK_THROWS_AS((void)exit_rate_factor(0.0), ReductionDomainError);
    CHECK_THROWS_AS((void)exit_rate_factor(1.5), ReductionDomainError);
}

TEST_CASE("reduced weights") {
    const double e = std::exp(-1.0);
    const auto b = WeightSchedule::discrete({mat({{e, 1 - e}, {1 - e, e}}), mat({{1, 0}, {0.5, 0.5}})});
    const auto r = reduce_discrete(b, DelaySchedule::none(2));
    const Matrix a0 = r.weights.evaluate(0.5);
    CHECK(a0(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a0(0, 0) == 0.0);
    const Matrix a1 = r.weights.evaluate(1.5);
    CHECK(a1(0, 1) == 0.0);
    CHECK(a1(1, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(r.weights.horizon() == 2.0);

    CHECK_THROWS_AS((void)reduce_discrete(WeightSchedule::discrete({mat({{0, 1}, {0.5, 0.5}})}),
                                          DelaySchedule::none(2)),
                    ReductionDomainError);
}

TEST_CASE("sawtooth delays") {
    const auto b = WeightSchedule::discrete({mat({{0.5, 0.5}, {0.5, 0.5}}), mat({{0.5, 0.5}, {0.5, 0.5}})});
    const auto r = reduce_discrete(b, DelaySchedule::constant(mat({{0, 2}, {1, 0}}), 2.0));
    CHECK(r.delays.kind() == DelayKind::sawtooth);
    CHECK(r.delays.bound() == doctest::Approx(3.0));
    CHECK(r.delays.delay(0, 1, 1.25) == doctest::Approx(2.25));
    CHECK(r.delays.frozen_argument(0, 1, 1.0, 1.5) == doctest::Approx(-1.0));
    CHECK(r.delays.frozen_argument(1, 0, 1.0, 1.5) == doctest::Approx(0.0));
}

TEST_CASE("exit-rate identity and boundedness") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto d = delaylab::testing::random_discrete(rng, 4, 20, 2);
        const auto r = reduce_discrete(d.weights, d.delays);
        const auto floor = check_strong_aperiodicity(d.weights, 0.2);
        REQUIRE(floor.ok);
        for (int k = 0; k < 20; ++k) {
            const Matrix bk = d.weights.evaluate(k);
            const Matrix ak = r.weights.evaluate(k + 0.5);
            for (int i = 0; i < 4; ++i) {
                CHECK(std::abs(ak.row(i).sum() + std::log(bk(i, i))) <= 1e-12);
                CHECK(ak.row(i).sum() <= -std::log(floor.floor) + 1e-12);
            }
        }
        CHECK(std::isfinite(compute_mu(r.weights, 3.0, 1.0)));
    }
}

TEST_CASE("reduction interpolates the discrete solution") {
    const auto lazy = WeightSchedule::discrete(std::vector<Matrix>(10, mat({{0.5, 0.5}, {0.5, 0.5}})));
    const Matrix w0[] = {column({0, 1})};
    CHECK(verify_reduction(lazy, DelaySchedule::none(2), w0, 0) == 0.0);
    CHECK(verify_reduction(lazy, DelaySchedule::none(2), w0, 10) <= 1e-12);

    const Matrix ring = mat({{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}});
    const auto r3 = WeightSchedule::discrete(std::vector<Matrix>(20, ring));
    const Matrix w1[] = {column({1, 0, -1}), column({0.5, 2, 0})};
    CHECK(verify_reduction(r3, DelaySchedule::uniform(3, 1.0), w1, 20) <= 1e-12);

    std::mt19937 rng(32);
    for (int trial = 0; trial < 5; ++trial) {
        const auto d = delaylab::testing::random_discrete(rng, 3 + trial % 3, 30, 3);
        CHECK(verify_reduction(d.weights, d.delays, d.window, 30) <= 1e-12);
    }
}

TEST_CASE("certificates transfer to the reduced schedule") {
    // Full off-diagonal support so both certificates exist.
    std::mt19937 rng(33);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<Matrix> steps;
    for (int k = 0; k < 40; ++k) {
        Matrix b(3, 3);
        for (int i = 0; i < 3; ++i) {
            double rest = 0.0;
            for (int j = 0; j < 3; ++j) rest += b(i, j) = j == i ? 0.0 : u(rng);
            const double diag = 0.3 + 0.6 * u(rng);
            b.row(i) *= (1.0 - diag) / rest;
            b(i, i) = diag;
        }
        steps.push_back(b);
    }
    const auto weights = WeightSchedule::discrete(std::move(steps));
    const struct {
        WeightSchedule weights;
        DelaySchedule delays;
    } d{weights, DelaySchedule::uniform(3, 1.0)};
    const auto r = reduce_discrete(d.weights, d.delays);
    const auto period = uniform_sequence(4.0, 40.0);
    const auto nits = check_nits(d.weights, period, 1e6);
    REQUIRE(nits.ok);
    CHECK(check_nits(r.weights, period, 1e6 * 2.0).ok);
    const auto search = find_aqsc_sequence(d.weights, 0.05);
    REQUIRE(search.ok());
    // The reduced weights dominate b_ij: -ln b / (1 - b) >= 1.
    auto cert = *search.certificate;
    cert.ell = interval_bound(r.weights, cert.sequence);
    CHECK(verify_certificate(r.weights, cert));
}

}  // TEST_SUITE
