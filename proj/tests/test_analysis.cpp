#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "modeforest/analysis.hpp"
#include "modeforest/synthetic.hpp"

#include "test_support.hpp"

using namespace modeforest;

TEST_CASE("hausdorff on small explicit sets") {
    CHECK(hausdorff({0.0}, {3.0}) == Catch::Approx(3.0));
    CHECK(hausdorff({0.5, 2.0}, {0.5, 2.0}) == 0.0);
    CHECK(hausdorff({0.0, 1.0}, {0.0, 4.0}) == Catch::Approx(3.0));
    CHECK_THROWS_AS(hausdorff(std::vector<double>{}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(hausdorff(PointSet(std::vector<double>{0.0}, 1),
                              PointSet(std::vector<double>{0.0, 0.0}, 2)),
                    std::invalid_argument);
}

TEST_CASE("hausdorff behaves as a metric on random finite sets") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 1 + gen() % 3;
        const auto a = test_support::random_points(gen, 1 + gen() % 8, d);
        const auto b = test_support::random_points(gen, 1 + gen() % 8, d);
        const auto c = test_support::random_points(gen, 1 + gen() % 8, d);
        const double ab = hausdorff(a, b);
        const double ba = hausdorff(b, a);
        const double ac = hausdorff(a, c);
        const double bc = hausdorff(b, c);
        CHECK(ab == ba);
        CHECK(ab >= 0.0);
        CHECK(hausdorff(a, a) == 0.0);
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("mode matching is greedy by distance with one-to-one pairing") {
    SECTION("both modes matched") {
        const auto report = match_modes(PointSet::column({0.05, 9.9}),
                                        PointSet::column({0.0, 10.0}), 0.5);
        CHECK(report.pairs.size() == 2);
        CHECK(report.unmatched_estimated.empty());
        CHECK(report.unmatched_truth.empty());
    }
    SECTION("missing estimate leaves a truth mode unmatched") {
        const auto report =
            match_modes(PointSet::column({0.05}), PointSet::column({0.0, 10.0}), 0.5);
        CHECK(report.pairs.size() == 1);
        CHECK(report.unmatched_truth == std::vector<std::size_t>{1});
    }
    SECTION("nearest estimate wins, the other goes unmatched") {
        const auto report =
            match_modes(PointSet::column({0.2, 0.3}), PointSet::column({0.0}), 0.5);
        REQUIRE(report.pairs.size() == 1);
        CHECK(report.pairs[0] == std::make_pair(std::size_t{0}, std::size_t{0}));
        CHECK(report.unmatched_estimated == std::vector<std::size_t>{1});
    }
    SECTION("radius bounds matching") {
        const auto report = match_modes(PointSet::column({5.0}), PointSet::column({0.0}), 0.5);
        CHECK(report.pairs.empty());
        CHECK(report.unmatched_estimated.size() == 1);
        CHECK(report.unmatched_truth.size() == 1);
    }
}

TEST_CASE("separation certification on the two-gaussian valley") {
    const auto& mixture = synthetic::catalog_density("two-gaussian-10sep");
    const auto density = [&](double x) { return mixture(x); };
    const double lipschitz = mixture.lipschitz_bound();

    SECTION("a delta below the valley gap certifies") {
        const auto cert =
            certify_separation_1d(density, lipschitz, 0.0, 10.0, {5.0}, 1.0, 0.025, 1e-3);
        CHECK(cert.valid);
        CHECK(cert.sup_over_separator < 1e-10);
        CHECK(cert.inf_over_endpoints == Catch::Approx(mixture(1.0)).epsilon(1e-3));
    }
    SECTION("delta of 0.4 * f(0) exceeds the endpoint-ball infimum and fails") {
        // The infimum over B(0,1) is f(1) ~ 0.054, far below 0.4 * f(0) ~ 0.16.
        const double delta = 0.4 * mixture(0.0);
        const auto cert =
            certify_separation_1d(density, lipschitz, 0.0, 10.0, {5.0}, 1.0, delta, 1e-3);
        CHECK_FALSE(cert.valid);
    }
    SECTION("delta larger than the full density range fails") {
        const double delta = 2.0 * mixture(0.0);
        CHECK_FALSE(certify_separation_1d(density, lipschitz, 0.0, 10.0, {5.0}, 1.0, delta, 1e-3)
                        .valid);
    }
    SECTION("separator outside the open interval is rejected with a reason") {
        const auto cert =
            certify_separation_1d(density, lipschitz, 0.0, 10.0, {12.0}, 1.0, 0.01, 1e-3);
        CHECK_FALSE(cert.valid);
        CHECK(cert.reason.find("interval") != std::string::npos);
    }
}

TEST_CASE("flat densities cannot be certified for any positive delta") {
    const auto& plateau = synthetic::catalog_density("near-flat-plateau");
    const auto density = [&](double x) { return plateau(x); };
    const auto cert = certify_separation_1d(density, plateau.lipschitz_bound(), 0.5, 3.5, {2.0},
                                            0.4, 1e-3, 1e-3);
    CHECK_FALSE(cert.valid);
    // sup over the thickened separator and inf over the endpoint balls are
    // nearly equal on the plateau.
    CHECK(cert.sup_over_separator >= cert.inf_over_endpoints - 0.01);
}

TEST_CASE("certification input validation") {
    const auto density = [](double) { return 1.0; };
    CHECK_THROWS_AS(certify_separation_1d(density, 1.0, 0.0, 1.0, {}, 0.5, 0.1, 1e-3),
                    std::invalid_argument);
    CHECK_THROWS_AS(certify_separation_1d(density, 1.0, 0.0, 1.0, {0.5}, -1.0, 0.1, 1e-3),
                    std::invalid_argument);
    CHECK_THROWS_AS(certify_separation_1d(density, 1.0, 0.0, 1.0, {0.5}, 0.5, 0.0, 1e-3),
                    std::invalid_argument);
}
