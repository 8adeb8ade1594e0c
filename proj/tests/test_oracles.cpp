#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "modeforest/cluster_tree.hpp"
#include "modeforest/quickshift.hpp"
#include "modeforest/verify.hpp"

#include "test_support.hpp"

using namespace modeforest;

TEST_CASE("naive kde mirrors the definition examples") {
    const DensityModel gaussian(Kernel(KernelShape::gaussian), 1.0, 1);
    const PointSet origin = PointSet::column({0.0});
    CHECK(verify::naive_kde(gaussian, origin, origin)[0] ==
          Catch::Approx(0.3989422804014327).epsilon(1e-12));

    const DensityModel uniform(Kernel(KernelShape::uniform), 1.0, 1);
    const PointSet pair = PointSet::column({-1.0, 1.0});
    CHECK(verify::naive_kde(uniform, pair, PointSet::column({0.0}))[0] ==
          Catch::Approx(0.5).epsilon(1e-14));

    CHECK_THROWS_AS(verify::naive_kde(gaussian, PointSet(std::vector<double>{}, 1), origin),
                    std::invalid_argument);
}

TEST_CASE("naive parent replays the forest examples pointwise") {
    const PointSet samples = PointSet::column({0.0, 1.0, 3.0});
    const std::vector<double> density{0.5, 0.9, 0.7};
    CHECK(verify::naive_parent(samples, density, 1.5, 0) == std::optional<std::size_t>{1});
    CHECK_FALSE(verify::naive_parent(samples, density, 1.5, 1).has_value());
    CHECK_FALSE(verify::naive_parent(samples, density, 1.5, 2).has_value());
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(verify::naive_parent(samples, density, inf, 2) == std::optional<std::size_t>{1});
    // The global density argmax never has a parent.
    CHECK_FALSE(verify::naive_parent(samples, density, inf, 1).has_value());
}

TEST_CASE("naive components handles the empty input") {
    const PointSet points = PointSet::column({1.0, 2.0});
    CHECK(verify::naive_components(points, {}, 1.0).empty());
}

TEST_CASE("randomized differential agreement across all oracle pairs") {
    std::mt19937_64 gen(1234);
    for (int instance = 0; instance < 30; ++instance) {
        const std::size_t n = 1 + gen() % 100;
        const std::size_t d = 1 + gen() % 3;
        const PointSet samples = test_support::random_points(gen, n, d);
        const PointSet queries = test_support::random_points(gen, 1 + gen() % 20, d);
        const double h = 0.3 + 1.5 * test_support::uniform01(gen);
        const DensityModel model(Kernel(KernelShape::gaussian), h, static_cast<int>(d));

        const auto fast = kde_evaluate(model, samples, queries);
        const auto slow = verify::naive_kde(model, samples, queries);
        for (std::size_t q = 0; q < fast.size(); ++q) {
            REQUIRE(std::abs(fast[q] - slow[q]) <= 1e-12);
        }

        const auto density = kde_self_evaluate(model, samples);
        const double tau = 0.5 + 2.0 * test_support::uniform01(gen);
        const auto forest = build_forest(samples, density, tau);
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(forest.parent(i) == verify::naive_parent(samples, density, tau, i));
        }
        REQUIRE(assignments(forest) == verify::naive_assignments(forest));
    }
}
