#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "modeforest/kernels.hpp"
#include "modeforest/synthetic.hpp"
#include "modeforest/verify.hpp"

#include "test_support.hpp"

using namespace modeforest;

namespace {

const KernelShape all_shapes[] = {KernelShape::gaussian,    KernelShape::epanechnikov,
                                  KernelShape::uniform,     KernelShape::triangular,
                                  KernelShape::exponential, KernelShape::tricube,
                                  KernelShape::cosine,      KernelShape::silverman};

/// Composite Simpson of the radial integral of K over R^d; independent of
/// the adaptive quadrature used for the normalization constants.
double radial_integral(const Kernel& kernel, int d) {
    double upper = kernel.support_radius();
    if (!std::isfinite(upper)) upper = 50.0;
    const std::size_t intervals = 40000;  // even
    const double step = upper / intervals;
    double sum = 0.0;
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double t = static_cast<double>(i) * step;
        const double weight = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += weight * kernel.profile(t, d) * std::pow(t, d - 1);
    }
    const double surface = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
    return surface * sum * step / 3.0;
}

}  // namespace

TEST_CASE("kernel profiles are nonnegative and non-increasing") {
    for (const KernelShape shape : all_shapes) {
        const Kernel kernel(shape);
        double upper = kernel.support_radius();
        if (!std::isfinite(upper)) upper = 12.0;
        double previous = kernel.profile(0.0, 1);
        for (double t = 0.0; t <= upper + 1.0; t += 0.005) {
            const double value = kernel.profile(t, 1);
            INFO(to_string(shape) << " at t=" << t);
            REQUIRE(value >= 0.0);
            REQUIRE(value <= previous + 1e-15);
            previous = value;
        }
    }
}

TEST_CASE("kernels integrate to one in d=1 and d=2") {
    for (const KernelShape shape : all_shapes) {
        const Kernel kernel(shape);
        for (const int d : {1, 2}) {
            INFO(to_string(shape) << " d=" << d);
            REQUIRE(radial_integral(kernel, d) == Catch::Approx(1.0).margin(1e-6));
        }
    }
}

TEST_CASE("closed-form normalization constants") {
    CHECK(Kernel(KernelShape::gaussian).normalization(1) ==
          Catch::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(Kernel(KernelShape::uniform).normalization(1) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(Kernel(KernelShape::uniform).normalization(2) ==
          Catch::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(Kernel(KernelShape::epanechnikov).normalization(1) == Catch::Approx(0.75).epsilon(1e-14));
    CHECK(Kernel(KernelShape::epanechnikov).normalization(2) ==
          Catch::Approx(2.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(Kernel(KernelShape::cosine).normalization(1) ==
          Catch::Approx(std::numbers::pi / 4.0).epsilon(1e-10));
    CHECK(Kernel(KernelShape::tricube).normalization(1) ==
          Catch::Approx(70.0 / 81.0).epsilon(1e-10));
    CHECK(Kernel(KernelShape::triangular).normalization(1) == Catch::Approx(1.0).epsilon(1e-10));
    CHECK(Kernel(KernelShape::exponential).normalization(1) == Catch::Approx(0.5).epsilon(1e-10));
    // Main-lobe Silverman: 2 * integral of exp(-t/sqrt2) sin(t/sqrt2 + pi/4)
    // over the first lobe is 2 * (1 + exp(-3 pi / 4) / sqrt2).
    const double lobe = 1.0 + std::exp(-0.75 * std::numbers::pi) / std::numbers::sqrt2;
    CHECK(Kernel(KernelShape::silverman).normalization(1) ==
          Catch::Approx(1.0 / (2.0 * lobe)).epsilon(1e-10));
}

TEST_CASE("kde at a single sample's own location is k(0)") {
    const DensityModel model(Kernel(KernelShape::gaussian), 1.0, 1);
    const PointSet samples = PointSet::column({0.0});
    const auto values = kde_evaluate(model, samples, samples);
    REQUIRE(values.size() == 1);
    CHECK(values[0] == Catch::Approx(0.3989422804014327).epsilon(1e-12));
}

TEST_CASE("uniform kernel includes the support boundary") {
    const DensityModel model(Kernel(KernelShape::uniform), 1.0, 1);
    const PointSet samples = PointSet::column({-1.0, 1.0});
    const PointSet query = PointSet::column({0.0});
    const auto values = kde_evaluate(model, samples, query);
    CHECK(values[0] == Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("kde matches the naive oracle on random 2-D instances") {
    std::mt19937_64 gen(42);
    const PointSet samples = test_support::random_points(gen, 50, 2, 0.0, 1.0);
    const PointSet queries = test_support::random_points(gen, 10, 2, 0.0, 1.0);
    const DensityModel model(Kernel(KernelShape::epanechnikov), 0.3, 2);
    const auto fast = kde_evaluate(model, samples, queries);
    const auto slow = verify::naive_kde(model, samples, queries);
    for (std::size_t q = 0; q < fast.size(); ++q) {
        CHECK(std::abs(fast[q] - slow[q]) <= 1e-12);
    }
}

TEST_CASE("kde input validation") {
    const DensityModel model(Kernel(KernelShape::gaussian), 1.0, 2);
    const PointSet samples(std::vector<double>{0.0, 0.0}, 2);
    const PointSet wrong_dim = PointSet::column({0.0});
    CHECK_THROWS_AS(kde_evaluate(model, samples, wrong_dim), std::invalid_argument);
    CHECK_THROWS_AS(kde_evaluate(model, PointSet(std::vector<double>{}, 2), samples),
                    std::invalid_argument);
    CHECK_THROWS_AS(DensityModel(Kernel(KernelShape::gaussian), 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(DensityModel(Kernel(KernelShape::gaussian), -1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(DensityModel(Kernel(KernelShape::gaussian), 1.0, 0), std::invalid_argument);
}

TEST_CASE("self evaluation equals evaluation at the samples, with own-term lower bound") {
    const PointSet samples = PointSet::column({0.0, 10.0, 20.0});
    const DensityModel model(Kernel(KernelShape::gaussian), 0.5, 1);
    const auto self = kde_self_evaluate(model, samples);
    const auto direct = kde_evaluate(model, samples, samples);
    REQUIRE(self == direct);
    const double own_term = Kernel(KernelShape::gaussian).profile(0.0, 1) / (3.0 * 0.5);
    for (const double v : self) CHECK(v >= own_term);
}

TEST_CASE("moderate bandwidth beats oversmoothing against the true density") {
    const auto& normal = synthetic::catalog_density("standard-normal");
    const PointSet samples = normal.sample(200, 1);
    std::vector<double> grid_values;
    for (double x = -2.0; x <= 2.0 + 1e-9; x += 0.05) grid_values.push_back(x);
    const PointSet grid = PointSet::column(grid_values);

    auto mad = [&](double h) {
        const DensityModel model(Kernel(KernelShape::gaussian), h, 1);
        const auto est = kde_evaluate(model, samples, grid);
        double total = 0.0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            total += std::abs(est[g] - normal(grid[g][0]));
        }
        return total / static_cast<double>(grid.size());
    };
    CHECK(mad(0.4) < mad(5.0));
}

TEST_CASE("kde integrates to one along a 1-D grid") {
    const PointSet samples = PointSet::column({-0.3, 0.4, 2.0});
    for (const KernelShape shape : all_shapes) {
        const double h = 0.7;
        const DensityModel model(Kernel(shape), h, 1);
        // The uniform kernel's KDE is piecewise constant; trapezoid needs a
        // much finer grid there to hit 1e-3.
        const double step = shape == KernelShape::uniform ? h / 2000.0 : h / 50.0;
        const double lo = -0.3 - 10.0 * h;
        const double hi = 2.0 + 10.0 * h;
        std::vector<double> xs;
        for (double x = lo; x <= hi; x += step) xs.push_back(x);
        const auto values = kde_evaluate(model, samples, PointSet::column(xs));
        double integral = 0.0;
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            integral += 0.5 * (values[i] + values[i + 1]) * step;
        }
        INFO(to_string(shape));
        CHECK(integral == Catch::Approx(1.0).margin(1e-3));
    }
}

TEST_CASE("sup-norm error over a grid shrinks with n") {
    const auto& mixture = synthetic::catalog_density("two-gaussian-10sep");
    std::vector<double> xs;
    for (double x = -2.0; x <= 12.0 + 1e-9; x += 0.05) xs.push_back(x);
    const PointSet grid = PointSet::column(xs);

    auto sup_error = [&](std::size_t n, std::uint64_t seed) {
        const double h = std::pow(static_cast<double>(n), -0.2);
        const DensityModel model(Kernel(KernelShape::gaussian), h, 1);
        const auto est = kde_evaluate(model, mixture.sample(n, seed), grid);
        double sup = 0.0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            sup = std::max(sup, std::abs(est[g] - mixture(grid[g][0])));
        }
        return sup;
    };

    std::vector<double> small, large;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        small.push_back(sup_error(500, seed));
        large.push_back(sup_error(8000, seed));
    }
    std::sort(small.begin(), small.end());
    std::sort(large.begin(), large.end());
    CHECK(large[2] < small[2]);
}

TEST_CASE("truncated kde stays within the documented additive bound") {
    std::mt19937_64 gen(7);
    const PointSet samples = test_support::random_points(gen, 100, 1, 0.0, 4.0);
    const PointSet queries = test_support::random_points(gen, 20, 1, 0.0, 4.0);
    const double h = 0.25;
    const double radius = 2.0;
    const DensityModel model(Kernel(KernelShape::gaussian), h, 1);
    const auto exact = kde_evaluate(model, samples, queries);
    const auto truncated = kde_evaluate_truncated(model, samples, queries, radius);
    const double per_omitted = model.kernel.profile(radius, 1) / (samples.size() * h);
    for (std::size_t q = 0; q < queries.size(); ++q) {
        std::size_t omitted = 0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (std::abs(queries[q][0] - samples[i][0]) / h > radius) ++omitted;
        }
        CHECK(exact[q] >= truncated[q]);
        CHECK(exact[q] - truncated[q] <= static_cast<double>(omitted) * per_omitted + 1e-15);
    }

    // Truncation at the support radius is exact for compact kernels.
    const DensityModel compact(Kernel(KernelShape::epanechnikov), h, 1);
    CHECK(kde_evaluate_truncated(compact, samples, queries, 1.0) ==
          kde_evaluate(compact, samples, queries));
}

TEST_CASE("recommended bandwidth schedule") {
    CHECK(recommended_bandwidth(1024, 1) == Catch::Approx(0.25).epsilon(1e-12));
    CHECK(recommended_bandwidth(1, 1) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(recommended_bandwidth(1, 7) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(recommended_bandwidth(1000000, 2, 2.0) == Catch::Approx(0.2).epsilon(1e-12));
    CHECK_THROWS_AS(recommended_bandwidth(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(recommended_bandwidth(10, 1, 0.0), std::invalid_argument);
}

TEST_CASE("kde results do not depend on the thread count") {
    std::mt19937_64 gen(11);
    const PointSet samples = test_support::random_points(gen, 400, 2);
    const PointSet queries = test_support::random_points(gen, 333, 2);
    const DensityModel model(Kernel(KernelShape::gaussian), 0.8, 2);

    setenv("MODEFOREST_THREADS", "1", 1);
    const auto single = kde_evaluate(model, samples, queries);
    setenv("MODEFOREST_THREADS", "4", 1);
    const auto quad = kde_evaluate(model, samples, queries);
    unsetenv("MODEFOREST_THREADS");
    CHECK(single == quad);
}

TEST_CASE("kernel shape names round-trip") {
    for (const KernelShape shape : all_shapes) {
        CHECK(kernel_shape_from_string(to_string(shape)) == shape);
    }
    CHECK_THROWS_AS(kernel_shape_from_string("box"), std::invalid_argument);
}
