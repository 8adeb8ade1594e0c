#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "modeforest/analysis.hpp"
#include "modeforest/cluster_tree.hpp"
#include "modeforest/kernels.hpp"
#include "modeforest/modal_regression.hpp"
#include "modeforest/quickshift.hpp"
#include "modeforest/synthetic.hpp"
#include "modeforest/verify.hpp"

// Desk-scale statistical acceptance experiments. Every tolerance, seed
// count, and parameter schedule is pinned here; the CLI bench command and
// the acceptance test binary both run this suite.
namespace modeforest::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    std::size_t seeds = 20;   // seed count for the 20-seed experiments
    std::string cli_path;     // path to the CLI binary (criterion 9)
};

namespace detail {

using clock = std::chrono::steady_clock;

inline double elapsed_seconds(clock::time_point start) {
    return std::chrono::duration<double>(clock::now() - start).count();
}

inline double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

inline std::size_t required_count(double fraction, std::size_t seeds) {
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(seeds)));
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

/// Bisection for f(x) = level on [a, b] with f(a), f(b) on opposite sides.
inline double crossing(const synthetic::MixtureDensity& m, double a, double b, double level) {
    double fa = m(a) - level;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (a + b);
        const double fm = m(mid) - level;
        if ((fa <= 0.0) == (fm <= 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

inline std::size_t nearest_sample(const PointSet& samples, double x) {
    std::size_t best = 0;
    double best_dist = std::abs(samples[0][0] - x);
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double d = std::abs(samples[i][0] - x);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

/// Component id per sample (-1 when absent from the level).
inline std::vector<std::ptrdiff_t> component_ids(const LevelComponents& lc, std::size_t n) {
    std::vector<std::ptrdiff_t> id(n, -1);
    for (std::size_t c = 0; c < lc.components.size(); ++c) {
        for (const std::size_t i : lc.components[c]) id[i] = static_cast<std::ptrdiff_t>(c);
    }
    return id;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Criteria 1 + 2: randomized differential testing against the brute-force
// oracles, plus structural forest invariants, on the same instances.
// ---------------------------------------------------------------------------

inline std::pair<CriterionResult, CriterionResult> run_oracle_equivalence() {
    const auto start = detail::clock::now();
    CriterionResult c1{1, "oracle equivalence (kde, forest, link)", true, "", 0.0};
    CriterionResult c2{2, "forest invariants on the same instances", true, "", 0.0};

    constexpr std::size_t instances = 220;
    constexpr std::uint64_t master_seed = 20240901;
    std::mt19937_64 gen(master_seed);
    const KernelShape shapes[] = {KernelShape::gaussian, KernelShape::epanechnikov,
                                  KernelShape::uniform,  KernelShape::triangular,
                                  KernelShape::exponential, KernelShape::tricube,
                                  KernelShape::cosine,   KernelShape::silverman};
    const double taus[] = {0.3, 1.0, 3.0, std::numeric_limits<double>::infinity()};

    std::size_t worst_instance = instances;
    for (std::size_t inst = 0; inst < instances && c1.pass && c2.pass; ++inst) {
        const std::size_t n = 1 + gen() % 300;
        const int d = 1 + static_cast<int>(gen() % 3);
        const double h = 0.2 + 1.8 * synthetic::detail::uniform01(gen);
        const double tau = taus[gen() % 4];
        const Kernel kernel(shapes[inst % 8]);
        const DensityModel model(kernel, h, d);

        auto random_points = [&](std::size_t count) {
            std::vector<double> data(count * d);
            for (auto& v : data) v = 10.0 * synthetic::detail::uniform01(gen);
            return PointSet(std::move(data), d);
        };
        const PointSet samples = random_points(n);
        const PointSet queries = random_points(1 + gen() % 50);

        const auto fast = kde_evaluate(model, samples, queries);
        const auto slow = verify::naive_kde(model, samples, queries);
        for (std::size_t q = 0; q < fast.size(); ++q) {
            if (std::abs(fast[q] - slow[q]) > 1e-12) {
                c1.pass = false;
                c1.detail = "kde mismatch (instance " + std::to_string(inst) + ")";
                break;
            }
        }
        const auto self_a = kde_self_evaluate(model, samples);
        const auto self_b = kde_evaluate(model, samples, samples);
        if (self_a != self_b) {
            c1.pass = false;
            c1.detail = "kde_self_evaluate differs from kde_evaluate";
        }

        const auto density = self_a;
        const auto forest = build_forest_bruteforce(samples, density, tau);
        const auto forest_grid = build_forest_grid(samples, density, tau);
        if (!(forest == forest_grid)) {
            c1.pass = false;
            c1.detail = "grid index path differs from brute force (instance " +
                        std::to_string(inst) + ")";
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (forest.parent(i) != verify::naive_parent(samples, density, tau, i)) {
                c1.pass = false;
                c1.detail = "forest parent mismatch (instance " + std::to_string(inst) + ")";
                break;
            }
        }

        // Random disjoint partition of a subset for the link check.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), gen);
        const std::size_t used = 1 + gen() % n;
        const std::size_t groups = 1 + gen() % used;
        std::vector<std::vector<std::size_t>> sets(groups);
        for (std::size_t k = 0; k < used; ++k) sets[k % groups].push_back(order[k]);
        const double delta = 0.3 + 2.7 * synthetic::detail::uniform01(gen);
        if (link(sets, samples, delta) != verify::naive_components(samples, sets, delta)) {
            c1.pass = false;
            c1.detail = "link mismatch (instance " + std::to_string(inst) + ")";
        }

        const std::string violation = verify::check_forest_invariants(forest, samples, density);
        if (!violation.empty()) {
            c2.pass = false;
            c2.detail = violation + " (instance " + std::to_string(inst) + ")";
        }
        if (assignments(forest) != verify::naive_assignments(forest)) {
            c2.pass = false;
            c2.detail = "assignments mismatch (instance " + std::to_string(inst) + ")";
        }
        if (!c1.pass || !c2.pass) worst_instance = inst;
    }

    c1.seconds = detail::elapsed_seconds(start);
    if (c1.pass) {
        c1.detail = std::to_string(instances) + " instances, master seed " +
                    std::to_string(master_seed) + ", max |kde diff| <= 1e-12, graphs identical";
    } else if (worst_instance != instances) {
        c1.detail += ", master seed " + std::to_string(master_seed);
    }
    if (c1.seconds >= 120.0) {
        c1.pass = false;
        c1.detail += " [runtime budget 120 s exceeded]";
    }
    if (c2.pass) c2.detail = "strict density increase, edge <= tau, nearest-higher tie rule, roots";
    c2.seconds = 0.0;  // measured jointly with criterion 1
    return {c1, c2};
}

// ---------------------------------------------------------------------------
// Criterion 3: mode recovery on two-gaussian-10sep.
// ---------------------------------------------------------------------------

inline CriterionResult run_mode_recovery(const Options& options) {
    const auto start = detail::clock::now();
    CriterionResult r{3, "mode recovery (two-gaussian-10sep)", false, "", 0.0};
    const auto& mixture = synthetic::catalog_density("two-gaussian-10sep");
    const std::vector<double> box_lo{-3.0}, box_hi{13.0};
    const PointSet truth = mixture.true_modes(box_lo, box_hi, 0.25);

    const std::size_t seeds = options.seeds;
    auto run_n = [&](std::size_t n) {
        std::vector<double> errors;
        std::size_t good = 0;
        for (std::size_t s = 1; s <= seeds; ++s) {
            const PointSet samples = mixture.sample(n, s);
            const double h = std::pow(static_cast<double>(n), -0.2);
            const DensityModel model(Kernel(KernelShape::gaussian), h, 1);
            const auto forest = quickshift(samples, model, 1.0);
            const ModeSet found = modes(forest, samples);
            const double err = hausdorff(found.coordinates, truth);
            errors.push_back(err);
            if (found.indices.size() == 2 && err < 0.25) ++good;
        }
        return std::make_pair(good, errors);
    };

    const auto [good4000, err4000] = run_n(4000);
    const auto [good1000, err1000] = run_n(1000);
    const auto [good16000, err16000] = run_n(16000);
    (void)good1000;
    (void)good16000;

    const std::size_t need = detail::required_count(0.9, seeds);
    const double med1000 = detail::median(err1000);
    const double med16000 = detail::median(err16000);
    const bool rate_ok = med16000 < 0.7 * med1000;
    r.pass = good4000 >= need && rate_ok;
    r.detail = "n=4000: |M|=2 and d_H<0.25 in " + std::to_string(good4000) + "/" +
               std::to_string(seeds) + " seeds (need " + std::to_string(need) +
               "); median d_H " + detail::fmt(med16000) + " (n=16000) vs " +
               detail::fmt(med1000) + " (n=1000), ratio " + detail::fmt(med16000 / med1000) +
               " < 0.7";
    r.seconds = detail::elapsed_seconds(start);
    if (r.seconds >= 300.0) {
        r.pass = false;
        r.detail += " [runtime budget 300 s exceeded]";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 4: tau segmentation on the dominant-bump mixture.
// ---------------------------------------------------------------------------

inline CriterionResult run_segmentation(const Options& options) {
    const auto start = detail::clock::now();
    CriterionResult r{4, "tau segmentation (dominant-bump)", false, "", 0.0};
    const auto& mixture = synthetic::catalog_density("dominant-bump");
    const std::size_t seeds = options.seeds;
    constexpr std::size_t n = 4000;
    const double h = std::pow(static_cast<double>(n), -0.2);

    std::size_t two_at_small_tau = 0;
    std::size_t one_at_large_tau = 0;
    for (std::size_t s = 1; s <= seeds; ++s) {
        const PointSet samples = mixture.sample(n, s);
        const DensityModel model(Kernel(KernelShape::gaussian), h, 1);
        const auto density = kde_self_evaluate(model, samples);
        if (build_forest(samples, density, 0.5).roots().size() == 2) ++two_at_small_tau;
        if (build_forest(samples, density, 2.5).roots().size() == 1) ++one_at_large_tau;
    }

    const std::size_t need = detail::required_count(0.8, seeds);
    r.pass = two_at_small_tau >= need && one_at_large_tau >= need;
    r.detail = "tau=0.5 gave 2 roots in " + std::to_string(two_at_small_tau) + "/" +
               std::to_string(seeds) + ", tau=2.5 gave 1 root in " +
               std::to_string(one_at_large_tau) + "/" + std::to_string(seeds) + " (need " +
               std::to_string(need) + " each)";
    r.seconds = detail::elapsed_seconds(start);
    if (r.seconds >= 180.0) {
        r.pass = false;
        r.detail += " [runtime budget 180 s exceeded]";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 5: certified separation implies no directed path.
// ---------------------------------------------------------------------------

inline CriterionResult run_separation(const Options& options) {
    const auto start = detail::clock::now();
    CriterionResult r{5, "separation: certified valley admits no directed path", false, "", 0.0};
    const auto& mixture = synthetic::catalog_density("two-gaussian-10sep");

    const double delta = 0.025;  // about half the analytic valley gap
    const auto cert = certify_separation_1d([&](double x) { return mixture(x); },
                                            mixture.lipschitz_bound(), 0.0, 10.0, {5.0}, 1.0,
                                            delta, 1e-3);
    if (!cert.valid) {
        r.detail = "separation certificate unexpectedly invalid: " + cert.reason;
        r.seconds = detail::elapsed_seconds(start);
        return r;
    }

    const std::size_t seeds = options.seeds;
    constexpr std::size_t n = 400;
    const double tau = 0.45;  // below r_s / 2
    std::size_t clean_seeds = 0;
    std::size_t total_violations = 0;
    for (std::size_t s = 1; s <= seeds; ++s) {
        const PointSet samples = mixture.sample(n, s);
        const DensityModel model(Kernel(KernelShape::gaussian), 0.5, 1);
        const auto forest = quickshift(samples, model, tau);
        // A directed path from a left-side sample to any right-side sample
        // exists iff the chain from the left sample crosses x > 7 (and vice
        // versa), since chains are unique.
        std::size_t violations = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = samples[i][0];
            const bool left = x < 3.0;
            const bool right = x > 7.0;
            if (!left && !right) continue;
            std::size_t cur = i;
            while (!forest.is_root(cur)) {
                cur = *forest.parent(cur);
                const double cx = samples[cur][0];
                if ((left && cx > 7.0) || (right && cx < 3.0)) {
                    ++violations;
                    break;
                }
            }
        }
        if (violations == 0) ++clean_seeds;
        total_violations += violations;
    }

    r.pass = clean_seeds == seeds;
    r.detail = "certificate valid (sup " + detail::fmt(cert.sup_over_separator) + " inf " +
               detail::fmt(cert.inf_over_endpoints) + ", delta " + detail::fmt(delta) +
               "); clean seeds " + std::to_string(clean_seeds) + "/" + std::to_string(seeds) +
               ", violating paths " + std::to_string(total_violations);
    r.seconds = detail::elapsed_seconds(start);
    if (r.seconds >= 120.0) {
        r.pass = false;
        r.detail += " [runtime budget 120 s exceeded]";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 6: cluster-tree minimality / separation / merge height on the
// trimodal mixture.
// ---------------------------------------------------------------------------

inline CriterionResult run_cluster_tree(const Options& options) {
    const auto start = detail::clock::now();
    CriterionResult r{6, "cluster tree (trimodal): minimality, separation, merge height", false,
                      "", 0.0};
    const auto& mixture = synthetic::catalog_density("trimodal");

    const std::vector<double> box_lo{-4.0}, box_hi{14.0};
    const PointSet truth = mixture.true_modes(box_lo, box_hi, 0.25);
    if (truth.size() != 3) {
        r.detail = "expected 3 analytic modes, found " + std::to_string(truth.size());
        r.seconds = detail::elapsed_seconds(start);
        return r;
    }
    const double m0 = truth[0][0], m1 = truth[1][0], m2 = truth[2][0];
    double peak = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) peak = std::max(peak, mixture(truth[i][0]));
    const double saddle = mixture.saddle_level_1d(m0 + 0.5, m1 - 0.5);
    const double lambda = 0.6 * peak;

    // True level-set component intervals around each mode at level lambda.
    struct Interval {
        double lo, hi;
        bool contains(double x) const { return x >= lo && x <= hi; }
    };
    auto interval_of = [&](double mode, double left_limit, double right_limit) {
        return Interval{detail::crossing(mixture, left_limit, mode, lambda),
                        detail::crossing(mixture, mode, right_limit, lambda)};
    };
    const Interval iv0 = interval_of(m0, m0 - 6.0, 0.5 * (m0 + m1));
    const Interval iv1 = interval_of(m1, 0.5 * (m0 + m1), 0.5 * (m1 + m2));
    const Interval iv2 = interval_of(m2, 0.5 * (m1 + m2), m2 + 6.0);

    const std::size_t seeds = options.seeds;
    std::size_t minimality_ok = 0;
    std::size_t separation_ok = 0;
    {
        constexpr std::size_t n = 4000;
        // Bandwidth scale 0.7: the saddle sits at ~15% of the peak, so the
        // separation margin of 0.15 * saddle tolerates little smoothing bias.
        const double h = 0.7 * std::pow(static_cast<double>(n), -0.2);
        const double tau = recommended_tau(n, 1, 1.0);
        for (std::size_t s = 1; s <= seeds; ++s) {
            const PointSet samples = mixture.sample(n, s);
            const DensityModel model(Kernel(KernelShape::gaussian), h, 1);
            const auto forest = quickshift(samples, model, tau);

            // Minimality: the surviving samples of each true component stay
            // in one estimated component at level lambda - eps.
            const double eps = 0.1 * lambda;
            const auto low_level = estimated_components(forest, samples, lambda - eps, tau);
            const auto low_ids = detail::component_ids(low_level, n);
            bool no_split = true;
            for (const Interval& iv : {iv0, iv1, iv2}) {
                std::ptrdiff_t seen = -1;
                std::size_t inside = 0, surviving = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (!iv.contains(samples[i][0])) continue;
                    ++inside;
                    if (low_ids[i] < 0) continue;
                    ++surviving;
                    if (seen == -1) seen = low_ids[i];
                    else if (low_ids[i] != seen) no_split = false;
                }
                if (inside == 0 || surviving * 2 < inside) no_split = false;
            }
            if (no_split) ++minimality_ok;

            // Separation: components that merge at the saddle stay apart at
            // saddle * 1.15.
            const auto high_level = estimated_components(forest, samples, 1.15 * saddle, tau);
            const auto high_ids = detail::component_ids(high_level, n);
            bool apart = true;
            std::size_t in_a = 0, in_b = 0;
            std::ptrdiff_t seen_a = -1;
            for (std::size_t i = 0; i < n; ++i) {
                if (high_ids[i] < 0) continue;
                if (iv0.contains(samples[i][0])) {
                    ++in_a;
                    seen_a = high_ids[i];
                }
            }
            for (std::size_t i = 0; i < n && apart; ++i) {
                if (high_ids[i] < 0 || !iv1.contains(samples[i][0])) continue;
                ++in_b;
                for (std::size_t j = 0; j < n; ++j) {
                    if (high_ids[j] >= 0 && iv0.contains(samples[j][0]) &&
                        high_ids[j] == high_ids[i]) {
                        apart = false;
                        break;
                    }
                }
            }
            (void)seen_a;
            if (apart && in_a > 0 && in_b > 0) ++separation_ok;
        }
    }

    // Merge height against the analytic saddle. The linking radius is scaled
    // up: below n ~ 2000 the unscaled schedule drops under the largest valley
    // sample gap and the components would never link at any level.
    const std::size_t merge_seeds = std::max<std::size_t>(1, seeds / 2);
    auto merge_errors = [&](std::size_t n) {
        std::vector<double> errors;
        const double h = 0.95 * std::pow(static_cast<double>(n), -0.2);
        const double tau = recommended_tau(n, 1, 1.6);
        for (std::size_t s = 1; s <= merge_seeds; ++s) {
            const PointSet samples = mixture.sample(n, s);
            const DensityModel model(Kernel(KernelShape::gaussian), h, 1);
            const auto tree = cluster_tree(samples, model, tau);
            const std::size_t i = detail::nearest_sample(samples, m0);
            const std::size_t j = detail::nearest_sample(samples, m1);
            const double mh = tree.merge_height(i, j);
            errors.push_back(std::abs(mh - saddle) / saddle);
        }
        return errors;
    };
    const double med500 = detail::median(merge_errors(500));
    const double med4000 = detail::median(merge_errors(4000));
    const double med8000 = detail::median(merge_errors(8000));

    const std::size_t need = detail::required_count(0.9, seeds);
    const bool merge_ok = med4000 <= 0.25 && med8000 < med500;
    r.pass = minimality_ok >= need && separation_ok >= need && merge_ok;
    r.detail = "minimality " + std::to_string(minimality_ok) + "/" + std::to_string(seeds) +
               ", separation " + std::to_string(separation_ok) + "/" + std::to_string(seeds) +
               " (need " + std::to_string(need) + "); merge-height rel err median " +
               detail::fmt(med4000) + " @4000 (<=0.25), " + detail::fmt(med500) + " @500 -> " +
               detail::fmt(med8000) + " @8000 (shrinks)";
    r.seconds = detail::elapsed_seconds(start);
    if (r.seconds >= 300.0) {
        r.pass = false;
        r.detail += " [runtime budget 300 s exceeded]";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 7: modal regression on the bimodal conditional.
// ---------------------------------------------------------------------------

inline CriterionResult run_modal_regression(const Options& options) {
    const auto start = detail::clock::now();
    CriterionResult r{7, "modal regression (bimodal-conditional)", false, "", 0.0};
    const auto& mixture = synthetic::catalog_density("bimodal-conditional");
    const std::vector<double> truth{-2.0, 2.0};
    const std::vector<double> query_xs{-0.5, 0.0, 0.5};
    const double tau = 0.5;

    auto run_n = [&](std::size_t n, std::size_t seeds) {
        const double h = std::pow(static_cast<double>(n), -1.0 / 6.0);
        const DensityModel model(Kernel(KernelShape::gaussian), h, 2);
        std::size_t good = 0;
        std::vector<double> mean_errors;
        for (std::size_t s = 1; s <= seeds; ++s) {
            const PointSet data = mixture.sample(n, s);
            bool all_good = true;
            double total = 0.0;
            for (const double qx : query_xs) {
                const auto result = modal_regression(data, model, tau, {&qx, 1});
                const double err = result.mode_estimates.empty()
                                       ? std::numeric_limits<double>::infinity()
                                       : hausdorff(result.mode_estimates, truth);
                total += err;
                if (!(err < 0.3)) all_good = false;
            }
            if (all_good) ++good;
            mean_errors.push_back(total / static_cast<double>(query_xs.size()));
        }
        return std::make_pair(good, mean_errors);
    };

    const std::size_t seeds = options.seeds;
    const auto [good6000, err6000] = run_n(6000, seeds);
    (void)err6000;
    const std::size_t trend_seeds = std::max<std::size_t>(1, seeds / 2);
    const auto [g1, err1000] = run_n(1000, trend_seeds);
    const auto [g2, err8000] = run_n(8000, trend_seeds);
    (void)g1;
    (void)g2;

    const std::size_t need = detail::required_count(0.8, seeds);
    const double med1000 = detail::median(err1000);
    const double med8000 = detail::median(err8000);
    r.pass = good6000 >= need && med8000 < med1000;
    r.detail = "per-query d_H < 0.3 for all queries in " + std::to_string(good6000) + "/" +
               std::to_string(seeds) + " seeds (need " + std::to_string(need) +
               "); median error " + detail::fmt(med1000) + " @1000 -> " + detail::fmt(med8000) +
               " @8000";
    r.seconds = detail::elapsed_seconds(start);
    if (r.seconds >= 300.0) {
        r.pass = false;
        r.detail += " [runtime budget 300 s exceeded]";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 8: KDE sup-norm error trend.
// ---------------------------------------------------------------------------

inline CriterionResult run_supnorm_trend(const Options& options) {
    const auto start = detail::clock::now();
    CriterionResult r{8, "kde sup-norm error shrinks with n", false, "", 0.0};
    const auto& mixture = synthetic::catalog_density("two-gaussian-10sep");

    std::vector<double> grid_points;
    for (double x = -2.5; x <= 12.5 + 1e-9; x += 0.05) grid_points.push_back(x);
    const PointSet grid = PointSet::column(grid_points);
    std::vector<double> truth(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) truth[g] = mixture(grid[g][0]);

    auto sup_errors = [&](std::size_t n) {
        std::vector<double> sups;
        const double h = std::pow(static_cast<double>(n), -0.2);
        const DensityModel model(Kernel(KernelShape::gaussian), h, 1);
        for (std::size_t s = 1; s <= options.seeds; ++s) {
            const PointSet samples = mixture.sample(n, s);
            const auto estimate = kde_evaluate(model, samples, grid);
            double sup = 0.0;
            for (std::size_t g = 0; g < grid.size(); ++g) {
                sup = std::max(sup, std::abs(estimate[g] - truth[g]));
            }
            sups.push_back(sup);
        }
        return sups;
    };

    const double med500 = detail::median(sup_errors(500));
    const double med16000 = detail::median(sup_errors(16000));
    r.pass = med16000 < med500;
    r.detail = "median sup error " + detail::fmt(med500) + " @500 -> " + detail::fmt(med16000) +
               " @16000";
    r.seconds = detail::elapsed_seconds(start);
    if (r.seconds >= 120.0) {
        r.pass = false;
        r.detail += " [runtime budget 120 s exceeded]";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 9: CLI determinism (byte-identical output, thread independence).
// ---------------------------------------------------------------------------

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline int run_command(const std::string& command) { return std::system(command.c_str()); }

}  // namespace detail

inline CriterionResult run_determinism(const Options& options) {
    const auto start = detail::clock::now();
    CriterionResult r{9, "cli determinism (repeat runs, thread counts)", false, "", 0.0};
    if (options.cli_path.empty()) {
        r.detail = "cli path not provided (set MODEFOREST_CLI or --cli)";
        r.seconds = detail::elapsed_seconds(start);
        return r;
    }

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() /
                         ("modeforest-accept-" + std::to_string(static_cast<unsigned>(
                                                     detail::clock::now().time_since_epoch().count() &
                                                     0xffffff)));
    fs::create_directories(dir);
    const fs::path csv = dir / "input.csv";
    {
        const auto samples = synthetic::catalog_density("two-gaussian-10sep").sample(200, 1);
        std::ofstream out(csv);
        out << std::setprecision(17);
        for (std::size_t i = 0; i < samples.size(); ++i) out << samples[i][0] << "\n";
    }

    auto quickshift_cmd = [&](const std::string& env_prefix, const fs::path& out) {
        return env_prefix + "\"" + options.cli_path + "\" quickshift \"" + csv.string() +
               "\" --h 0.5 --tau 1 --out \"" + out.string() + "\"";
    };

    const fs::path out_a = dir / "a.json";
    const fs::path out_b = dir / "b.json";
    const fs::path out_t1 = dir / "t1.json";
    const fs::path out_t4 = dir / "t4.json";
    bool ok = detail::run_command(quickshift_cmd("", out_a)) == 0;
    ok = ok && detail::run_command(quickshift_cmd("", out_b)) == 0;
    ok = ok && detail::run_command(quickshift_cmd("MODEFOREST_THREADS=1 ", out_t1)) == 0;
    ok = ok && detail::run_command(quickshift_cmd("MODEFOREST_THREADS=4 ", out_t4)) == 0;
    if (!ok) {
        r.detail = "cli invocation failed";
    } else {
        const std::string a = detail::read_file(out_a);
        const bool repeat_identical = !a.empty() && a == detail::read_file(out_b);
        const bool threads_identical =
            detail::read_file(out_t1) == detail::read_file(out_t4) && a == detail::read_file(out_t1);
        r.pass = repeat_identical && threads_identical;
        r.detail = std::string("repeat runs byte-identical: ") +
                   (repeat_identical ? "yes" : "no") + ", threads {1,4} identical: " +
                   (threads_identical ? "yes" : "no");
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    r.seconds = detail::elapsed_seconds(start);
    return r;
}

// ---------------------------------------------------------------------------
// Suite driver
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "full",        "oracle",           "mode-recovery", "segmentation", "separation",
        "cluster-tree", "modal-regression", "supnorm",       "determinism"};
    return names;
}

inline std::vector<CriterionResult> run_suite(const std::string& suite, const Options& options) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
        throw std::invalid_argument("unknown suite: " + suite);
    }
    const bool all = suite == "full";
    std::vector<CriterionResult> results;
    if (all || suite == "oracle") {
        const auto [c1, c2] = run_oracle_equivalence();
        results.push_back(c1);
        results.push_back(c2);
    }
    if (all || suite == "mode-recovery") results.push_back(run_mode_recovery(options));
    if (all || suite == "segmentation") results.push_back(run_segmentation(options));
    if (all || suite == "separation") results.push_back(run_separation(options));
    if (all || suite == "cluster-tree") results.push_back(run_cluster_tree(options));
    if (all || suite == "modal-regression") results.push_back(run_modal_regression(options));
    if (all || suite == "supnorm") results.push_back(run_supnorm_trend(options));
    if (all || suite == "determinism") results.push_back(run_determinism(options));
    return results;
}

}  // namespace modeforest::acceptance
