#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "modeforest/detail/numeric.hpp"
#include "modeforest/point_set.hpp"

namespace modeforest {

/// Exact Hausdorff distance between two finite nonempty point sets.
inline double hausdorff(const PointSet& a, const PointSet& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("hausdorff: sets must be nonempty");
    }
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("hausdorff: sets must share a dimension");
    }
    auto directed = [](const PointSet& from, const PointSet& to) {
        double worst = 0.0;
        for (std::size_t i = 0; i < from.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < to.size(); ++j) {
                best = std::min(best, detail::squared_distance(from[i], to[j]));
            }
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(directed(a, b), directed(b, a));
}

/// 1-D convenience overload.
inline double hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
    return hausdorff(PointSet::column(a), PointSet::column(b));
}

/// One-to-one matching of estimated modes to true modes within a radius.
struct ModeMatchReport {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (estimated, truth)
    std::vector<std::size_t> unmatched_estimated;
    std::vector<std::size_t> unmatched_truth;
};

/// Greedy matching, candidate pairs taken in ascending distance order (ties
/// by estimated index, then truth index). Each side is matched at most once.
inline ModeMatchReport match_modes(const PointSet& estimated, const PointSet& truth,
                                   double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("match_modes: radius must be positive");
    }
    if (!estimated.empty() && !truth.empty() && estimated.dim() != truth.dim()) {
        throw std::invalid_argument("match_modes: sets must share a dimension");
    }
    struct Candidate {
        double d2;
        std::size_t e, t;
    };
    std::vector<Candidate> candidates;
    const double radius2 = radius * radius;
    for (std::size_t e = 0; e < estimated.size(); ++e) {
        for (std::size_t t = 0; t < truth.size(); ++t) {
            const double d2 = detail::squared_distance(estimated[e], truth[t]);
            if (d2 <= radius2) candidates.push_back({d2, e, t});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        if (a.e != b.e) return a.e < b.e;
        return a.t < b.t;
    });

    ModeMatchReport report;
    std::vector<bool> e_used(estimated.size(), false), t_used(truth.size(), false);
    for (const auto& c : candidates) {
        if (e_used[c.e] || t_used[c.t]) continue;
        e_used[c.e] = true;
        t_used[c.t] = true;
        report.pairs.emplace_back(c.e, c.t);
    }
    for (std::size_t e = 0; e < estimated.size(); ++e) {
        if (!e_used[e]) report.unmatched_estimated.push_back(e);
    }
    for (std::size_t t = 0; t < truth.size(); ++t) {
        if (!t_used[t]) report.unmatched_truth.push_back(t);
    }
    return report;
}

/// Outcome of a 1-D separation certification: the pair (x1, x2) is divided
/// by the separator set S when the density over the r_s-thickened S sits at
/// least delta below the density over the r_s-balls around x1 and x2, with
/// grid extrema padded by the oracle's Lipschitz modulus.
struct SeparationCertificate {
    double x1 = 0.0;
    double x2 = 0.0;
    std::vector<double> separators;
    double r_s = 0.0;
    double delta = 0.0;
    bool valid = false;
    std::string reason;
    double sup_over_separator = 0.0;
    double inf_over_endpoints = 0.0;
};

/// Certifies separation for a 1-D density oracle with known Lipschitz bound.
/// In one dimension every path from x1 to x2 is the segment between them, so
/// S must meet the open interval (x1, x2) to block all paths. The grid check
/// is conservative: sup + L*step < inf - L*step - delta.
inline SeparationCertificate certify_separation_1d(const std::function<double(double)>& density,
                                                   double lipschitz, double x1, double x2,
                                                   const std::vector<double>& separators,
                                                   double r_s, double delta, double grid_step) {
    if (!(r_s > 0.0) || !(delta > 0.0) || !(grid_step > 0.0)) {
        throw std::invalid_argument("certify_separation_1d: r_s, delta and grid_step must be positive");
    }
    if (!(lipschitz >= 0.0)) {
        throw std::invalid_argument("certify_separation_1d: lipschitz bound must be nonnegative");
    }
    if (separators.empty()) {
        throw std::invalid_argument("certify_separation_1d: separator set must be nonempty");
    }

    SeparationCertificate cert;
    cert.x1 = x1;
    cert.x2 = x2;
    cert.separators = separators;
    cert.r_s = r_s;
    cert.delta = delta;

    const double lo = std::min(x1, x2);
    const double hi = std::max(x1, x2);
    const bool blocks = std::any_of(separators.begin(), separators.end(),
                                    [&](double s) { return s > lo && s < hi; });
    if (!blocks) {
        cert.reason = "separator set does not intersect the open interval between x1 and x2";
        return cert;
    }

    auto grid_extremum = [&](double a, double b, bool want_max) {
        double extreme = want_max ? -std::numeric_limits<double>::infinity()
                                  : std::numeric_limits<double>::infinity();
        const auto steps = static_cast<std::size_t>(std::ceil((b - a) / grid_step));
        for (std::size_t k = 0; k <= steps; ++k) {
            const double x = std::min(a + static_cast<double>(k) * grid_step, b);
            const double v = density(x);
            extreme = want_max ? std::max(extreme, v) : std::min(extreme, v);
        }
        return extreme;
    };

    double sup = -std::numeric_limits<double>::infinity();
    for (const double s : separators) {
        sup = std::max(sup, grid_extremum(s - r_s, s + r_s, true));
    }
    double inf = std::min(grid_extremum(x1 - r_s, x1 + r_s, false),
                          grid_extremum(x2 - r_s, x2 + r_s, false));

    cert.sup_over_separator = sup;
    cert.inf_over_endpoints = inf;
    const double pad = lipschitz * grid_step;
    cert.valid = sup + pad < inf - pad - delta;
    if (!cert.valid) {
        cert.reason = "density inequality failed: sup over thickened separator is not below the"
                      " endpoint-ball infimum by delta (after Lipschitz padding)";
    }
    return cert;
}

}  // namespace modeforest
