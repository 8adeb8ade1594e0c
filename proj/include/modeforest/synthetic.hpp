#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "modeforest/detail/numeric.hpp"
#include "modeforest/point_set.hpp"

namespace modeforest::synthetic {

/// One diagonal Gaussian mixture component.
struct GaussianComponent {
    double weight;
    std::vector<double> mean;
    std::vector<double> stddev;  // per-axis, all positive
};

namespace detail {

using modeforest::detail::golden_section_max;
using modeforest::detail::golden_section_min;

inline constexpr double inv_sqrt_2pi = 0.3989422804014327;

/// Uniform double in [0, 1) from the top 53 bits of the generator output.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Standard normal via the Box-Muller transform. Consumes exactly two
/// generator outputs per draw: z = sqrt(-2 ln u1) * cos(2 pi u2) with
/// u1 in (0, 1]. Fixed here (not the standard library distribution) so
/// sequences are identical across platforms.
inline double standard_normal(std::mt19937_64& gen) {
    const double u1 = (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

/// Analytic ground-truth density: a Gaussian mixture with diagonal
/// covariances, plus the mode / saddle oracles the experiments rely on.
class MixtureDensity {
public:
    MixtureDensity() = default;

    explicit MixtureDensity(std::vector<GaussianComponent> components)
        : components_(std::move(components)) {
        if (components_.empty()) {
            throw std::invalid_argument("MixtureDensity: need at least one component");
        }
        dim_ = components_.front().mean.size();
        double total = 0.0;
        for (const auto& c : components_) {
            if (c.mean.size() != dim_ || c.stddev.size() != dim_) {
                throw std::invalid_argument("MixtureDensity: inconsistent component dimensions");
            }
            if (!(c.weight >= 0.0)) {
                throw std::invalid_argument("MixtureDensity: weights must be nonnegative");
            }
            for (const double s : c.stddev) {
                if (!(s > 0.0)) {
                    throw std::invalid_argument("MixtureDensity: standard deviations must be positive");
                }
            }
            total += c.weight;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("MixtureDensity: weights must sum to 1");
        }
    }

    std::size_t dim() const { return dim_; }
    const std::vector<GaussianComponent>& components() const { return components_; }

    double density_at(std::span<const double> x) const {
        if (x.size() != dim_) {
            throw std::invalid_argument("MixtureDensity: point dimension mismatch");
        }
        double total = 0.0;
        for (const auto& c : components_) {
            double factor = c.weight;
            for (std::size_t k = 0; k < dim_; ++k) {
                const double z = (x[k] - c.mean[k]) / c.stddev[k];
                factor *= detail::inv_sqrt_2pi / c.stddev[k] * std::exp(-0.5 * z * z);
            }
            total += factor;
        }
        return total;
    }

    double operator()(double x) const {
        if (dim_ != 1) {
            throw std::invalid_argument("MixtureDensity: scalar call requires dimension 1");
        }
        return density_at({&x, 1});
    }

    /// Bound on |f'| for d = 1: each component's derivative peaks at
    /// w / (sigma^2 sqrt(2 pi e)).
    double lipschitz_bound() const {
        if (dim_ != 1) {
            throw std::invalid_argument("MixtureDensity: lipschitz bound implemented for d = 1");
        }
        double total = 0.0;
        const double inv_sqrt_2pi_e = detail::inv_sqrt_2pi * std::exp(-0.5);
        for (const auto& c : components_) {
            total += c.weight * inv_sqrt_2pi_e / (c.stddev[0] * c.stddev[0]);
        }
        return total;
    }

    /// i.i.d. draws, deterministic per seed: mt19937_64 seeded directly, one
    /// uniform for the component choice (cumulative weights, ascending),
    /// then one Box-Muller normal per axis.
    PointSet sample(std::size_t n, std::uint64_t seed) const {
        if (n < 1) {
            throw std::invalid_argument("MixtureDensity: sample count must be >= 1");
        }
        std::mt19937_64 gen(seed);
        std::vector<double> data;
        data.reserve(n * dim_);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = detail::uniform01(gen);
            std::size_t pick = components_.size() - 1;
            double cum = 0.0;
            for (std::size_t k = 0; k < components_.size(); ++k) {
                cum += components_[k].weight;
                if (u < cum) {
                    pick = k;
                    break;
                }
            }
            const auto& c = components_[pick];
            for (std::size_t k = 0; k < dim_; ++k) {
                data.push_back(c.mean[k] + c.stddev[k] * detail::standard_normal(gen));
            }
        }
        return PointSet(std::move(data), dim_);
    }

    /// Local maxima located by grid scan plus coordinate-wise golden-section
    /// refinement (x-tolerance 1e-8), deduplicated within 1e-4.
    PointSet true_modes(std::span<const double> lo, std::span<const double> hi,
                        double grid_step) const {
        if (lo.size() != dim_ || hi.size() != dim_) {
            throw std::invalid_argument("true_modes: box dimension mismatch");
        }
        if (!(grid_step > 0.0)) {
            throw std::invalid_argument("true_modes: grid step must be positive");
        }
        std::vector<std::size_t> counts(dim_);
        std::size_t total = 1;
        for (std::size_t k = 0; k < dim_; ++k) {
            if (!(hi[k] > lo[k])) {
                throw std::invalid_argument("true_modes: box must have positive extent");
            }
            counts[k] = static_cast<std::size_t>(std::floor((hi[k] - lo[k]) / grid_step)) + 1;
            total *= counts[k];
        }

        auto coord = [&](std::size_t k, std::size_t idx) {
            return lo[k] + static_cast<double>(idx) * grid_step;
        };
        auto value_at_multi = [&](const std::vector<std::size_t>& idx) {
            std::vector<double> x(dim_);
            for (std::size_t k = 0; k < dim_; ++k) x[k] = coord(k, idx[k]);
            return density_at(x);
        };

        std::vector<std::vector<double>> candidates;
        std::vector<std::size_t> idx(dim_, 0);
        for (std::size_t flat = 0; flat < total; ++flat) {
            const double center = value_at_multi(idx);
            bool is_peak = true;
            for (std::size_t k = 0; k < dim_ && is_peak; ++k) {
                for (const int step : {-1, +1}) {
                    if (step < 0 && idx[k] == 0) continue;
                    if (step > 0 && idx[k] + 1 >= counts[k]) continue;
                    auto neighbor = idx;
                    neighbor[k] += step;
                    if (value_at_multi(neighbor) > center) {
                        is_peak = false;
                        break;
                    }
                }
            }
            if (is_peak) {
                std::vector<double> x(dim_);
                for (std::size_t k = 0; k < dim_; ++k) x[k] = coord(k, idx[k]);
                candidates.push_back(refine_mode(x, grid_step));
            }
            for (std::size_t k = dim_; k-- > 0;) {
                if (++idx[k] < counts[k]) break;
                idx[k] = 0;
            }
        }

        // Dedup within 1e-4, keeping the first (lexicographically smallest
        // grid origin) representative.
        std::vector<double> flat;
        std::vector<std::vector<double>> unique;
        for (const auto& c : candidates) {
            bool dup = false;
            for (const auto& u : unique) {
                double d2 = 0.0;
                for (std::size_t k = 0; k < dim_; ++k) {
                    d2 += (c[k] - u[k]) * (c[k] - u[k]);
                }
                if (d2 < 1e-4 * 1e-4) {
                    dup = true;
                    break;
                }
            }
            if (!dup) unique.push_back(c);
        }
        std::sort(unique.begin(), unique.end());
        for (const auto& u : unique) flat.insert(flat.end(), u.begin(), u.end());
        return PointSet(std::move(flat), dim_);
    }

    /// Minimum of the 1-D density over [a, b]; a and b must bracket an
    /// interior minimum (monotone segments are rejected).
    double saddle_level_1d(double a, double b) const {
        if (dim_ != 1) {
            throw std::invalid_argument("saddle_level_1d: requires dimension 1");
        }
        if (!(b > a)) {
            throw std::invalid_argument("saddle_level_1d: need a < b");
        }
        constexpr std::size_t grid = 2048;
        const double step = (b - a) / grid;
        double best_x = a;
        double best_v = (*this)(a);
        std::size_t best_i = 0;
        for (std::size_t i = 1; i <= grid; ++i) {
            const double x = a + static_cast<double>(i) * step;
            const double v = (*this)(x);
            if (v < best_v) {
                best_v = v;
                best_x = x;
                best_i = i;
            }
        }
        if (best_i == 0 || best_i == grid) {
            throw std::invalid_argument("saddle_level_1d: no interior minimum in [a, b]");
        }
        const double refined = detail::golden_section_min(
            [this](double x) { return (*this)(x); }, best_x - step, best_x + step, 1e-8);
        return (*this)(refined);
    }

private:
    std::vector<double> refine_mode(std::vector<double> x, double grid_step) const {
        for (int sweep = 0; sweep < 64; ++sweep) {
            double moved = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) {
                auto line = [&](double t) {
                    auto probe = x;
                    probe[k] = t;
                    return density_at(probe);
                };
                const double refined =
                    detail::golden_section_max(line, x[k] - grid_step, x[k] + grid_step, 1e-8);
                moved = std::max(moved, std::abs(refined - x[k]));
                x[k] = refined;
            }
            if (moved < 1e-9) break;
        }
        return x;
    }

    std::vector<GaussianComponent> components_;
    std::size_t dim_ = 0;
};

/// A named ground-truth density for experiments, with a plain-language note
/// on the regularity it does or does not satisfy.
struct CatalogEntry {
    std::string name;
    std::string description;
    MixtureDensity density;
};

inline const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> out;
        out.push_back({"standard-normal",
                       "N(0,1); smooth, strictly unimodal, no flat regions, nondegenerate mode",
                       MixtureDensity({{1.0, {0.0}, {1.0}}})});
        out.push_back({"two-gaussian-10sep",
                       "equal mixture of N(0, 0.5^2) and N(10, 0.5^2); two far-separated "
                       "nondegenerate modes divided by a deep valley; no flat regions",
                       MixtureDensity({{0.5, {0.0}, {0.5}}, {0.5, {10.0}, {0.5}}})});
        out.push_back({"dominant-bump",
                       "0.8 N(0, 0.5^2) + 0.2 N(1.5, 0.3^2); dominant mode at 0 with a genuine "
                       "minor mode near 1.5 that is not the maximizer of its radius-2 ball; "
                       "smooth, no flat regions",
                       MixtureDensity({{0.8, {0.0}, {0.5}}, {0.2, {1.5}, {0.3}}})});
        out.push_back({"trimodal",
                       "equal mixture of N(0, 1.1^2), N(5, 1.1^2), N(10, 1.1^2); three "
                       "nondegenerate modes with shallow saddles near 2.5 and 7.5; no flat regions",
                       MixtureDensity({{1.0 / 3.0, {0.0}, {1.1}},
                                       {1.0 / 3.0, {5.0}, {1.1}},
                                       {1.0 / 3.0, {10.0}, {1.1}}})});
        out.push_back({"near-flat-plateau",
                       "equal mixture of N(k, 1) for k = 0..4; nearly constant on [0.5, 3.5], "
                       "deliberately violating the no-flat-regions requirement; kept as a "
                       "counterexample for the failure-mode tests",
                       MixtureDensity({{0.2, {0.0}, {1.0}},
                                       {0.2, {1.0}, {1.0}},
                                       {0.2, {2.0}, {1.0}},
                                       {0.2, {3.0}, {1.0}},
                                       {0.2, {4.0}, {1.0}}})});
        out.push_back({"unimodal-conditional",
                       "joint (x, y) with x ~ N(0,1) and y | x ~ N(0,1) independent of x; the "
                       "conditional is unimodal at 0 for every x",
                       MixtureDensity({{1.0, {0.0, 0.0}, {1.0, 1.0}}})});
        out.push_back({"bimodal-conditional",
                       "joint (x, y) with x ~ N(0,1) and y | x an equal mixture of N(-2, 0.25^2) "
                       "and N(2, 0.25^2), independent of x; two conditional modes at -2 and 2",
                       MixtureDensity({{0.5, {0.0, -2.0}, {1.0, 0.25}},
                                       {0.5, {0.0, 2.0}, {1.0, 0.25}}})});
        return out;
    }();
    return entries;
}

inline const MixtureDensity& catalog_density(const std::string& name) {
    for (const auto& entry : catalog()) {
        if (entry.name == name) return entry.density;
    }
    throw std::invalid_argument("unknown catalog density: " + name);
}

}  // namespace modeforest::synthetic
