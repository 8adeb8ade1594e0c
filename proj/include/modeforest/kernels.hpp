#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "modeforest/detail/numeric.hpp"
#include "modeforest/detail/parallel.hpp"
#include "modeforest/point_set.hpp"

namespace modeforest {

/// Radial kernel shapes. Every shape is given by a nonnegative,
/// non-increasing profile k on [0, inf) with K(u) = k(|u|), scaled so that
/// K integrates to 1 in the ambient dimension.
///
/// The classical Silverman kernel oscillates below zero past its first
/// root; that breaks the nonnegative non-increasing profile contract, so we
/// ship its main lobe (profile zeroed beyond t = 3*pi*sqrt(2)/4) and
/// renormalize.
enum class KernelShape {
    gaussian,
    epanechnikov,
    uniform,
    triangular,
    exponential,
    tricube,
    cosine,
    silverman,
};

inline const char* to_string(KernelShape s) {
    switch (s) {
        case KernelShape::gaussian: return "gaussian";
        case KernelShape::epanechnikov: return "epanechnikov";
        case KernelShape::uniform: return "uniform";
        case KernelShape::triangular: return "triangular";
        case KernelShape::exponential: return "exponential";
        case KernelShape::tricube: return "tricube";
        case KernelShape::cosine: return "cosine";
        case KernelShape::silverman: return "silverman";
    }
    return "unknown";
}

inline KernelShape kernel_shape_from_string(const std::string& name) {
    static const std::unordered_map<std::string, KernelShape> table = {
        {"gaussian", KernelShape::gaussian},       {"epanechnikov", KernelShape::epanechnikov},
        {"uniform", KernelShape::uniform},         {"triangular", KernelShape::triangular},
        {"exponential", KernelShape::exponential}, {"tricube", KernelShape::tricube},
        {"cosine", KernelShape::cosine},           {"silverman", KernelShape::silverman},
    };
    const auto it = table.find(name);
    if (it == table.end()) {
        throw std::invalid_argument("unknown kernel shape: " + name);
    }
    return it->second;
}

namespace detail {

// First root of the Silverman profile; the profile is monotone on [0, root].
inline constexpr double silverman_cutoff = 3.0 * std::numbers::pi * std::numbers::sqrt2 / 4.0;
inline constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

/// Unnormalized radial profile k0(t), t >= 0. Compact supports include the
/// boundary point t == 1.
inline double base_profile(KernelShape shape, double t) {
    switch (shape) {
        case KernelShape::gaussian:
            return std::exp(-0.5 * t * t);
        case KernelShape::epanechnikov:
            return t <= 1.0 ? 1.0 - t * t : 0.0;
        case KernelShape::uniform:
            return t <= 1.0 ? 1.0 : 0.0;
        case KernelShape::triangular:
            return t <= 1.0 ? 1.0 - t : 0.0;
        case KernelShape::exponential:
            return std::exp(-t);
        case KernelShape::tricube: {
            if (t > 1.0) return 0.0;
            const double c = 1.0 - t * t * t;
            return c * c * c;
        }
        case KernelShape::cosine:
            return t <= 1.0 ? std::cos(0.5 * std::numbers::pi * t) : 0.0;
        case KernelShape::silverman:
            if (t > silverman_cutoff) return 0.0;
            return std::exp(-t * inv_sqrt2) * std::sin(t * inv_sqrt2 + 0.25 * std::numbers::pi);
    }
    return 0.0;
}

inline bool compact_support(KernelShape shape) {
    switch (shape) {
        case KernelShape::gaussian:
        case KernelShape::exponential:
            return false;
        default:
            return true;
    }
}

/// Radius beyond which the profile is exactly zero (infinity for kernels
/// with full support).
inline double support_radius(KernelShape shape) {
    switch (shape) {
        case KernelShape::gaussian:
        case KernelShape::exponential:
            return std::numeric_limits<double>::infinity();
        case KernelShape::silverman:
            return silverman_cutoff;
        default:
            return 1.0;
    }
}

inline double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

inline double unit_sphere_area(int d) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Normalization constant c so that integral of c*k0(|u|) over R^d is 1.
/// Closed forms where available, one-time adaptive quadrature of the radial
/// integral otherwise.
inline double compute_normalization(KernelShape shape, int d) {
    switch (shape) {
        case KernelShape::gaussian:
            return std::pow(2.0 * std::numbers::pi, -0.5 * d);
        case KernelShape::uniform:
            return 1.0 / unit_ball_volume(d);
        case KernelShape::epanechnikov:
            if (d == 1) return 0.75;
            if (d == 2) return 2.0 / std::numbers::pi;
            if (d == 3) return 15.0 / (8.0 * std::numbers::pi);
            break;
        default:
            break;
    }
    double upper = support_radius(shape);
    if (!std::isfinite(upper)) upper = 60.0;  // exp(-60) is far below double epsilon
    const double radial = detail::integrate(
        [shape, d](double t) { return base_profile(shape, t) * std::pow(t, d - 1); }, 0.0, upper,
        1e-14);
    return 1.0 / (unit_sphere_area(d) * radial);
}

inline double normalization(KernelShape shape, int d) {
    static std::mutex mu;
    static std::unordered_map<int, double> cache;
    const int key = static_cast<int>(shape) * 256 + d;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, compute_normalization(shape, d)).first;
    }
    return it->second;
}

}  // namespace detail

/// A kernel shape together with access to its dimension-specific profile.
class Kernel {
public:
    Kernel() = default;
    explicit Kernel(KernelShape shape) : shape_(shape) {}

    KernelShape shape() const { return shape_; }
    bool compact_support() const { return detail::compact_support(shape_); }
    double support_radius() const { return detail::support_radius(shape_); }

    /// Normalized profile value k(t) in dimension d, so K(u) = k(|u|).
    double profile(double t, int d) const {
        return detail::normalization(shape_, d) * detail::base_profile(shape_, t);
    }

    double normalization(int d) const { return detail::normalization(shape_, d); }
    double base_profile(double t) const { return detail::base_profile(shape_, t); }

    bool operator==(const Kernel& other) const { return shape_ == other.shape_; }

private:
    KernelShape shape_ = KernelShape::gaussian;
};

/// Kernel + bandwidth + dimension: everything needed to evaluate the KDE.
struct DensityModel {
    Kernel kernel;
    double bandwidth = 1.0;
    int dim = 1;

    DensityModel(Kernel k, double h, int d) : kernel(k), bandwidth(h), dim(d) {
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw std::invalid_argument("DensityModel: bandwidth must be positive and finite");
        }
        if (d < 1) {
            throw std::invalid_argument("DensityModel: dimension must be >= 1");
        }
    }
};

namespace detail {

inline void check_kde_inputs(const DensityModel& model, const PointSet& samples,
                             const PointSet& queries) {
    if (samples.empty()) {
        throw std::invalid_argument("kde: sample set must be nonempty");
    }
    if (static_cast<int>(samples.dim()) != model.dim) {
        throw std::invalid_argument("kde: sample dimension does not match model dimension");
    }
    if (!queries.empty() && queries.dim() != samples.dim()) {
        throw std::invalid_argument("kde: query dimension does not match sample dimension");
    }
}

}  // namespace detail

/// Exact KDE at each query point: (1 / (n h^d)) * sum_i K((q - x_i) / h).
/// The sum runs in ascending sample order for every query, so results do not
/// depend on thread count.
inline std::vector<double> kde_evaluate(const DensityModel& model, const PointSet& samples,
                                        const PointSet& queries) {
    detail::check_kde_inputs(model, samples, queries);
    const std::size_t n = samples.size();
    const std::size_t m = queries.size();
    const double h = model.bandwidth;
    const double inv_h = 1.0 / h;
    const double norm = model.kernel.normalization(model.dim);
    const double scale = norm / (static_cast<double>(n) * std::pow(h, model.dim));
    const KernelShape shape = model.kernel.shape();

    std::vector<double> out(m, 0.0);
    detail::parallel_for(m, [&](std::size_t begin, std::size_t end) {
        for (std::size_t q = begin; q < end; ++q) {
            const auto query = queries[q];
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double t = detail::distance(query, samples[i]) * inv_h;
                acc += detail::base_profile(shape, t);
            }
            out[q] = acc * scale;
        }
    });
    return out;
}

/// KDE of the samples at the samples themselves. Identical summation order
/// to kde_evaluate, so the two agree exactly.
inline std::vector<double> kde_self_evaluate(const DensityModel& model, const PointSet& samples) {
    return kde_evaluate(model, samples, samples);
}

/// Truncated KDE: samples farther than radius_scale * h from the query are
/// skipped. Each omitted sample changes the result by at most
/// k(radius_scale) / (n * h^d), so the total additive error is bounded by
/// that times the number omitted. Not a substitute for kde_evaluate where
/// exactness matters.
inline std::vector<double> kde_evaluate_truncated(const DensityModel& model,
                                                  const PointSet& samples, const PointSet& queries,
                                                  double radius_scale) {
    detail::check_kde_inputs(model, samples, queries);
    if (!(radius_scale > 0.0)) {
        throw std::invalid_argument("kde: truncation radius must be positive");
    }
    const std::size_t n = samples.size();
    const std::size_t m = queries.size();
    const double h = model.bandwidth;
    const double inv_h = 1.0 / h;
    const double norm = model.kernel.normalization(model.dim);
    const double scale = norm / (static_cast<double>(n) * std::pow(h, model.dim));
    const KernelShape shape = model.kernel.shape();

    std::vector<double> out(m, 0.0);
    detail::parallel_for(m, [&](std::size_t begin, std::size_t end) {
        for (std::size_t q = begin; q < end; ++q) {
            const auto query = queries[q];
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double t = detail::distance(query, samples[i]) * inv_h;
                if (t > radius_scale) continue;
                acc += detail::base_profile(shape, t);
            }
            out[q] = acc * scale;
        }
    });
    return out;
}

/// Bandwidth schedule h = c * n^(-1/(4+d)).
inline double recommended_bandwidth(std::size_t n, int d, double scale = 1.0) {
    if (n < 1) throw std::invalid_argument("recommended_bandwidth: n must be >= 1");
    if (d < 1) throw std::invalid_argument("recommended_bandwidth: d must be >= 1");
    if (!(scale > 0.0)) throw std::invalid_argument("recommended_bandwidth: scale must be positive");
    return scale * std::pow(static_cast<double>(n), -1.0 / (4.0 + d));
}

}  // namespace modeforest
