#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "modeforest/detail/parallel.hpp"
#include "modeforest/kernels.hpp"
#include "modeforest/point_set.hpp"
#include "modeforest/quickshift.hpp"

namespace modeforest {

/// Conditional mode estimates at one query location: the roots of a 1-D
/// Quick Shift forest over the y-samples, driven by the joint KDE evaluated
/// on the slice (x, y_i).
struct ConditionalModeResult {
    std::vector<double> query;           // the x the slice was taken at
    std::vector<double> mode_estimates;  // y-values of the slice-forest roots, ascending
    QuickShiftForest forest;             // 1-D forest over the y-samples
};

namespace detail {

inline PointSet response_column(const PointSet& data) {
    const std::size_t n = data.size();
    const std::size_t d = data.dim() - 1;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = data[i][d];
    return PointSet::column(std::move(y));
}

}  // namespace detail

/// Quick Shift modal regression. `data` holds rows (x_i, y_i) with y last;
/// `model` is the joint KDE over d+1 coordinates; `query` has the d leading
/// coordinates (empty for d = 0, which reduces to plain 1-D Quick Shift over
/// the y-values).
inline ConditionalModeResult modal_regression(const PointSet& data, const DensityModel& model,
                                              double tau, std::span<const double> query) {
    if (data.empty()) {
        throw std::invalid_argument("modal_regression: data must be nonempty");
    }
    if (static_cast<int>(data.dim()) != model.dim) {
        throw std::invalid_argument("modal_regression: data dimension does not match model");
    }
    if (query.size() + 1 != data.dim()) {
        throw std::invalid_argument("modal_regression: query dimension must be data dimension - 1");
    }
    if (!(tau > 0.0)) {
        throw std::invalid_argument("modal_regression: tau must be positive");
    }

    const std::size_t n = data.size();
    const std::size_t joint_dim = data.dim();

    // Slice of the joint KDE: f(query, y_i) for every sample's response.
    std::vector<double> slice_points;
    slice_points.reserve(n * joint_dim);
    for (std::size_t i = 0; i < n; ++i) {
        slice_points.insert(slice_points.end(), query.begin(), query.end());
        slice_points.push_back(data[i][joint_dim - 1]);
    }
    const PointSet slice_queries(std::move(slice_points), joint_dim);
    const std::vector<double> slice_density = kde_evaluate(model, data, slice_queries);

    ConditionalModeResult result;
    result.query.assign(query.begin(), query.end());
    const PointSet responses = detail::response_column(data);
    result.forest = build_forest(responses, slice_density, tau);
    for (const std::size_t r : result.forest.roots()) {
        result.mode_estimates.push_back(responses[r][0]);
    }
    std::sort(result.mode_estimates.begin(), result.mode_estimates.end());
    return result;
}

/// Batch interface: one independent slice computation per query row.
inline std::vector<ConditionalModeResult> modal_regression_batch(const PointSet& data,
                                                                 const DensityModel& model,
                                                                 double tau,
                                                                 const PointSet& queries) {
    if (queries.dim() + 1 != data.dim() && !(data.dim() == 1 && queries.empty())) {
        throw std::invalid_argument("modal_regression: query dimension must be data dimension - 1");
    }
    std::vector<ConditionalModeResult> out(queries.size());
    detail::parallel_for(queries.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t q = begin; q < end; ++q) {
            out[q] = modal_regression(data, model, tau, queries[q]);
        }
    });
    return out;
}

}  // namespace modeforest
