#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "modeforest/cluster_tree.hpp"
#include "modeforest/detail/numeric.hpp"
#include "modeforest/kernels.hpp"
#include "modeforest/point_set.hpp"
#include "modeforest/quickshift.hpp"

// Brute-force reference implementations. Deliberately unoptimized and kept
// in the shipped library so the CLI --verify mode can replay them against
// the fast paths.
namespace modeforest::verify {

/// Definition-literal KDE: double loop, every term normalized individually.
inline std::vector<double> naive_kde(const DensityModel& model, const PointSet& samples,
                                     const PointSet& queries) {
    detail::check_kde_inputs(model, samples, queries);
    const double h = model.bandwidth;
    const double cell = static_cast<double>(samples.size()) * std::pow(h, model.dim);
    std::vector<double> out;
    out.reserve(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) {
        double sum = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double t = detail::distance(queries[q], samples[i]) / h;
            sum += model.kernel.profile(t, model.dim);
        }
        out.push_back(sum / cell);
    }
    return out;
}

/// Scan of all samples for the parent of sample i: nearest strictly higher
/// density within tau, ties to the lowest index.
inline std::optional<std::size_t> naive_parent(const PointSet& samples,
                                               const std::vector<double>& density, double tau,
                                               std::size_t i) {
    if (samples.size() != density.size()) {
        throw std::invalid_argument("naive_parent: density length does not match sample count");
    }
    const double tau2 = tau * tau;
    bool found = false;
    double best_d2 = 0.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        if (!(density[j] > density[i])) continue;
        const double d2 = detail::squared_distance(samples[i], samples[j]);
        if (!found || d2 < best_d2 || (d2 == best_d2 && j < best_j)) {
            found = true;
            best_d2 = d2;
            best_j = j;
        }
    }
    if (!found || best_d2 > tau2) return std::nullopt;
    return best_j;
}

/// All-pairs union-find over points: merges every pair of components joined
/// by a point pair at distance < delta. Reference for link().
inline std::vector<std::vector<std::size_t>> naive_components(
    const PointSet& points, const std::vector<std::vector<std::size_t>>& sets, double delta) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("naive_components: delta must be positive");
    }
    const std::size_t k = sets.size();
    std::vector<std::ptrdiff_t> owner(points.size(), -1);
    for (std::size_t a = 0; a < k; ++a) {
        for (const std::size_t i : sets[a]) {
            if (i >= points.size()) {
                throw std::invalid_argument("naive_components: index out of range");
            }
            if (owner[i] != -1) {
                throw std::invalid_argument("naive_components: input components overlap");
            }
            owner[i] = static_cast<std::ptrdiff_t>(a);
        }
    }
    detail::UnionFind uf(k);
    const double delta2 = delta * delta;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (owner[i] < 0) continue;
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (owner[j] < 0 || owner[i] == owner[j]) continue;
            if (detail::squared_distance(points[i], points[j]) < delta2) {
                uf.unite(static_cast<std::size_t>(owner[i]), static_cast<std::size_t>(owner[j]));
            }
        }
    }
    std::vector<std::vector<std::size_t>> merged(k);
    for (std::size_t a = 0; a < k; ++a) {
        auto& target = merged[uf.find(a)];
        target.insert(target.end(), sets[a].begin(), sets[a].end());
    }
    merged.erase(
        std::remove_if(merged.begin(), merged.end(), [](const auto& c) { return c.empty(); }),
        merged.end());
    detail::canonicalize(merged);
    return merged;
}

/// Per-sample iterative walk to the root, no memoization.
inline std::vector<std::size_t> naive_assignments(const QuickShiftForest& forest) {
    std::vector<std::size_t> out(forest.size());
    for (std::size_t i = 0; i < forest.size(); ++i) {
        std::size_t cur = i;
        std::size_t steps = 0;
        while (!forest.is_root(cur)) {
            cur = *forest.parent(cur);
            if (++steps > forest.size()) {
                throw internal_error("naive_assignments: parent chain exceeds sample count");
            }
        }
        out[i] = cur;
    }
    return out;
}

/// Graph-style reachability over the parent edges (BFS), independent of the
/// chain-walk in directed_path_exists.
inline bool reachable_bfs(const QuickShiftForest& forest, std::size_t from, std::size_t to) {
    std::vector<std::vector<std::size_t>> adjacency(forest.size());
    for (std::size_t i = 0; i < forest.size(); ++i) {
        if (const auto p = forest.parent(i)) adjacency[i].push_back(*p);
    }
    std::vector<bool> visited(forest.size(), false);
    std::deque<std::size_t> queue{from};
    visited[from] = true;
    while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        if (cur == to) return true;
        for (const std::size_t nxt : adjacency[cur]) {
            if (!visited[nxt]) {
                visited[nxt] = true;
                queue.push_back(nxt);
            }
        }
    }
    return false;
}

/// Structural invariants of a forest against the samples and densities it
/// was built from. Returns an empty string when everything holds.
inline std::string check_forest_invariants(const QuickShiftForest& forest, const PointSet& samples,
                                           const std::vector<double>& density) {
    const double tau = forest.tau();
    for (std::size_t i = 0; i < forest.size(); ++i) {
        if (forest.density(i) != density[i]) {
            return "stored density mismatch at sample " + std::to_string(i);
        }
        const auto expected = naive_parent(samples, density, tau, i);
        const auto actual = forest.parent(i);
        if (expected != actual) {
            return "parent rule violated at sample " + std::to_string(i);
        }
        if (actual) {
            if (!(density[*actual] > density[i])) {
                return "density does not increase along edge at sample " + std::to_string(i);
            }
            const double len = detail::distance(samples[i], samples[*actual]);
            const double stored = *forest.edge_length(i);
            if (stored != len) {
                return "stored edge length mismatch at sample " + std::to_string(i);
            }
            if (!(len <= tau)) {
                return "edge longer than tau at sample " + std::to_string(i);
            }
        }
    }
    return {};
}

}  // namespace modeforest::verify
