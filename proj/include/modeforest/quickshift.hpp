#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "modeforest/detail/numeric.hpp"
#include "modeforest/detail/parallel.hpp"
#include "modeforest/kernels.hpp"
#include "modeforest/point_set.hpp"

namespace modeforest {

/// Directed forest over the samples: each sample points to the nearest
/// sample of strictly higher density, provided one exists within radius tau.
/// Root samples have no parent. Density strictly increases along every edge,
/// which also makes the graph acyclic.
class QuickShiftForest {
public:
    static constexpr std::ptrdiff_t no_parent = -1;

    QuickShiftForest() = default;
    QuickShiftForest(std::vector<std::ptrdiff_t> parent, std::vector<double> density,
                     std::vector<double> edge_length, double tau)
        : parent_(std::move(parent)),
          density_(std::move(density)),
          edge_length_(std::move(edge_length)),
          tau_(tau) {}

    std::size_t size() const { return parent_.size(); }
    double tau() const { return tau_; }

    bool is_root(std::size_t i) const { return parent_[i] == no_parent; }

    std::optional<std::size_t> parent(std::size_t i) const {
        if (parent_[i] == no_parent) return std::nullopt;
        return static_cast<std::size_t>(parent_[i]);
    }

    double density(std::size_t i) const { return density_[i]; }
    const std::vector<double>& densities() const { return density_; }

    std::optional<double> edge_length(std::size_t i) const {
        if (parent_[i] == no_parent) return std::nullopt;
        return edge_length_[i];
    }

    std::vector<std::size_t> roots() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < parent_.size(); ++i) {
            if (parent_[i] == no_parent) out.push_back(i);
        }
        return out;
    }

    const std::vector<std::ptrdiff_t>& parents() const { return parent_; }

    bool operator==(const QuickShiftForest& other) const {
        return parent_ == other.parent_ && density_ == other.density_ && tau_ == other.tau_;
    }

private:
    std::vector<std::ptrdiff_t> parent_;
    std::vector<double> density_;
    std::vector<double> edge_length_;  // valid only where parent exists
    double tau_ = std::numeric_limits<double>::infinity();
};

namespace detail {

struct ParentChoice {
    double d2 = std::numeric_limits<double>::infinity();
    std::ptrdiff_t index = QuickShiftForest::no_parent;

    /// Lexicographic (distance^2, index) preference; order of candidate
    /// enumeration does not matter.
    void offer(double cand_d2, std::size_t j) {
        const auto cj = static_cast<std::ptrdiff_t>(j);
        if (cand_d2 < d2 || (cand_d2 == d2 && cj < index)) {
            d2 = cand_d2;
            index = cj;
        }
    }
};

inline void check_forest_inputs(const PointSet& samples, const std::vector<double>& density,
                                double tau) {
    if (samples.size() != density.size()) {
        throw std::invalid_argument("build_forest: density length does not match sample count");
    }
    if (!(tau > 0.0)) {
        throw std::invalid_argument("build_forest: tau must be positive (infinity allowed)");
    }
}

inline QuickShiftForest assemble_forest(const std::vector<ParentChoice>& best,
                                        const std::vector<double>& density, double tau) {
    const std::size_t n = best.size();
    const double tau2 = tau * tau;
    std::vector<std::ptrdiff_t> parent(n, QuickShiftForest::no_parent);
    std::vector<double> edge(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        // The nearest strictly-higher-density sample is the parent iff it
        // lies within tau; otherwise no admissible neighbor exists at all.
        if (best[i].index != QuickShiftForest::no_parent && best[i].d2 <= tau2) {
            parent[i] = best[i].index;
            edge[i] = std::sqrt(best[i].d2);
        }
    }
    return QuickShiftForest(std::move(parent), density, std::move(edge), tau);
}

/// Integer cell key for the uniform grid index (cell size tau).
struct CellKey {
    std::int64_t c[3] = {0, 0, 0};
    bool operator==(const CellKey& o) const {
        return c[0] == o.c[0] && c[1] == o.c[1] && c[2] == o.c[2];
    }
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const {
        std::size_t h = 1469598103934665603ull;
        for (int i = 0; i < 3; ++i) {
            h ^= static_cast<std::size_t>(k.c[i]);
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace detail

/// Reference O(n^2) forest construction. For every sample the scan covers
/// all strictly-higher-density samples; ties on distance go to the lowest
/// index.
inline QuickShiftForest build_forest_bruteforce(const PointSet& samples,
                                                const std::vector<double>& density, double tau) {
    detail::check_forest_inputs(samples, density, tau);
    const std::size_t n = samples.size();
    std::vector<detail::ParentChoice> best(n);
    detail::parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto xi = samples[i];
            const double di = density[i];
            for (std::size_t j = 0; j < n; ++j) {
                if (density[j] > di) {
                    best[i].offer(detail::squared_distance(xi, samples[j]), j);
                }
            }
        }
    });
    return detail::assemble_forest(best, density, tau);
}

/// Grid-indexed construction (cell size tau, d <= 3). The nearest
/// strictly-higher-density sample of a non-root always lies within tau, so
/// scanning the 3^d neighboring cells is an exact search. Returns
/// bit-identical parents to the brute-force path.
inline QuickShiftForest build_forest_grid(const PointSet& samples,
                                          const std::vector<double>& density, double tau) {
    detail::check_forest_inputs(samples, density, tau);
    if (!std::isfinite(tau) || samples.dim() > 3) {
        return build_forest_bruteforce(samples, density, tau);
    }
    const std::size_t n = samples.size();
    const int d = static_cast<int>(samples.dim());
    const double inv_tau = 1.0 / tau;
    const double tau2 = tau * tau;

    auto cell_of = [&](std::span<const double> x) {
        detail::CellKey key;
        for (int k = 0; k < d; ++k) {
            key.c[k] = static_cast<std::int64_t>(std::floor(x[k] * inv_tau));
        }
        return key;
    };

    std::unordered_map<detail::CellKey, std::vector<std::size_t>, detail::CellKeyHash> grid;
    grid.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[cell_of(samples[i])].push_back(i);  // ascending index per cell
    }

    std::vector<detail::ParentChoice> best(n);
    detail::parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto xi = samples[i];
            const double di = density[i];
            const detail::CellKey home = cell_of(xi);
            detail::CellKey probe;
            const int span1 = d >= 2 ? 1 : 0;
            const int span2 = d >= 3 ? 1 : 0;
            for (int a = -1; a <= 1; ++a) {
                probe.c[0] = home.c[0] + a;
                for (int b = -span1; b <= span1; ++b) {
                    probe.c[1] = home.c[1] + b;
                    for (int c = -span2; c <= span2; ++c) {
                        probe.c[2] = home.c[2] + c;
                        const auto it = grid.find(probe);
                        if (it == grid.end()) continue;
                        for (const std::size_t j : it->second) {
                            if (density[j] > di) {
                                const double d2 = detail::squared_distance(xi, samples[j]);
                                if (d2 <= tau2) best[i].offer(d2, j);
                            }
                        }
                    }
                }
            }
        }
    });
    return detail::assemble_forest(best, density, tau);
}

/// Builds the Quick Shift forest for the given per-sample densities.
/// Semantics are those of the brute-force scan; a grid index is used for
/// larger inputs since the two are bit-identical.
inline QuickShiftForest build_forest(const PointSet& samples, const std::vector<double>& density,
                                     double tau) {
    if (samples.size() >= 2048 && std::isfinite(tau) && samples.dim() <= 3) {
        return build_forest_grid(samples, density, tau);
    }
    return build_forest_bruteforce(samples, density, tau);
}

/// Full pipeline: KDE self-evaluation followed by forest construction.
inline QuickShiftForest quickshift(const PointSet& samples, const DensityModel& model,
                                   double tau) {
    return build_forest(samples, kde_self_evaluate(model, samples), tau);
}

/// The forest roots: sample-index mode estimates with their coordinates.
struct ModeSet {
    std::vector<std::size_t> indices;
    PointSet coordinates;
};

inline ModeSet modes(const QuickShiftForest& forest, const PointSet& samples) {
    if (forest.size() != samples.size()) {
        throw std::invalid_argument("modes: forest was not built from these samples");
    }
    ModeSet result;
    result.indices = forest.roots();
    std::vector<double> coords;
    coords.reserve(result.indices.size() * samples.dim());
    for (const std::size_t i : result.indices) {
        const auto row = samples[i];
        coords.insert(coords.end(), row.begin(), row.end());
    }
    result.coordinates = PointSet(std::move(coords), samples.dim());
    return result;
}

/// Root reached from each sample by following parent links. Roots map to
/// themselves.
inline std::vector<std::size_t> assignments(const QuickShiftForest& forest) {
    const std::size_t n = forest.size();
    constexpr std::size_t unresolved = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> root(n, unresolved);
    std::vector<std::size_t> path;
    for (std::size_t i = 0; i < n; ++i) {
        if (root[i] != unresolved) continue;
        path.clear();
        std::size_t cur = i;
        while (root[cur] == unresolved && !forest.is_root(cur)) {
            path.push_back(cur);
            cur = *forest.parent(cur);
            if (path.size() > n) {
                throw internal_error("assignments: parent chain exceeds sample count");
            }
        }
        const std::size_t r = forest.is_root(cur) ? cur : root[cur];
        root[cur] = r;
        for (const std::size_t p : path) root[p] = r;
    }
    return root;
}

/// True iff following parent links from `from` reaches `to` (a path of
/// length zero counts, so from == to yields true).
inline bool directed_path_exists(const QuickShiftForest& forest, std::size_t from,
                                 std::size_t to) {
    if (from >= forest.size() || to >= forest.size()) {
        throw std::invalid_argument("directed_path_exists: index out of range");
    }
    std::size_t cur = from;
    std::size_t steps = 0;
    while (true) {
        if (cur == to) return true;
        if (forest.is_root(cur)) return false;
        cur = *forest.parent(cur);
        if (++steps > forest.size()) {
            throw internal_error("directed_path_exists: parent chain exceeds sample count");
        }
    }
}

/// Segmentation radius schedule tau(n) = max(c * n^(-1/(4+d)), (log^2 n / n)^(1/d)).
inline double recommended_tau(std::size_t n, int d, double scale = 1.0) {
    if (n < 1) throw std::invalid_argument("recommended_tau: n must be >= 1");
    if (d < 1) throw std::invalid_argument("recommended_tau: d must be >= 1");
    if (!(scale > 0.0)) throw std::invalid_argument("recommended_tau: scale must be positive");
    const double nn = static_cast<double>(n);
    const double log_n = std::log(nn);
    const double decay = scale * std::pow(nn, -1.0 / (4.0 + d));
    const double floor_term = std::pow(log_n * log_n / nn, 1.0 / d);
    return std::max(decay, floor_term);
}

}  // namespace modeforest
