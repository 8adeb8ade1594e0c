#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "modeforest/detail/numeric.hpp"
#include "modeforest/point_set.hpp"
#include "modeforest/quickshift.hpp"

namespace modeforest {

/// One level of the estimated cluster tree: the samples with density
/// strictly above `level`, partitioned into linked components.
struct LevelComponents {
    double level = 0.0;
    std::vector<std::vector<std::size_t>> components;
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Returns false if already joined.
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[b] = a;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

/// Canonical form: members ascending, components ordered by smallest member.
inline void canonicalize(std::vector<std::vector<std::size_t>>& components) {
    for (auto& c : components) std::sort(c.begin(), c.end());
    std::sort(components.begin(), components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

inline std::vector<std::vector<std::size_t>> groups_from_unionfind(
    UnionFind& uf, const std::vector<std::size_t>& members) {
    std::vector<std::vector<std::size_t>> out;
    std::unordered_map<std::size_t, std::size_t> slot;
    for (const std::size_t i : members) {
        const std::size_t r = uf.find(i);
        const auto it = slot.find(r);
        if (it == slot.end()) {
            slot.emplace(r, out.size());
            out.push_back({i});
        } else {
            out[it->second].push_back(i);
        }
    }
    canonicalize(out);
    return out;
}

}  // namespace detail

/// Vertices with density strictly above lambda, connected through the forest
/// edges whose endpoints both survive. No linking is applied here.
inline LevelComponents level_subgraph(const QuickShiftForest& forest, double lambda) {
    const std::size_t n = forest.size();
    detail::UnionFind uf(n);
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < n; ++i) {
        if (forest.density(i) > lambda) alive.push_back(i);
    }
    for (const std::size_t i : alive) {
        const auto p = forest.parent(i);
        // Parent density strictly exceeds the child's, so a surviving child
        // implies a surviving parent.
        if (p) uf.unite(i, *p);
    }
    LevelComponents out;
    out.level = lambda;
    out.components = detail::groups_from_unionfind(uf, alive);
    return out;
}

/// Repeatedly merges components whose minimum inter-point distance is
/// strictly below delta, until no such pair remains. Implemented on the
/// component graph: the fixpoint is the transitive closure of the proximity
/// relation, so one closure pass suffices.
inline std::vector<std::vector<std::size_t>> link(
    const std::vector<std::vector<std::size_t>>& components, const PointSet& samples,
    double delta) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("link: delta must be positive");
    }
    std::unordered_set<std::size_t> seen;
    for (const auto& c : components) {
        for (const std::size_t i : c) {
            if (i >= samples.size()) {
                throw std::invalid_argument("link: component index out of range");
            }
            if (!seen.insert(i).second) {
                throw std::invalid_argument("link: input components overlap");
            }
        }
    }

    const std::size_t k = components.size();
    const double delta2 = delta * delta;
    detail::UnionFind uf(k);
    for (std::size_t a = 0; a + 1 < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            if (uf.find(a) == uf.find(b)) continue;
            bool close = false;
            for (const std::size_t i : components[a]) {
                for (const std::size_t j : components[b]) {
                    if (detail::squared_distance(samples[i], samples[j]) < delta2) {
                        close = true;
                        break;
                    }
                }
                if (close) break;
            }
            if (close) uf.unite(a, b);
        }
    }

    std::vector<std::vector<std::size_t>> merged(k);
    for (std::size_t a = 0; a < k; ++a) {
        auto& target = merged[uf.find(a)];
        target.insert(target.end(), components[a].begin(), components[a].end());
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const auto& c) { return c.empty(); }),
                 merged.end());
    detail::canonicalize(merged);
    return merged;
}

/// The linked level partition at an arbitrary threshold: Link applied to the
/// level-restricted forest components. This is the object the cluster tree
/// samples at its level grid.
inline LevelComponents estimated_components(const QuickShiftForest& forest,
                                            const PointSet& samples, double lambda, double tau) {
    LevelComponents lc = level_subgraph(forest, lambda);
    lc.components = link(lc.components, samples, tau);
    return lc;
}

/// Hierarchy of linked level components over the level grid induced by the
/// distinct sample densities. Levels are evaluated at midpoints between
/// consecutive distinct density values (and at half the smallest value for
/// the last level), which makes the strict f > lambda rule unambiguous:
/// every change of the surviving set is captured by exactly one level.
///
/// Internally the nesting structure is a merge tree: each sample enters at
/// its entry level and union events carry the level where two components
/// first join. merge_height is an ancestor query on that tree.
class ClusterTree {
public:
    static constexpr double never_merged = -std::numeric_limits<double>::infinity();

    ClusterTree() = default;

    std::size_t size() const { return samples_.size(); }
    double tau() const { return forest_.tau(); }
    const std::vector<double>& levels() const { return levels_; }
    const QuickShiftForest& forest() const { return forest_; }
    const PointSet& samples() const { return samples_; }

    /// Largest level at which i and j lie in a common linked component;
    /// never_merged if there is none. For i == j this is the highest level
    /// at which the sample survives.
    double merge_height(std::size_t i, std::size_t j) const {
        if (i >= size() || j >= size()) {
            throw std::invalid_argument("merge_height: index out of range");
        }
        if (i == j) return nodes_[i].level;
        std::unordered_set<std::size_t> on_path;
        for (std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(i); cur >= 0;
             cur = nodes_[cur].parent) {
            on_path.insert(static_cast<std::size_t>(cur));
        }
        for (std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(j); cur >= 0;
             cur = nodes_[cur].parent) {
            if (on_path.count(static_cast<std::size_t>(cur))) {
                return nodes_[cur].level;
            }
        }
        return never_merged;
    }

    /// Full per-level partitions, top level first. Size is quadratic in n;
    /// intended for serialization and desk-scale inspection.
    std::vector<LevelComponents> materialize() const {
        std::vector<LevelComponents> out;
        out.reserve(levels_.size());
        detail::UnionFind uf(size());
        std::vector<std::size_t> active;
        std::size_t next = 0;
        const double tau2 = forest_.tau() * forest_.tau();
        for (const double level : levels_) {
            const std::size_t first_new = active.size();
            while (next < order_.size() && forest_.density(order_[next]) > level) {
                active.push_back(order_[next]);
                ++next;
            }
            for (std::size_t a = first_new; a < active.size(); ++a) {
                const std::size_t i = active[a];
                const auto p = forest_.parent(i);
                if (p) uf.unite(i, *p);
            }
            for (std::size_t a = first_new; a < active.size(); ++a) {
                const std::size_t i = active[a];
                for (const std::size_t j : active) {
                    if (j == i) continue;
                    if (detail::squared_distance(samples_[i], samples_[j]) < tau2) {
                        uf.unite(i, j);
                    }
                }
            }
            LevelComponents lc;
            lc.level = level;
            lc.components = detail::groups_from_unionfind(uf, active);
            out.push_back(std::move(lc));
        }
        return out;
    }

    friend ClusterTree cluster_tree_from_forest(const PointSet& samples,
                                                const QuickShiftForest& forest);

private:
    struct MergeNode {
        double level = 0.0;
        std::ptrdiff_t parent = -1;
    };

    QuickShiftForest forest_;
    PointSet samples_;
    std::vector<double> levels_;       // descending evaluation thresholds
    std::vector<std::size_t> order_;   // samples by density desc, index asc
    std::vector<MergeNode> nodes_;     // [0, n) leaves, then union events
};

/// Builds the estimated cluster tree from an existing forest over `samples`.
inline ClusterTree cluster_tree_from_forest(const PointSet& samples,
                                            const QuickShiftForest& forest) {
    if (forest.size() != samples.size()) {
        throw std::invalid_argument("cluster_tree: forest was not built from these samples");
    }
    if (samples.empty()) {
        throw std::invalid_argument("cluster_tree: sample set must be nonempty");
    }
    const std::size_t n = samples.size();

    ClusterTree tree;
    tree.forest_ = forest;
    tree.samples_ = samples;

    tree.order_.resize(n);
    std::iota(tree.order_.begin(), tree.order_.end(), std::size_t{0});
    std::sort(tree.order_.begin(), tree.order_.end(), [&](std::size_t a, std::size_t b) {
        if (forest.density(a) != forest.density(b)) return forest.density(a) > forest.density(b);
        return a < b;
    });

    std::vector<double> distinct;
    for (const std::size_t i : tree.order_) {
        if (distinct.empty() || forest.density(i) != distinct.back()) {
            distinct.push_back(forest.density(i));
        }
    }
    tree.levels_.resize(distinct.size());
    for (std::size_t k = 0; k < distinct.size(); ++k) {
        tree.levels_[k] = (k + 1 < distinct.size()) ? 0.5 * (distinct[k] + distinct[k + 1])
                                                    : 0.5 * distinct[k];
    }

    tree.nodes_.resize(n);
    detail::UnionFind uf(n);
    std::vector<std::ptrdiff_t> tree_node(n);
    std::iota(tree_node.begin(), tree_node.end(), std::ptrdiff_t{0});

    auto unite_nodes = [&](std::size_t a, std::size_t b, double level) {
        const std::size_t ra = uf.find(a);
        const std::size_t rb = uf.find(b);
        if (ra == rb) return;
        const auto fresh = static_cast<std::ptrdiff_t>(tree.nodes_.size());
        tree.nodes_.push_back({level, -1});
        tree.nodes_[tree_node[ra]].parent = fresh;
        tree.nodes_[tree_node[rb]].parent = fresh;
        uf.unite(ra, rb);
        tree_node[uf.find(ra)] = fresh;
    };

    std::vector<std::size_t> active;
    active.reserve(n);
    std::size_t next = 0;
    const double tau2 = forest.tau() * forest.tau();
    for (const double level : tree.levels_) {
        const std::size_t first_new = active.size();
        while (next < n && forest.density(tree.order_[next]) > level) {
            const std::size_t i = tree.order_[next];
            tree.nodes_[i].level = level;  // entry level of the leaf
            active.push_back(i);
            ++next;
        }
        for (std::size_t a = first_new; a < active.size(); ++a) {
            const std::size_t i = active[a];
            const auto p = forest.parent(i);
            if (p) unite_nodes(i, *p, level);
        }
        for (std::size_t a = first_new; a < active.size(); ++a) {
            const std::size_t i = active[a];
            for (const std::size_t j : active) {
                if (j == i) continue;
                if (detail::squared_distance(samples[i], samples[j]) < tau2) {
                    unite_nodes(i, j, level);
                }
            }
        }
    }
    return tree;
}

/// Algorithm pipeline: Quick Shift forest over the KDE, then linked level
/// components over the induced level grid.
inline ClusterTree cluster_tree(const PointSet& samples, const DensityModel& model, double tau) {
    return cluster_tree_from_forest(samples, quickshift(samples, model, tau));
}

}  // namespace modeforest
