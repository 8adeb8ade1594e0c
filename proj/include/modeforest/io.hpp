#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "modeforest/cluster_tree.hpp"
#include "modeforest/modal_regression.hpp"
#include "modeforest/point_set.hpp"
#include "modeforest/quickshift.hpp"

namespace modeforest::io {

/// Input error carrying the 1-based line number of the offending CSV row.
class CsvError : public std::invalid_argument {
public:
    CsvError(std::size_t line, const std::string& message)
        : std::invalid_argument("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct CsvOptions {
    bool header = false;  // when set, the first row is skipped
};

namespace detail {

inline double parse_field(const std::string& field, std::size_t line) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || begin == end) {
        throw CsvError(line, "cannot parse numeric field '" + field + "'");
    }
    if (!std::isfinite(value)) {
        throw CsvError(line, "non-finite value '" + field + "'");
    }
    return value;
}

}  // namespace detail

/// Reads a comma-separated numeric matrix. Decimal separator is '.', no
/// quoting or sniffing; every row must have the same number of columns.
inline PointSet read_csv(std::istream& in, const CsvOptions& options = {}) {
    std::vector<double> data;
    std::size_t dim = 0;
    std::size_t line_no = 0;
    std::string line;
    bool skip_next = options.header;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_next) {
            skip_next = false;
            continue;
        }
        if (line.empty() || line == "\r") continue;
        std::size_t cols = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string field =
                line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            data.push_back(detail::parse_field(field, line_no));
            ++cols;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (dim == 0) {
            dim = cols;
        } else if (cols != dim) {
            throw CsvError(line_no, "expected " + std::to_string(dim) + " columns, got " +
                                        std::to_string(cols));
        }
    }
    if (data.empty()) {
        throw std::invalid_argument("csv: no data rows");
    }
    return PointSet(std::move(data), dim);
}

inline PointSet read_csv_file(const std::string& path, const CsvOptions& options = {}) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open file: " + path);
    }
    return read_csv(in, options);
}

/// Single-column file of density values, one per sample row.
inline std::vector<double> read_density_file(const std::string& path) {
    const PointSet column = read_csv_file(path);
    if (column.dim() != 1) {
        throw std::invalid_argument("density file must have exactly one column");
    }
    return column.data();
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------
// JSON has no infinities, so tau = inf serializes as the string "inf" and a
// never-merged merge height as the string "-inf".

inline nlohmann::json tau_to_json(double tau) {
    if (std::isinf(tau)) return "inf";
    return tau;
}

inline double tau_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw std::invalid_argument("json: invalid tau string");
    }
    return j.get<double>();
}

struct ForestDocument {
    QuickShiftForest forest;
    std::size_t dim = 1;
    double bandwidth = 1.0;
    std::string kernel_name = "gaussian";
};

inline nlohmann::json forest_to_json(const QuickShiftForest& forest, std::size_t dim,
                                     double bandwidth, const std::string& kernel_name) {
    nlohmann::json j;
    j["n"] = forest.size();
    j["d"] = dim;
    j["h"] = bandwidth;
    j["tau"] = tau_to_json(forest.tau());
    j["kernel"] = kernel_name;
    nlohmann::json parents = nlohmann::json::array();
    for (std::size_t i = 0; i < forest.size(); ++i) {
        if (const auto p = forest.parent(i)) {
            parents.push_back(*p);
        } else {
            parents.push_back(nullptr);
        }
    }
    j["parents"] = std::move(parents);
    j["density"] = forest.densities();
    j["roots"] = forest.roots();
    j["assignments"] = assignments(forest);
    return j;
}

/// Rebuilds the forest structure from its JSON document. Edge lengths are
/// not serialized; they are irrelevant to equality (parents + densities +
/// tau define the forest).
inline ForestDocument forest_from_json(const nlohmann::json& j) {
    ForestDocument doc;
    doc.dim = j.at("d").get<std::size_t>();
    doc.bandwidth = j.at("h").get<double>();
    doc.kernel_name = j.at("kernel").get<std::string>();
    const double tau = tau_from_json(j.at("tau"));
    const auto& parents_json = j.at("parents");
    const auto density = j.at("density").get<std::vector<double>>();
    if (parents_json.size() != density.size()) {
        throw std::invalid_argument("json: parents and density lengths differ");
    }
    std::vector<std::ptrdiff_t> parents;
    parents.reserve(parents_json.size());
    for (const auto& p : parents_json) {
        parents.push_back(p.is_null() ? QuickShiftForest::no_parent
                                      : static_cast<std::ptrdiff_t>(p.get<std::size_t>()));
    }
    std::vector<double> edges(parents.size(), 0.0);
    doc.forest = QuickShiftForest(std::move(parents), density, std::move(edges), tau);
    return doc;
}

inline nlohmann::json tree_to_json(const ClusterTree& tree) {
    nlohmann::json j;
    j["tau"] = tau_to_json(tree.tau());
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& lc : tree.materialize()) {
        levels.push_back({{"level", lc.level}, {"components", lc.components}});
    }
    j["levels"] = std::move(levels);
    return j;
}

struct TreeDocument {
    double tau = 0.0;
    std::vector<LevelComponents> levels;
};

inline TreeDocument tree_from_json(const nlohmann::json& j) {
    TreeDocument doc;
    doc.tau = tau_from_json(j.at("tau"));
    for (const auto& level : j.at("levels")) {
        LevelComponents lc;
        lc.level = level.at("level").get<double>();
        lc.components = level.at("components").get<std::vector<std::vector<std::size_t>>>();
        doc.levels.push_back(std::move(lc));
    }
    return doc;
}

inline nlohmann::json modal_result_to_json(const ConditionalModeResult& result) {
    return {{"x", result.query}, {"modes", result.mode_estimates}};
}

}  // namespace modeforest::io
