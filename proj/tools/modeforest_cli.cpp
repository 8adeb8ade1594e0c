// modeforest command line: CSV in, JSON out, for each pipeline stage plus
// the acceptance bench. Exit codes: 0 ok, 2 input error, 3 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modeforest/acceptance.hpp"
#include "modeforest/modeforest.hpp"

namespace {

using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_input_error = 2;
constexpr int exit_internal_error = 3;

double parse_tau(const std::string& text) {
    if (text == "inf" || text == "infinity") {
        return std::numeric_limits<double>::infinity();
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse --tau value '" + text + "'");
    }
}

void emit(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
        out << text;
    }
}

/// Shared input options: a CSV file or a named catalog draw.
struct InputSpec {
    std::string csv_path;
    std::string catalog_name;
    std::size_t catalog_n = 400;
    std::uint64_t catalog_seed = 1;
    bool header = false;

    modeforest::PointSet load() const {
        if (!catalog_name.empty()) {
            return modeforest::synthetic::catalog_density(catalog_name)
                .sample(catalog_n, catalog_seed);
        }
        if (csv_path.empty()) {
            throw std::invalid_argument("provide an input CSV or --catalog NAME");
        }
        return modeforest::io::read_csv_file(csv_path, {header});
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("input", csv_path, "input CSV (n rows x d numeric columns)");
        cmd->add_flag("--header", header, "first CSV row is a header");
        cmd->add_option("--catalog", catalog_name, "draw input from a named catalog density");
        cmd->add_option("--n", catalog_n, "catalog draw size")->default_val(400);
        cmd->add_option("--seed", catalog_seed, "catalog draw seed")->default_val(1);
    }
};

int cmd_quickshift(const InputSpec& input, double h, const std::string& tau_text,
                   const std::string& kernel_name, const std::string& density_file,
                   bool verify_run, const std::string& out_path) {
    const modeforest::PointSet samples = input.load();
    const double tau = parse_tau(tau_text);
    if (!(tau > 0.0)) throw std::invalid_argument("--tau must be positive");
    const modeforest::Kernel kernel(modeforest::kernel_shape_from_string(kernel_name));

    std::vector<double> density;
    if (!density_file.empty()) {
        density = modeforest::io::read_density_file(density_file);
        if (density.size() != samples.size()) {
            throw std::invalid_argument("--density-file row count does not match input");
        }
    } else {
        const modeforest::DensityModel model(kernel, h, static_cast<int>(samples.dim()));
        density = modeforest::kde_self_evaluate(model, samples);
    }

    const auto forest = modeforest::build_forest(samples, density, tau);

    if (verify_run) {
        if (density_file.empty()) {
            const modeforest::DensityModel model(kernel, h, static_cast<int>(samples.dim()));
            const auto reference = modeforest::verify::naive_kde(model, samples, samples);
            for (std::size_t i = 0; i < density.size(); ++i) {
                if (std::abs(density[i] - reference[i]) > 1e-12) {
                    throw modeforest::internal_error("verify: kde mismatch at sample " +
                                                     std::to_string(i));
                }
            }
        }
        const std::string violation =
            modeforest::verify::check_forest_invariants(forest, samples, density);
        if (!violation.empty()) {
            throw modeforest::internal_error("verify: " + violation);
        }
    }

    emit(modeforest::io::forest_to_json(forest, samples.dim(), h, kernel_name), out_path);
    return exit_ok;
}

int cmd_tree(const InputSpec& input, double h, const std::string& tau_text,
             const std::string& kernel_name, const std::vector<std::string>& merge_pairs,
             bool verify_run, const std::string& out_path) {
    const modeforest::PointSet samples = input.load();
    const double tau = parse_tau(tau_text);
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("--tau must be positive and finite for tree");
    }
    const modeforest::Kernel kernel(modeforest::kernel_shape_from_string(kernel_name));
    const modeforest::DensityModel model(kernel, h, static_cast<int>(samples.dim()));
    const auto tree = modeforest::cluster_tree(samples, model, tau);

    if (verify_run) {
        // Replay each materialized level through the definition-literal
        // composition and the naive linking oracle.
        const auto levels = tree.materialize();
        for (const auto& lc : levels) {
            const auto expected =
                modeforest::estimated_components(tree.forest(), samples, lc.level, tau);
            if (expected.components != lc.components) {
                throw modeforest::internal_error("verify: level components mismatch");
            }
            const auto pre_link = modeforest::level_subgraph(tree.forest(), lc.level);
            if (modeforest::verify::naive_components(samples, pre_link.components, tau) !=
                lc.components) {
                throw modeforest::internal_error("verify: naive link oracle mismatch");
            }
        }
    }

    json j = modeforest::io::tree_to_json(tree);
    if (!merge_pairs.empty()) {
        json heights = json::array();
        for (const auto& text : merge_pairs) {
            const auto comma = text.find(',');
            if (comma == std::string::npos) {
                throw std::invalid_argument("--merge expects i,j");
            }
            const std::size_t i = std::stoull(text.substr(0, comma));
            const std::size_t k = std::stoull(text.substr(comma + 1));
            const double height = tree.merge_height(i, k);
            json entry = {{"i", i}, {"j", k}};
            if (std::isinf(height) && height < 0.0) {
                entry["level"] = "-inf";
            } else {
                entry["level"] = height;
            }
            heights.push_back(std::move(entry));
        }
        j["merge_heights"] = std::move(heights);
    }
    emit(j, out_path);
    return exit_ok;
}

int cmd_modalreg(const InputSpec& input, double h, const std::string& tau_text,
                 const std::string& kernel_name, const std::string& query_file,
                 const std::string& out_path) {
    const modeforest::PointSet data = input.load();
    const double tau = parse_tau(tau_text);
    const modeforest::Kernel kernel(modeforest::kernel_shape_from_string(kernel_name));
    const modeforest::DensityModel model(kernel, h, static_cast<int>(data.dim()));

    modeforest::PointSet queries;
    if (data.dim() == 1) {
        // d = 0 regression: one empty query.
        queries = modeforest::PointSet(std::vector<double>{}, 1);
        const auto result = modeforest::modal_regression(data, model, tau, {});
        emit(json::array({modeforest::io::modal_result_to_json(result)}), out_path);
        return exit_ok;
    }
    if (query_file.empty()) {
        throw std::invalid_argument("--query-file is required when data has predictors");
    }
    queries = modeforest::io::read_csv_file(query_file);
    if (queries.dim() + 1 != data.dim()) {
        throw std::invalid_argument("query dimension must be data dimension - 1");
    }
    const auto results = modeforest::modal_regression_batch(data, model, tau, queries);
    json out = json::array();
    for (const auto& result : results) {
        out.push_back(modeforest::io::modal_result_to_json(result));
    }
    emit(out, out_path);
    return exit_ok;
}

int cmd_bench(const std::string& suite, std::size_t seeds, const std::string& cli_path,
              const std::string& out_path) {
    modeforest::acceptance::Options options;
    options.seeds = seeds;
    options.cli_path = cli_path;
    const auto results = modeforest::acceptance::run_suite(suite, options);

    json criteria = json::array();
    bool all_pass = true;
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        criteria.push_back({{"id", r.id},
                            {"name", r.name},
                            {"pass", r.pass},
                            {"detail", r.detail},
                            {"seconds", r.seconds}});
        std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << " — "
                  << r.detail << "\n";
    }
    emit(json{{"suite", suite}, {"seeds", seeds}, {"criteria", criteria}, {"all_pass", all_pass}},
         out_path);
    return all_pass ? exit_ok : 1;
}

int cmd_catalog() {
    for (const auto& entry : modeforest::synthetic::catalog()) {
        std::cout << entry.name << " (d=" << entry.density.dim() << "): " << entry.description
                  << "\n";
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"modeforest: Quick Shift mode seeking, cluster trees, modal regression"};
    app.require_subcommand(1);
    // The bandwidth flag is --h, so help stays long-form only.
    app.set_help_flag("--help", "print help");

    // quickshift
    auto* qs = app.add_subcommand("quickshift", "build the Quick Shift forest");
    qs->set_help_flag("--help", "print help");
    InputSpec qs_input;
    qs_input.attach(qs);
    double qs_h = 1.0;
    std::string qs_tau = "inf", qs_kernel = "gaussian", qs_density_file, qs_out;
    bool qs_verify = false;
    qs->add_option("--h", qs_h, "KDE bandwidth")->default_val(1.0);
    qs->add_option("--tau", qs_tau, "segmentation radius (number or 'inf')")->default_val("inf");
    qs->add_option("--kernel", qs_kernel, "kernel shape")->default_val("gaussian");
    qs->add_option("--density-file", qs_density_file,
                   "single-column CSV overriding the KDE densities");
    qs->add_flag("--verify", qs_verify, "replay brute-force oracles before emitting");
    qs->add_option("--out", qs_out, "output path (default stdout)");

    // tree
    auto* tr = app.add_subcommand("tree", "estimate the cluster tree");
    tr->set_help_flag("--help", "print help");
    InputSpec tr_input;
    tr_input.attach(tr);
    double tr_h = 1.0;
    std::string tr_tau = "1", tr_kernel = "gaussian", tr_out;
    std::vector<std::string> tr_merges;
    bool tr_verify = false;
    tr->add_option("--h", tr_h, "KDE bandwidth")->default_val(1.0);
    tr->add_option("--tau", tr_tau, "linking radius")->default_val("1");
    tr->add_option("--kernel", tr_kernel, "kernel shape")->default_val("gaussian");
    tr->add_option("--merge", tr_merges, "sample pair i,j to report merge height for");
    tr->add_flag("--verify", tr_verify, "replay linking oracles before emitting");
    tr->add_option("--out", tr_out, "output path (default stdout)");

    // modalreg
    auto* mr = app.add_subcommand("modalreg", "conditional mode estimates per query");
    mr->set_help_flag("--help", "print help");
    InputSpec mr_input;
    mr_input.attach(mr);
    double mr_h = 1.0;
    std::string mr_tau = "0.5", mr_kernel = "gaussian", mr_query_file, mr_out;
    mr->add_option("--h", mr_h, "joint KDE bandwidth")->default_val(1.0);
    mr->add_option("--tau", mr_tau, "segmentation radius on the response axis")->default_val("0.5");
    mr->add_option("--kernel", mr_kernel, "kernel shape")->default_val("gaussian");
    mr->add_option("--query-file", mr_query_file, "CSV of query rows (d columns)");
    mr->add_option("--out", mr_out, "output path (default stdout)");

    // bench
    auto* be = app.add_subcommand("bench", "run the acceptance experiment suite");
    be->set_help_flag("--help", "print help");
    std::string be_suite = "full", be_out;
    std::size_t be_seeds = 20;
    be->add_option("--suite", be_suite, "suite name (see --help-suites)")->default_val("full");
    be->add_option("--seeds", be_seeds, "seed count for the statistical experiments")
        ->default_val(20);
    be->add_option("--out", be_out, "report path (default stdout)");

    // catalog
    auto* ca = app.add_subcommand("catalog", "list the synthetic ground-truth densities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input_error;
    }

    try {
        if (qs->parsed()) {
            return cmd_quickshift(qs_input, qs_h, qs_tau, qs_kernel, qs_density_file, qs_verify,
                                  qs_out);
        }
        if (tr->parsed()) {
            return cmd_tree(tr_input, tr_h, tr_tau, tr_kernel, tr_merges, tr_verify, tr_out);
        }
        if (mr->parsed()) {
            return cmd_modalreg(mr_input, mr_h, mr_tau, mr_kernel, mr_query_file, mr_out);
        }
        if (be->parsed()) {
            return cmd_bench(be_suite, be_seeds, argv[0], be_out);
        }
        if (ca->parsed()) {
            return cmd_catalog();
        }
    } catch (const modeforest::internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal_error;
    }
    return exit_ok;
}
