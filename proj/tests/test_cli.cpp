#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "modeforest/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

const std::string& cli_path() {
    static const std::string path = [] {
        const char* env = std::getenv("MODEFOREST_CLI");
        return std::string(env ? env : "");
    }();
    return path;
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "modeforest-cli-tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out_file = scratch_dir() / ("stdout." + std::to_string(counter));
    const fs::path err_file = scratch_dir() / ("stderr." + std::to_string(counter));
    ++counter;
    const std::string command = "\"" + cli_path() + "\" " + args + " > \"" + out_file.string() +
                                "\" 2> \"" + err_file.string() + "\"";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

}  // namespace

TEST_CASE("cli: quickshift with an injected density file") {
    REQUIRE_FALSE(cli_path().empty());
    const fs::path csv = scratch_dir() / "three.csv";
    const fs::path density = scratch_dir() / "three_density.csv";
    spit(csv, "0\n1\n3\n");
    spit(density, "0.5\n0.9\n0.7\n");

    const auto result = run_cli("quickshift \"" + csv.string() + "\" --density-file \"" +
                                density.string() + "\" --tau 1.5");
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    CHECK(j.at("n") == 3);
    CHECK(j.at("parents")[0] == 1);
    CHECK(j.at("parents")[1].is_null());
    CHECK(j.at("parents")[2].is_null());
    CHECK(j.at("roots").get<std::vector<int>>() == std::vector<int>{1, 2});
}

TEST_CASE("cli: tau inf collapses to one root") {
    const auto result =
        run_cli("quickshift --catalog two-gaussian-10sep --n 100 --seed 3 --h 0.5 --tau inf");
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    CHECK(j.at("tau") == "inf");
    CHECK(j.at("roots").size() == 1);
}

TEST_CASE("cli: catalog dataset recovers both clusters") {
    const auto result =
        run_cli("quickshift --catalog two-gaussian-10sep --n 400 --seed 7 --h 0.5 --tau 1 --verify");
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    CHECK(j.at("roots").size() == 2);
}

TEST_CASE("cli: input errors exit with code 2") {
    SECTION("unparseable csv reports the line") {
        const fs::path csv = scratch_dir() / "bad.csv";
        spit(csv, "1.0\nnot-a-number\n");
        const auto result = run_cli("quickshift \"" + csv.string() + "\" --h 1 --tau 1");
        CHECK(result.exit_code == 2);
        CHECK(result.err.find("line 2") != std::string::npos);
    }
    SECTION("non-finite values are rejected") {
        const fs::path csv = scratch_dir() / "inf.csv";
        spit(csv, "1.0\ninf\n");
        CHECK(run_cli("quickshift \"" + csv.string() + "\" --h 1 --tau 1").exit_code == 2);
    }
    SECTION("nonpositive bandwidth or tau") {
        const fs::path csv = scratch_dir() / "ok.csv";
        spit(csv, "1.0\n2.0\n");
        CHECK(run_cli("quickshift \"" + csv.string() + "\" --h 0 --tau 1").exit_code == 2);
        CHECK(run_cli("quickshift \"" + csv.string() + "\" --h 1 --tau -2").exit_code == 2);
    }
    SECTION("empty file") {
        const fs::path csv = scratch_dir() / "empty.csv";
        spit(csv, "");
        CHECK(run_cli("tree \"" + csv.string() + "\" --h 1 --tau 1").exit_code == 2);
    }
    SECTION("missing input") {
        CHECK(run_cli("quickshift --h 1 --tau 1").exit_code == 2);
    }
    SECTION("unknown flag") {
        CHECK(run_cli("quickshift --frobnicate 3").exit_code == 2);
    }
}

TEST_CASE("cli: tree on a single point emits one level") {
    const fs::path csv = scratch_dir() / "one.csv";
    spit(csv, "2.5\n");
    const auto result = run_cli("tree \"" + csv.string() + "\" --h 1 --tau 1 --verify");
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    REQUIRE(j.at("levels").size() == 1);
    CHECK(j.at("levels")[0].at("components").size() == 1);
}

TEST_CASE("cli: tree merge heights include the never-merged sentinel") {
    const fs::path csv = scratch_dir() / "far.csv";
    spit(csv, "0.0\n100.0\n");
    const auto result =
        run_cli("tree \"" + csv.string() + "\" --h 1 --tau 1 --merge 0,1 --merge 0,0");
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    REQUIRE(j.contains("merge_heights"));
    CHECK(j.at("merge_heights")[0].at("level") == "-inf");
    CHECK(j.at("merge_heights")[1].at("level").is_number());
}

TEST_CASE("cli: modal regression") {
    SECTION("single data point returns its y") {
        const fs::path csv = scratch_dir() / "pair.csv";
        const fs::path queries = scratch_dir() / "queries.csv";
        spit(csv, "0.3,1.7\n");
        spit(queries, "0.0\n");
        const auto result = run_cli("modalreg \"" + csv.string() + "\" --query-file \"" +
                                    queries.string() + "\" --h 0.5 --tau 0.5");
        REQUIRE(result.exit_code == 0);
        const json j = json::parse(result.out);
        REQUIRE(j.is_array());
        CHECK(j[0].at("modes").get<std::vector<double>>() == std::vector<double>{1.7});
    }
    SECTION("query dimension mismatch exits 2") {
        const fs::path csv = scratch_dir() / "pairs2.csv";
        const fs::path queries = scratch_dir() / "queries2.csv";
        spit(csv, "0.3,1.7\n0.4,1.2\n");
        spit(queries, "0.0,0.0\n");
        CHECK(run_cli("modalreg \"" + csv.string() + "\" --query-file \"" + queries.string() +
                      "\" --h 0.5 --tau 0.5")
                  .exit_code == 2);
    }
}

TEST_CASE("cli: bench") {
    SECTION("unknown suite exits 2") {
        CHECK(run_cli("bench --suite no-such-suite").exit_code == 2);
    }
    SECTION("single-seed separation suite runs and reports") {
        const auto result = run_cli("bench --suite separation --seeds 1");
        REQUIRE(result.exit_code == 0);
        const json j = json::parse(result.out);
        CHECK(j.at("suite") == "separation");
        CHECK(j.at("seeds") == 1);
        REQUIRE(j.at("criteria").size() == 1);
        CHECK(j.at("criteria")[0].at("pass") == true);
    }
}

TEST_CASE("cli: byte-identical output across runs and thread counts") {
    const fs::path csv = scratch_dir() / "det.csv";
    {
        const auto samples = modeforest::synthetic::catalog_density("two-gaussian-10sep")
                                 .sample(150, 2);
        std::ostringstream text;
        text.precision(17);
        for (std::size_t i = 0; i < samples.size(); ++i) text << samples[i][0] << "\n";
        spit(csv, text.str());
    }
    const fs::path out1 = scratch_dir() / "det1.json";
    const fs::path out2 = scratch_dir() / "det2.json";
    const std::string base = "quickshift \"" + csv.string() + "\" --h 0.5 --tau 1 --out ";
    REQUIRE(run_cli(base + "\"" + out1.string() + "\"").exit_code == 0);
    REQUIRE(run_cli(base + "\"" + out2.string() + "\"").exit_code == 0);
    const std::string first = slurp(out1);
    CHECK_FALSE(first.empty());
    CHECK(first == slurp(out2));

    setenv("MODEFOREST_THREADS", "4", 1);
    const fs::path out4 = scratch_dir() / "det4.json";
    REQUIRE(run_cli(base + "\"" + out4.string() + "\"").exit_code == 0);
    unsetenv("MODEFOREST_THREADS");
    CHECK(first == slurp(out4));
}

TEST_CASE("cli: catalog listing") {
    const auto result = run_cli("catalog");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("two-gaussian-10sep") != std::string::npos);
    CHECK(result.out.find("bimodal-conditional") != std::string::npos);
}
