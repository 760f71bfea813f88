#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nsais/cli.hpp"
#include "nsais/model_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBinary = NSAIS_BINARY;
const fs::path kConfigs = NSAIS_CONFIG_DIR;
const fs::path kFixtures = NSAIS_FIXTURE_DIR;

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("nsais_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run_cli(const std::string& args, const fs::path& out) {
    const std::string cmd = kBinary + " " + args + " --out " + out.string() + " > " +
                            (out / "stdout.txt").string() + " 2> " + (out / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

// Drops every key ending in runtime_ms, recursively.
json without_runtimes(json j) {
    if (j.is_object()) {
        json out = json::object();
        for (auto& [k, v] : j.items())
            if (k.size() < 10 || k.substr(k.size() - 10) != "runtime_ms") out[k] = without_runtimes(v);
        return out;
    }
    if (j.is_array())
        for (auto& v : j) v = without_runtimes(v);
    return j;
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST(Cli, SolvesToy) {
    const auto out = fresh_dir("toy");
    ASSERT_EQ(run_cli("solve --config " + (kConfigs / "toy.json").string(), out), 0) << slurp(out / "stderr.txt");
    const json s = load(out / "solution.json");
    EXPECT_EQ(s.at("value").get<double>(), 0.0);
    EXPECT_EQ(s.at("env"), "model");
    EXPECT_NE(slurp(out / "stdout.txt").find("value 0"), std::string::npos);
}

TEST(Cli, SchemaErrorsExitTwo) {
    const auto out = fresh_dir("schema");
    EXPECT_EQ(run_cli("solve --config " + (kFixtures / "invalid.json").string(), out), 2);
    EXPECT_EQ(run_cli("solve --config " + (kFixtures / "unknown_rule.json").string(), out), 2);
    EXPECT_EQ(run_cli("solve --config " + (out / "missing.json").string(), out), 2);
    EXPECT_EQ(run_cli("solve", out), 2);
    EXPECT_EQ(run_cli("frobnicate --config " + (kConfigs / "toy.json").string(), out), 2);
    EXPECT_FALSE(fs::exists(out / "solution.json"));
}

TEST(Cli, BudgetExitsThree) {
    const auto out = fresh_dir("budget");
    EXPECT_EQ(run_cli("solve --budget 1 --config " + (kFixtures / "compare_same.json").string(), out), 3);
    EXPECT_NE(slurp(out / "stderr.txt").find("exceeds budget 1"), std::string::npos);
}

TEST(Cli, BoundViolationExitsFour) {
    const auto out = fresh_dir("violation");
    EXPECT_EQ(run_cli("verify-bounds --config " + (kFixtures / "bounds_corrupted.json").string(), out), 4);
    EXPECT_TRUE(load(out / "bounds.json").at("violation").get<bool>());
}

TEST(Cli, VerifyBoundsHoldsOnPartialModel) {
    const auto out = fresh_dir("verify");
    ASSERT_EQ(run_cli("verify-bounds --config " + (kFixtures / "bounds_ok.json").string(), out), 0)
        << slurp(out / "stderr.txt");
    const json b = load(out / "bounds.json");
    EXPECT_FALSE(b.at("violation").get<bool>());
    EXPECT_EQ(b.at("reports").size(), 3u);
    for (const char* g : {"gamma_0", "gamma_1", "gamma_2"}) EXPECT_TRUE(fs::exists(out / (std::string("bounds_") + g + ".csv")));
}

TEST(Cli, OutputsAreDeterministic) {
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
    const std::string cfg = " --seed 9 --config " + (kFixtures / "compare_same.json").string();
    for (const auto& dir : {a, b}) {
        ASSERT_EQ(run_cli("solve" + cfg, dir), 0);
        ASSERT_EQ(run_cli("simulate" + cfg, dir), 0);
        ASSERT_EQ(run_cli("learn-ranges" + cfg, dir), 0);
    }
    for (const char* f : {"solution.json", "simulate_summary.json", "learn_summary.json", "ranges.json"})
        EXPECT_EQ(without_runtimes(load(a / f)), without_runtimes(load(b / f))) << f;
    for (const char* f : {"rollouts.csv", "dataset.ndjson"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;

    const auto c = fresh_dir("det_c");
    ASSERT_EQ(run_cli("simulate --jobs 3" + cfg, c), 0);
    EXPECT_EQ(slurp(a / "rollouts.csv"), slurp(c / "rollouts.csv"));
}

TEST(Cli, CompareOfExactAbstractionsHasNoGap) {
    const auto out = fresh_dir("compare");
    ASSERT_EQ(run_cli("compare --config " + (kFixtures / "compare_same.json").string(), out), 0)
        << slurp(out / "stderr.txt");
    const auto rows = csv_rows(out / "compare.csv");
    ASSERT_GE(rows.size(), 2u);
    EXPECT_EQ(rows[0].size(), 10u);
    EXPECT_EQ(rows[0][9], "gap_le_2alpha0");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][1], rows[i][2]);
        EXPECT_EQ(rows[i][3], rows[i][4]);
        EXPECT_EQ(rows[i][7], "0");
        EXPECT_EQ(rows[i][8], "0");
        EXPECT_EQ(rows[i][9], "true");
    }
    EXPECT_TRUE(load(out / "compare_summary.json").at("all_gaps_within_2alpha0").get<bool>());
}

TEST(Cli, SolutionJsonMatchesLibrary) {
    const auto out = fresh_dir("solution");
    const fs::path cfg = kFixtures / "compare_same.json";
    ASSERT_EQ(run_cli("solve --config " + cfg.string(), out), 0);
    const json s = load(out / "solution.json");
    const auto rc = nsais::cli::load_run_config("solve", cfg.string());
    const auto solved = nsais::cli::solve_choice(rc, rc.abstraction);
    EXPECT_EQ(s.at("value").get<double>(), solved.solution.value);
    EXPECT_EQ(s.at("abstraction_label"), solved.label);
}

TEST(Cli, ReportSummarizesArtifacts) {
    const auto out = fresh_dir("report");
    const std::string cfg = " --config " + (kFixtures / "compare_same.json").string();
    ASSERT_EQ(run_cli("solve" + cfg, out), 0);
    ASSERT_EQ(run_cli("compare" + cfg, out), 0);
    ASSERT_EQ(run_cli("report", out), 0) << slurp(out / "stderr.txt");
    const std::string md = slurp(out / "report.md");
    EXPECT_FALSE(md.empty());
    EXPECT_NE(md.find("## Compare"), std::string::npos);
}
