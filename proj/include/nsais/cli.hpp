#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsais/datadriven.hpp"
#include "nsais/envs.hpp"
#include "nsais/quantize.hpp"

namespace nsais::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kSchema = 2,
    kTooLarge = 3,
    kBoundViolation = 4,
};

// Which abstraction a command solves with.
struct AbstractionChoice {
    enum class Kind { memory, info_state, quantized, data };
    Kind kind = Kind::info_state;
    double gamma = 0.0;
    std::optional<bool> include_y0;  // quantized; default: on for wall defense only
    int k = 1;                       // data
    nlohmann::json dataset;          // data: {"exhaustive": true} or exploration settings or {"path": ...}

    std::string label() const;
};

AbstractionChoice abstraction_from_json(const nlohmann::json& j);

struct RunConfig {
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::size_t budget = kDefaultBudget;
    unsigned jobs = 1;

    nlohmann::json raw;  // the parsed config file
    Environment env;
    AbstractionChoice abstraction;
    std::optional<AbstractionChoice> compare_a, compare_b;
    std::size_t rollouts = 100;
};

// Reads and validates the config file; SchemaError on any problem.
RunConfig load_run_config(const std::string& command, const std::string& path);

// A solved abstraction plus what the commands report about it.
struct Solved {
    AbstractionChoice choice;
    InfoAbstraction abstraction;
    Solution solution;
    std::string label;
    double runtime_ms = 0.0;  // abstraction construction plus DP
};

QuantizationGrid grid_for(const Environment& env, double gamma);
TrajectoryDataset dataset_for(const Environment& env, const nlohmann::json& spec,
                              std::uint64_t seed, std::size_t budget, const std::string& base_dir);
Solved solve_choice(const RunConfig& cfg, const AbstractionChoice& choice);

// alpha_0 of an abstraction from measured eps, delta and L_Vhat; 0 for exact ones.
double alpha0_of(const RunConfig& cfg, const Solved& s);

int cmd_solve(const RunConfig& cfg);
int cmd_verify_bounds(const RunConfig& cfg);
int cmd_compare(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_learn_ranges(const RunConfig& cfg);
int cmd_report(const RunConfig& cfg);

// Writes to a temporary file beside path, then renames it into place.
void write_atomic(const std::string& path, const std::string& content);

// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace nsais::cli
