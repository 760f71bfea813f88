#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "nsais/cli.hpp"
#include "nsais/model_io.hpp"

namespace nsais::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string AbstractionChoice::label() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::memory: return "memory";
        case Kind::info_state: return "info-state";
        case Kind::quantized: os << "quantized(gamma=" << gamma << ")"; return os.str();
        case Kind::data: os << "data(k=" << k << ")"; return os.str();
    }
    return "unknown";
}

AbstractionChoice abstraction_from_json(const json& j) {
    AbstractionChoice c;
    std::string type;
    if (j.is_string()) {
        type = j.get<std::string>();
    } else if (j.is_object()) {
        type = j.at("type").get<std::string>();
    } else {
        throw SchemaError("abstraction must be a string or an object");
    }
    if (type == "memory") {
        c.kind = AbstractionChoice::Kind::memory;
    } else if (type == "info-state" || type == "info_state") {
        c.kind = AbstractionChoice::Kind::info_state;
    } else if (type == "quantized") {
        c.kind = AbstractionChoice::Kind::quantized;
        if (j.is_object()) {
            c.gamma = j.value("gamma", 0.0);
            if (c.gamma < 0) throw SchemaError("gamma must be nonnegative");
            if (j.contains("include_y0")) c.include_y0 = j.at("include_y0").get<bool>();
        }
    } else if (type == "data" || type == "data-driven") {
        c.kind = AbstractionChoice::Kind::data;
        if (j.is_object()) {
            c.k = j.value("k", 1);
            if (c.k < 1) throw SchemaError("k must be at least 1");
            c.dataset = j.value("dataset", json{{"exhaustive", true}});
        } else {
            c.dataset = {{"exhaustive", true}};
        }
    } else {
        throw SchemaError("unknown abstraction type '" + type + "'");
    }
    return c;
}

RunConfig load_run_config(const std::string& command, const std::string& path) {
    RunConfig cfg;
    cfg.command = command;
    cfg.config_path = path;
    cfg.raw = read_json_file(path);
    try {
        if (!cfg.raw.is_object()) throw SchemaError("config must be a JSON object");
        if (!cfg.raw.contains("env")) throw SchemaError("config needs an 'env' entry");
        json env = cfg.raw.at("env");
        if (env.is_string()) {
            fs::path p = fs::path(path).parent_path() / env.get<std::string>();
            env = read_json_file(p.string());
        }
        try {
            cfg.env = environment_from_json(env);
        } catch (const ModelTooLarge&) {
            throw;
        } catch (const SchemaError&) {
            throw;
        } catch (const Error& e) {
            throw SchemaError(std::string("env: ") + e.what());
        }
        cfg.abstraction = abstraction_from_json(cfg.raw.value("abstraction", json("info-state")));
        if (cfg.raw.contains("compare")) {
            const json& c = cfg.raw.at("compare");
            cfg.compare_a = abstraction_from_json(c.at("a"));
            cfg.compare_b = abstraction_from_json(c.at("b"));
        }
        if (cfg.raw.contains("simulate")) {
            const auto n = cfg.raw.at("simulate").value("count", 100);
            if (n < 1) throw SchemaError("simulate.count must be at least 1");
            cfg.rollouts = static_cast<std::size_t>(n);
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("config: ") + e.what());
    }
    return cfg;
}

QuantizationGrid grid_for(const Environment& env, double gamma) {
    if (env.wall) return wall_defense_grid(env.model, *env.wall);
    if (env.pursuit) return pursuit_grid(env.model, *env.pursuit, gamma);
    return uniform_grid(env.model, gamma);
}

TrajectoryDataset dataset_for(const Environment& env, const json& spec, std::uint64_t seed,
                              std::size_t budget, const std::string& base_dir) {
    try {
        if (spec.value("exhaustive", false)) return generate_exhaustive_dataset(env.model, budget);
        if (spec.contains("path")) {
            fs::path p = fs::path(base_dir) / spec.at("path").get<std::string>();
            std::ifstream in(p);
            if (!in) throw SchemaError("cannot open dataset " + p.string());
            return read_dataset_ndjson(env.model, in);
        }
        ExplorationSpec ex;
        const std::string kind = spec.value("exploration", std::string("uniform"));
        if (kind == "uniform")
            ex.kind = Exploration::uniform;
        else if (kind == "round-robin" || kind == "round_robin")
            ex.kind = Exploration::round_robin;
        else
            throw SchemaError("unknown exploration '" + kind + "'");
        const long n = spec.value("count", 1000L);
        if (n < 1) throw SchemaError("dataset count must be at least 1");
        return generate_dataset(env.model, ex, static_cast<std::size_t>(n), seed);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("dataset: ") + e.what());
    }
}

namespace {
double since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}
}  // namespace

Solved solve_choice(const RunConfig& cfg, const AbstractionChoice& choice) {
    const SystemModel& sys = cfg.env.model;
    const auto start = std::chrono::steady_clock::now();
    Solved s;
    s.choice = choice;
    switch (choice.kind) {
        case AbstractionChoice::Kind::memory:
            s.abstraction = build_memory_abstraction(sys, cfg.budget);
            s.solution = solve_abstraction_dp(s.abstraction, sys.criterion(), "memory");
            break;
        case AbstractionChoice::Kind::info_state:
            s.abstraction = build_info_state_abstraction(sys, cfg.budget);
            s.solution = solve_abstraction_dp(s.abstraction, sys.criterion(), "info-state");
            break;
        case AbstractionChoice::Kind::quantized: {
            const bool y0 = choice.include_y0.value_or(cfg.env.wall.has_value());
            std::ostringstream os;
            if (cfg.env.wall)
                os << "quantized(wall cells";
            else
                os << "quantized(gamma=" << choice.gamma;
            os << (y0 ? ", y0)" : ")");
            s.label = os.str();
            s.abstraction = build_quantized_abstraction(sys, grid_for(cfg.env, choice.gamma), y0, cfg.budget);
            s.solution = solve_abstraction_dp(s.abstraction, sys.criterion(), "approximate");
            break;
        }
        case AbstractionChoice::Kind::data: {
            const std::string base = fs::path(cfg.config_path).parent_path().string();
            const TrajectoryDataset d = dataset_for(cfg.env, choice.dataset, cfg.seed, cfg.budget, base);
            const EmpiricalRangeModel m = build_empirical_ranges(d, choice.k);
            s.abstraction = data_abstraction(m, sys);
            s.solution = solve_abstraction_dp(s.abstraction, sys.criterion(), "data-driven");
            break;
        }
    }
    if (s.label.empty()) s.label = choice.label();
    s.runtime_ms = since(start);
    return s;
}

double alpha0_of(const RunConfig& cfg, const Solved& s) {
    using K = AbstractionChoice::Kind;
    if (s.choice.kind == K::memory || s.choice.kind == K::info_state) return 0.0;
    try {
        const EpsDelta m = empirical_eps_delta(cfg.env.model, s.abstraction, cfg.budget);
        const auto lips = verify_value_lipschitz(s.solution.values, s.abstraction);
        return alpha_bound(m.eps, m.delta, next_value_lipschitz(lips), cfg.env.model.criterion()).at(0);
    } catch (const ModelTooLarge&) {
        throw;
    } catch (const Error&) {
        return std::nan("");
    }
}

void write_atomic(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, p);
}

}  // namespace nsais::cli
