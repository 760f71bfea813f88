#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "nsais/cli.hpp"
#include "nsais/model_io.hpp"
#include "nsais/parallel.hpp"
#include "nsais/ranges.hpp"
#include "nsais/ranges_io.hpp"

namespace nsais::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

std::string coords(const Point& p) {
    std::string s;
    for (std::size_t i = 0; i < p.dim(); ++i) s += (i ? " " : "") + num(p[i]);
    return s;
}

std::map<Index, double> initial_values(const Solved& s) {
    std::map<Index, double> out;
    for (std::size_t i = 0; i < s.abstraction.initial.size(); ++i)
        out[s.abstraction.initial[i].first] = s.solution.initial_values.at(i);
    return out;
}

}  // namespace

int cmd_solve(const RunConfig& cfg) {
    const Solved s = solve_choice(cfg, cfg.abstraction);
    json j = solution_to_json(cfg.env.model, s.abstraction, s.solution);
    j["runtime_ms"] = s.runtime_ms;
    j["env"] = cfg.env.kind;
    j["criterion"] = to_string(cfg.env.model.criterion());
    j["abstraction_label"] = s.label;
    write_atomic(out_path(cfg, "solution.json"), j.dump(2) + "\n");
    std::cout << "abstraction " << s.label << "\nvalue " << num(s.solution.value)
              << "\nrealizations " << s.abstraction.realization_count() << "\nruntime_ms "
              << num(s.runtime_ms) << "\n";
    return kOk;
}

int cmd_verify_bounds(const RunConfig& cfg) {
    const SystemModel& sys = cfg.env.model;
    std::vector<double> gammas;
    if (cfg.raw.contains("verify") && cfg.raw.at("verify").contains("gammas"))
        gammas = cfg.raw.at("verify").at("gammas").get<std::vector<double>>();
    else
        gammas = {cfg.abstraction.gamma};
    if (cfg.env.wall) gammas = {0.0};  // the wall grid is fixed by its quantized cells
    const bool y0 = cfg.abstraction.include_y0.value_or(cfg.env.wall.has_value());

    json reports = json::array();
    bool violated = false;
    for (double g : gammas) {
        if (g < 0) throw SchemaError("gamma must be nonnegative");
        BoundReport r = bound_report(sys, grid_for(cfg.env, g), y0, true, cfg.budget);
        if (cfg.raw.contains("bounds_override")) {
            const json& o = cfg.raw.at("bounds_override");
            auto take = [&](const char* key, std::vector<double>& dst) {
                if (!o.contains(key)) return;
                auto v = o.at(key).get<std::vector<double>>();
                if (v.size() != dst.size())
                    throw SchemaError(std::string("bounds_override.") + key + " has the wrong length");
                dst = std::move(v);
            };
            take("eps_formula", r.formula.eps);
            take("delta_formula", r.formula.delta);
        }
        const bool formulas = r.formulas_hold();
        const bool value_ok = !r.value_checks || r.value_checks->value_bound_holds;
        const bool regret_ok = !r.value_checks || r.value_checks->regret_bound_holds;
        violated = violated || !formulas || !value_ok || !regret_ok;

        std::ostringstream label;
        label << (cfg.env.wall ? std::string("wall") : "gamma_" + num(g));
        write_atomic(out_path(cfg, "bounds_" + label.str() + ".csv"), bound_report_csv(r));
        json j = bound_report_to_json(r);
        j["label"] = label.str();
        j["gamma_requested"] = g;
        reports.push_back(std::move(j));

        std::cout << label.str() << ": gamma_0 " << num(r.gamma.at(0)) << ", alpha_0 "
                  << num(r.alpha.at(0)) << ", measured<=formula " << (formulas ? "yes" : "NO")
                  << ", value bound " << (value_ok ? "yes" : "NO") << ", regret bound "
                  << (regret_ok ? "yes" : "NO") << "\n";
    }
    write_atomic(out_path(cfg, "bounds.json"),
                 json{{"env", cfg.env.kind}, {"reports", reports}, {"violation", violated}}.dump(2) + "\n");
    if (violated) {
        std::cerr << "bound violation: a measured quantity exceeds its theoretical bound\n";
        return kBoundViolation;
    }
    return kOk;
}

int cmd_compare(const RunConfig& cfg) {
    if (!cfg.compare_a || !cfg.compare_b) throw SchemaError("compare needs {\"compare\": {\"a\": ..., \"b\": ...}}");
    const SystemModel& sys = cfg.env.model;
    const Solved a = solve_choice(cfg, *cfg.compare_a);
    const Solved b = solve_choice(cfg, *cfg.compare_b);
    const WorstCase wa = evaluate_strategy_worst_case(sys, policy_from(a.abstraction, a.solution.strategy), cfg.budget);
    const WorstCase wb = evaluate_strategy_worst_case(sys, policy_from(b.abstraction, b.solution.strategy), cfg.budget);
    const double alpha0 = alpha0_of(cfg, b);
    const auto va = initial_values(a), vb = initial_values(b);

    std::ostringstream csv;
    csv << "init_id,value_A,value_B,worstcost_A,worstcost_B,runtime_A_ms,runtime_B_ms,alpha0,gap,"
           "gap_le_2alpha0\n";
    json rows = json::array();
    bool all_within = true;
    for (std::size_t i = 0; i < wa.per_initial.size(); ++i) {
        const auto [y0, ca] = wa.per_initial[i];
        const double cb = wb.per_initial.at(i).second;
        const double gap = std::fabs(ca - cb);
        const bool within = !std::isnan(alpha0) && approx_le(gap, 2.0 * alpha0);
        all_within = all_within && within;
        csv << y0 << ',' << num(va.at(y0)) << ',' << num(vb.at(y0)) << ',' << num(ca) << ','
            << num(cb) << ',' << num(a.runtime_ms) << ',' << num(b.runtime_ms) << ',' << num(alpha0)
            << ',' << num(gap) << ',' << (within ? "true" : "false") << '\n';
        rows.push_back({{"init_id", y0}, {"y0", to_json(sys.observations(0)[y0])}});
    }
    write_atomic(out_path(cfg, "compare.csv"), csv.str());
    auto side = [](const Solved& s, const WorstCase& w) {
        return json{{"abstraction", s.label},
                    {"realizations", s.abstraction.realization_count()},
                    {"value", s.solution.value},
                    {"worst_case", w.value},
                    {"runtime_ms", s.runtime_ms}};
    };
    json summary{{"env", cfg.env.kind},
                 {"A", side(a, wa)},
                 {"B", side(b, wb)},
                 {"alpha0", jnum(alpha0)},
                 {"initial_conditions", rows},
                 {"all_gaps_within_2alpha0", all_within}};
    write_atomic(out_path(cfg, "compare_summary.json"), summary.dump(2) + "\n");
    std::cout << "A " << a.label << ": realizations " << a.abstraction.realization_count()
              << ", worst case " << num(wa.value) << ", runtime_ms " << num(a.runtime_ms) << "\n"
              << "B " << b.label << ": realizations " << b.abstraction.realization_count()
              << ", worst case " << num(wb.value) << ", runtime_ms " << num(b.runtime_ms) << "\n"
              << "alpha0 " << num(alpha0) << ", initial conditions " << wa.per_initial.size()
              << ", all gaps within 2*alpha0: " << (all_within ? "yes" : "no") << "\n";
    return kOk;
}

int cmd_simulate(const RunConfig& cfg) {
    const SystemModel& sys = cfg.env.model;
    const Solved s = solve_choice(cfg, cfg.abstraction);
    const Policy policy = policy_from(s.abstraction, s.solution.strategy);
    const RolloutSummary r = simulate_rollouts(sys, policy, cfg.rollouts, cfg.seed, true);
    const WorstCase wc = evaluate_strategy_worst_case(sys, policy, cfg.budget);
    const TraceLayout& L = cfg.env.layout;
    const std::string other = cfg.env.wall ? "attacker" : cfg.env.pursuit ? "target" : "state";

    std::ostringstream csv;
    csv << "replicate,t,agent," << other << ",observation,action,stage_cost\n";
    for (const auto& st : r.trace) {
        const Point& x = sys.states(st.t)[st.state];
        const Point& y = sys.observations(st.t)[st.observation];
        csv << st.replicate << ',' << st.t << ','
            << (L.agent_length ? coords(x.slice(L.agent_offset, L.agent_length)) : "") << ','
            << coords(x.slice(L.other_offset, L.other_length)) << ','
            << coords(y.slice(L.obs_offset, L.obs_length)) << ',' << coords(sys.actions(st.t)[st.action])
            << ',' << num(st.stage_cost) << '\n';
    }
    write_atomic(out_path(cfg, "rollouts.csv"), csv.str());
    json summary{{"abstraction", s.label},
                 {"count", cfg.rollouts},
                 {"seed", cfg.seed},
                 {"costs", r.costs},
                 {"max_cost", r.max_cost},
                 {"worst_case", wc.value},
                 {"solve_runtime_ms", s.runtime_ms},
                 {"rollout_runtime_ms", r.runtime_ms}};
    write_atomic(out_path(cfg, "simulate_summary.json"), summary.dump(2) + "\n");
    std::cout << "rollouts " << cfg.rollouts << ", empirical max " << num(r.max_cost)
              << ", worst case " << num(wc.value) << "\n";
    return kOk;
}

int cmd_learn_ranges(const RunConfig& cfg) {
    const SystemModel& sys = cfg.env.model;
    json spec = cfg.raw.value("dataset", cfg.abstraction.dataset);
    if (spec.is_null()) spec = json{{"exploration", "uniform"}, {"count", 1000}};
    const int k = cfg.raw.value("k", cfg.abstraction.kind == AbstractionChoice::Kind::data ? cfg.abstraction.k : 1);
    if (k < 1) throw SchemaError("k must be at least 1");
    const std::string base = fs::path(cfg.config_path).parent_path().string();
    const TrajectoryDataset d = dataset_for(cfg.env, spec, cfg.seed, cfg.budget, base);
    const EmpiricalRangeModel m = build_empirical_ranges(d, k);

    std::ostringstream nd;
    write_dataset_ndjson(sys, d, nd);
    write_atomic(out_path(cfg, "dataset.ndjson"), nd.str());
    write_atomic(out_path(cfg, "ranges.json"), empirical_model_to_json(sys, m).dump(2) + "\n");
    json keys = json::array(), pairs = json::array();
    for (int t = 0; t <= m.horizon; ++t) {
        keys.push_back(m.key_count(t));
        pairs.push_back(m.tables[static_cast<std::size_t>(t)].size());
    }
    json summary{{"trajectories", d.trajectories.size()},
                 {"k", k},
                 {"metadata", d.metadata},
                 {"windows_per_t", keys},
                 {"window_action_pairs_per_t", pairs}};
    write_atomic(out_path(cfg, "learn_summary.json"), summary.dump(2) + "\n");
    std::cout << "trajectories " << d.trajectories.size() << ", k " << k << ", windows "
              << keys.dump() << ", covered (window, action) pairs " << pairs.dump() << "\n";
    return kOk;
}

int cmd_report(const RunConfig& cfg) {
    std::ostringstream md;
    md << "# Run report\n\n";
    bool any = false;
    auto load = [&](const char* name) -> std::optional<json> {
        const fs::path p = fs::path(cfg.out_dir) / name;
        if (!fs::exists(p)) return std::nullopt;
        any = true;
        return read_json_file(p.string());
    };
    if (auto j = load("solution.json")) {
        md << "## Solve\n\n- abstraction: " << j->value("abstraction_label", std::string("?"))
           << "\n- value: " << j->at("value").dump() << "\n- realizations: "
           << j->at("realizations").dump() << "\n- runtime_ms: " << j->at("runtime_ms").dump() << "\n\n";
    }
    if (auto j = load("bounds.json")) {
        md << "## Bounds\n\n| grid | gamma_0 | alpha_0 | formulas hold |\n|---|---|---|---|\n";
        for (const auto& r : j->at("reports"))
            md << "| " << r.at("label").get<std::string>() << " | " << r.at("gamma").at(0).dump() << " | "
               << r.at("alpha").at(0).dump() << " | " << (r.at("formulas_hold").get<bool>() ? "yes" : "no")
               << " |\n";
        md << "\n";
    }
    if (auto j = load("compare_summary.json")) {
        md << "## Compare\n\n| side | abstraction | realizations | worst case | runtime_ms |\n"
              "|---|---|---|---|---|\n";
        for (const char* side : {"A", "B"}) {
            const json& s = j->at(side);
            md << "| " << side << " | " << s.at("abstraction").get<std::string>() << " | "
               << s.at("realizations").dump() << " | " << s.at("worst_case").dump() << " | "
               << s.at("runtime_ms").dump() << " |\n";
        }
        md << "\nalpha_0 = " << j->at("alpha0").dump() << "; all gaps within 2 alpha_0: "
           << (j->at("all_gaps_within_2alpha0").get<bool>() ? "yes" : "no") << "\n\n";
    }
    if (auto j = load("simulate_summary.json")) {
        md << "## Simulate\n\n- rollouts: " << j->at("count").dump() << "\n- empirical max: "
           << j->at("max_cost").dump() << "\n- worst case: " << j->at("worst_case").dump() << "\n\n";
    }
    if (auto j = load("learn_summary.json")) {
        md << "## Learned ranges\n\n- trajectories: " << j->at("trajectories").dump()
           << "\n- k: " << j->at("k").dump() << "\n- windows per t: " << j->at("windows_per_t").dump()
           << "\n\n";
    }
    if (!any) {
        std::cerr << "no artifacts found in " << cfg.out_dir << "\n";
        return kFailure;
    }
    write_atomic(out_path(cfg, "report.md"), md.str());
    std::cout << md.str();
    return kOk;
}

int run(int argc, char** argv) {
    CLI::App app{"Worst-case control with information states and their approximations"};
    app.require_subcommand(1);
    std::string config, out = ".";
    std::uint64_t seed = 0;
    std::size_t budget = kDefaultBudget;
    unsigned jobs = 0;

    struct Sub {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&);
        bool needs_config;
    };
    const Sub subs[] = {
        {"solve", "Solve the DP for the configured abstraction", cmd_solve, true},
        {"verify-bounds", "Measure eps/delta and check them against the bound formulas", cmd_verify_bounds, true},
        {"compare", "Compare two abstractions per initial condition", cmd_compare, true},
        {"simulate", "Seeded rollouts of the solved strategy", cmd_simulate, true},
        {"learn-ranges", "Generate a dataset and build empirical ranges", cmd_learn_ranges, true},
        {"report", "Summarize the artifacts in the output directory", cmd_report, false},
    };
    std::map<CLI::App*, const Sub*> by_app;
    for (const Sub& s : subs) {
        CLI::App* sc = app.add_subcommand(s.name, s.help);
        auto* opt = sc->add_option("--config", config, "Run configuration (JSON)");
        if (s.needs_config) opt->required();
        sc->add_option("--seed", seed, "Random seed");
        sc->add_option("--out", out, "Output directory");
        sc->add_option("--budget", budget, "Maximum reachable-memory count");
        sc->add_option("--jobs", jobs, "Worker threads (default: NONSTOCH_AIS_JOBS or 1)");
        by_app[sc] = &s;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kSchema;
    }
    if (jobs == 0) {
        if (const char* env = std::getenv("NONSTOCH_AIS_JOBS")) {
            try {
                jobs = static_cast<unsigned>(std::stoul(env));
            } catch (const std::exception&) {
                std::cerr << "error: NONSTOCH_AIS_JOBS must be a positive integer\n";
                return kSchema;
            }
        }
    }
    set_default_jobs(jobs == 0 ? 1 : jobs);

    const Sub* sub = nullptr;
    for (auto& [sc, s] : by_app)
        if (sc->parsed()) sub = s;
    try {
        RunConfig cfg;
        if (!config.empty()) {
            cfg = load_run_config(sub->name, config);
        } else {
            cfg.command = sub->name;
        }
        cfg.out_dir = out;
        cfg.seed = seed;
        cfg.budget = budget;
        cfg.jobs = default_jobs();
        return sub->fn(cfg);
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kSchema;
    } catch (const ModelTooLarge& e) {
        std::cerr << "model too large: reachable count " << e.count() << " exceeds budget "
                  << e.budget() << "\n";
        return kTooLarge;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace nsais::cli
