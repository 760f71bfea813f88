#include "nsais/datadriven.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <set>

#include "nsais/parallel.hpp"
#include "nsais/ranges.hpp"
#include "nsais/ranges_io.hpp"

namespace nsais {

using nlohmann::json;

namespace {

std::string exploration_name(Exploration e) {
    switch (e) {
        case Exploration::uniform: return "uniform";
        case Exploration::round_robin: return "round-robin";
        case Exploration::user: return "user";
    }
    return "uniform";
}

}  // namespace

TrajectoryDataset generate_dataset(const SystemModel& sys, const ExplorationSpec& spec,
                                   std::size_t n, std::uint64_t seed) {
    if (n == 0) throw NegativeInput("dataset size must be at least 1");
    if (spec.kind == Exploration::user && !spec.user)
        throw SchemaError("user exploration needs a strategy");
    const int T = sys.horizon();
    TrajectoryDataset d;
    d.horizon = T;
    d.trajectories.resize(n);
    parallel_for(n, default_jobs(), [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 rng(seq);
        auto pick = [&rng](std::size_t k) { return static_cast<Index>(rng() % k); };
        const IndexSet& x0s = sys.initial_states();
        Index x = x0s[pick(x0s.size())];
        Index y = sys.observe(0, x, pick(sys.noises(0).size()));
        RangeState range;
        Memory m;
        if (spec.kind == Exploration::user) range = range_filter_init(sys, y);
        m.y.push_back(y);
        Trajectory& tr = d.trajectories[i];
        for (int t = 0; t <= T; ++t) {
            const std::size_t nu = sys.actions(t).size();
            Index u = 0;
            switch (spec.kind) {
                case Exploration::uniform: u = pick(nu); break;
                case Exploration::round_robin: u = static_cast<Index>((i + static_cast<std::size_t>(t)) % nu); break;
                case Exploration::user: u = spec.user(MemoryNode{t, m, range.support}); break;
            }
            tr.y.push_back(y);
            tr.u.push_back(u);
            tr.c.push_back(sys.cost(t, x, u));
            if (t == T) break;
            x = sys.next_state(t, x, u, pick(sys.disturbances(t).size()));
            y = sys.observe(t + 1, x, pick(sys.noises(t + 1).size()));
            m.u.push_back(u);
            m.y.push_back(y);
            if (spec.kind == Exploration::user) range = range_filter_update(sys, range, u, y);
        }
    });
    d.metadata = {{"exploration", exploration_name(spec.kind)}, {"count", n}, {"seed", seed}};
    return d;
}

namespace {

struct ExhaustiveWalk {
    const SystemModel& sys;
    std::size_t budget;
    std::size_t count = 0;
    std::set<Trajectory> out;
    Trajectory cur;

    void rec(int t, Index x) {
        if (++count > budget) throw ModelTooLarge(count, budget);
        const int T = sys.horizon();
        for (Index u = 0; u < sys.actions(t).size(); ++u) {
            cur.u.push_back(u);
            cur.c.push_back(sys.cost(t, x, u));
            if (t == T) {
                out.insert(cur);
            } else {
                std::set<std::pair<Index, Index>> next;  // (x', y')
                for (Index w = 0; w < sys.disturbances(t).size(); ++w) {
                    const Index x2 = sys.next_state(t, x, u, w);
                    for (Index n = 0; n < sys.noises(t + 1).size(); ++n)
                        next.emplace(x2, sys.observe(t + 1, x2, n));
                }
                for (auto [x2, y2] : next) {
                    cur.y.push_back(y2);
                    rec(t + 1, x2);
                    cur.y.pop_back();
                }
            }
            cur.u.pop_back();
            cur.c.pop_back();
        }
    }
};

}  // namespace

TrajectoryDataset generate_exhaustive_dataset(const SystemModel& sys, std::size_t budget) {
    ExhaustiveWalk walk{sys, budget, 0, {}, {}};
    std::set<std::pair<Index, Index>> roots;
    for (Index x : sys.initial_states())
        for (Index n = 0; n < sys.noises(0).size(); ++n) roots.emplace(x, sys.observe(0, x, n));
    for (auto [x, y] : roots) {
        walk.cur.y = {y};
        walk.rec(0, x);
    }
    TrajectoryDataset d;
    d.horizon = sys.horizon();
    d.trajectories.assign(walk.out.begin(), walk.out.end());
    d.metadata = {{"exploration", "exhaustive"}, {"count", d.trajectories.size()}};
    return d;
}

Key window_key(const Memory& m, int k) {
    if (k < 1) throw NegativeInput("window length must be at least 1");
    const int t = m.t();
    const int s = std::max(0, t - k + 1);
    Key key;
    for (int i = s; i <= t; ++i) {
        key.push_back(m.y[static_cast<std::size_t>(i)]);
        if (i < t) key.push_back(m.u[static_cast<std::size_t>(i)]);
    }
    return key;
}

namespace {

Key slide(const Key& window, Index u, Index y, int k) {
    Key next = window;
    next.push_back(u);
    next.push_back(y);
    while (static_cast<int>((next.size() + 1) / 2) > k) next.erase(next.begin(), next.begin() + 2);
    return next;
}

std::string key_str(const Key& k) {
    std::string s = "(";
    for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
    return s + ")";
}

}  // namespace

const EmpiricalRangeModel::Entry* EmpiricalRangeModel::find(int t, const Key& window, Index u) const {
    if (t < 0 || t > horizon) return nullptr;
    const Table& tb = tables[static_cast<std::size_t>(t)];
    auto it = tb.find({window, u});
    return it == tb.end() ? nullptr : &it->second;
}

std::size_t EmpiricalRangeModel::key_count(int t) const {
    std::set<Key> keys;
    for (const auto& kv : tables.at(static_cast<std::size_t>(t))) keys.insert(kv.first.first);
    return keys.size();
}

EmpiricalRangeModel build_empirical_ranges(const TrajectoryDataset& d, int k) {
    if (k < 1) throw NegativeInput("window length must be at least 1");
    if (d.trajectories.empty()) throw EmptyDataset("no trajectories");
    EmpiricalRangeModel m;
    m.k = k;
    m.horizon = d.horizon;
    m.tables.resize(static_cast<std::size_t>(d.horizon) + 1);
    std::set<Index> initial;
    for (const auto& tr : d.trajectories) {
        const auto len = static_cast<std::size_t>(d.horizon) + 1;
        if (tr.y.size() != len || tr.u.size() != len || tr.c.size() != len)
            throw DimensionMismatch("trajectory length differs from the horizon");
        initial.insert(tr.y[0]);
        Memory mem;
        for (int t = 0; t <= d.horizon; ++t) {
            const auto ti = static_cast<std::size_t>(t);
            mem.y.push_back(tr.y[ti]);
            auto& e = m.tables[ti][{window_key(mem, k), tr.u[ti]}];
            e.count += 1;
            e.max_cost = e.count == 1 ? tr.c[ti] : std::max(e.max_cost, tr.c[ti]);
            if (t < d.horizon) {
                auto pos = std::lower_bound(e.next_observations.begin(), e.next_observations.end(),
                                            tr.y[ti + 1]);
                if (pos == e.next_observations.end() || *pos != tr.y[ti + 1])
                    e.next_observations.insert(pos, tr.y[ti + 1]);
            }
            mem.u.push_back(tr.u[ti]);
        }
    }
    m.initial_y.assign(initial.begin(), initial.end());
    return m;
}

double range_prediction_loss(const FinitePointSet& predicted, const FinitePointSet& empirical,
                             const Metric& m, double c_hat, double c_max, double lambda) {
    const double ob = average_hausdorff(predicted, empirical, m);
    return lambda == 0.0 ? ob : lambda * std::fabs(c_hat - c_max) + ob;
}

InfoAbstraction data_abstraction(const EmpiricalRangeModel& model, const SystemModel& signature) {
    if (model.tables.empty() || model.tables[0].empty()) throw EmptyDataset("empty range model");
    if (model.horizon != signature.horizon())
        throw DimensionMismatch("range model horizon differs from the model's");
    const int T = model.horizon, k = model.k;
    AbstractionBuilder b("data-k" + std::to_string(k), signature);
    std::vector<std::set<Key>> known(static_cast<std::size_t>(T) + 1);
    for (int t = 0; t <= T; ++t)
        for (const auto& kv : model.tables[static_cast<std::size_t>(t)]) known[static_cast<std::size_t>(t)].insert(kv.first.first);
    for (int t = 0; t <= T; ++t) {
        for (const auto& [wu, e] : model.tables[static_cast<std::size_t>(t)]) {
            const auto& [window, u] = wu;
            if (u >= signature.actions(t).size()) throw OutOfRangeAction("action index outside U_t");
            const Index r = b.intern(t, window).first;
            IndexSet next;
            if (t < T) {
                for (Index y : e.next_observations) {
                    Key w2 = slide(window, u, y, k);
                    if (!known[static_cast<std::size_t>(t) + 1].count(w2))
                        throw MissingKey("window " + key_str(w2) + " at t=" + std::to_string(t + 1) +
                                         " never occurs in the data");
                    next.push_back(b.intern(t + 1, w2).first);
                }
            }
            b.set_generator(t, r, u, std::move(next), {e.max_cost});
        }
    }
    for (Index y0 : model.initial_y) b.add_initial(y0, b.intern(0, Key{y0}).first);
    InfoAbstraction a = b.finish();
    a.sigma = [k](const MemoryNode& n) { return window_key(n.memory, k); };
    a.key_distance = [](int, const Key& x, const Key& y) { return x == y ? 0.0 : 1.0; };
    a.describe = [](int, const Key& key) { return json(key); };
    return a;
}

Solution solve_dp_from_data(const EmpiricalRangeModel& model, const SystemModel& signature) {
    return solve_abstraction_dp(data_abstraction(model, signature), signature.criterion(),
                                "data-driven");
}

void write_dataset_ndjson(const SystemModel& sys, const TrajectoryDataset& d, std::ostream& out) {
    for (std::size_t i = 0; i < d.trajectories.size(); ++i) {
        const Trajectory& tr = d.trajectories[i];
        for (std::size_t t = 0; t < tr.y.size(); ++t) {
            const int ti = static_cast<int>(t);
            json rec{{"replicate", i},
                     {"t", t},
                     {"y", to_json(sys.observations(ti)[tr.y[t]])},
                     {"u", to_json(sys.actions(ti)[tr.u[t]])},
                     {"c", tr.c[t]}};
            out << rec.dump() << '\n';
        }
    }
}

TrajectoryDataset read_dataset_ndjson(const SystemModel& sys, std::istream& in) {
    std::map<std::size_t, std::map<int, json>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            const auto rep = j.at("replicate").get<std::size_t>();
            const int t = j.at("t").get<int>();
            rows[rep][t] = std::move(j);
        } catch (const json::exception& e) {
            throw SchemaError("dataset line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (rows.empty()) throw EmptyDataset("dataset has no records");
    TrajectoryDataset d;
    d.horizon = sys.horizon();
    for (auto& [rep, steps] : rows) {
        if (static_cast<int>(steps.size()) != d.horizon + 1 || steps.begin()->first != 0)
            throw SchemaError("replicate " + std::to_string(rep) + " does not cover t = 0..T");
        Trajectory tr;
        for (auto& [t, j] : steps) {
            tr.y.push_back(sys.observation_index(t, point_from_json(j.at("y"))));
            tr.u.push_back(sys.action_index(t, point_from_json(j.at("u"))));
            tr.c.push_back(j.at("c").get<double>());
        }
        d.trajectories.push_back(std::move(tr));
    }
    d.metadata = {{"exploration", "file"}, {"count", d.trajectories.size()}};
    return d;
}

json empirical_model_to_json(const SystemModel& sys, const EmpiricalRangeModel& m) {
    json entries = json::array();
    for (int t = 0; t <= m.horizon; ++t)
        for (const auto& [wu, e] : m.tables[static_cast<std::size_t>(t)])
            entries.push_back({{"t", t},
                               {"window", wu.first},
                               {"action_index", wu.second},
                               {"action", to_json(sys.actions(t)[wu.second])},
                               {"next", e.next_observations},
                               {"max_cost", e.max_cost},
                               {"count", e.count}});
    return {{"k", m.k}, {"horizon", m.horizon}, {"initial", m.initial_y}, {"entries", entries}};
}

EmpiricalRangeModel empirical_model_from_json(const SystemModel& sys, const json& j) {
    try {
        EmpiricalRangeModel m;
        m.k = j.at("k").get<int>();
        m.horizon = j.at("horizon").get<int>();
        if (m.horizon != sys.horizon()) throw SchemaError("range model horizon differs from the model's");
        m.tables.resize(static_cast<std::size_t>(m.horizon) + 1);
        m.initial_y = j.at("initial").get<std::vector<Index>>();
        for (const auto& e : j.at("entries")) {
            const int t = e.at("t").get<int>();
            EmpiricalRangeModel::Entry en;
            en.next_observations = e.at("next").get<IndexSet>();
            en.max_cost = e.at("max_cost").get<double>();
            en.count = e.at("count").get<std::size_t>();
            m.tables.at(static_cast<std::size_t>(t))[{e.at("window").get<Key>(), e.at("action_index").get<Index>()}] =
                std::move(en);
        }
        return m;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("range model: ") + e.what());
    }
}

}  // namespace nsais
