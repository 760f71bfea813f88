#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "nsais/dp.hpp"
#include "nsais/parallel.hpp"
#include "nsais/ranges.hpp"
#include "nsais/ranges_io.hpp"
#include "path_sets.hpp"

namespace nsais {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

Index argmin(const std::vector<double>& row) {
    double best = kInf;
    for (double q : row) best = std::min(best, q);
    if (!std::isfinite(best)) throw GeneratorIncomplete("no available action for a realization");
    for (Index u = 0; u < row.size(); ++u)
        if (row[u] <= best + kTolerance) return u;
    return 0;  // unreachable
}

}  // namespace

std::vector<Index> extract_strategy(const std::vector<std::vector<double>>& q,
                                    std::size_t num_actions) {
    std::vector<Index> out;
    out.reserve(q.size());
    for (const auto& row : q) {
        if (row.size() != num_actions) throw GeneratorIncomplete("Q row is missing an action column");
        out.push_back(argmin(row));
    }
    return out;
}

Solution solve_abstraction_dp(const InfoAbstraction& a, Criterion criterion,
                              const std::string& provenance) {
    const auto start = std::chrono::steady_clock::now();
    const int T = a.horizon();
    if (T < 0) throw GeneratorIncomplete("abstraction has no stages");
    Solution sol;
    sol.strategy.provenance = provenance;
    auto& V = sol.values.value;
    auto& Q = sol.values.q;
    V.resize(static_cast<std::size_t>(T) + 1);
    Q.resize(V.size());
    sol.strategy.action.resize(V.size());
    for (int t = T; t >= 0; --t) {
        const auto ti = static_cast<std::size_t>(t);
        const auto& stage = a.stages[ti];
        const std::size_t n = stage.keys.size(), na = stage.actions;
        if (stage.next.size() != n * na || stage.costs.size() != n * na)
            throw GeneratorIncomplete("generator tables do not cover every realization at t=" +
                                      std::to_string(t));
        V[ti].assign(n, 0.0);
        Q[ti].assign(n, std::vector<double>(na, kInf));
        sol.strategy.action[ti].assign(n, 0);
        parallel_for(n, default_jobs(), [&](std::size_t r) {
            for (std::size_t u = 0; u < na; ++u) {
                const auto& costs = stage.costs[r * na + u];
                if (costs.empty()) continue;
                const double e = *std::max_element(costs.begin(), costs.end());
                double succ = 0.0;
                if (t < T) {
                    const auto& next = stage.next[r * na + u];
                    if (next.empty())
                        throw GeneratorIncomplete("empty transition range at t=" + std::to_string(t));
                    for (Index r2 : next) succ = std::max(succ, V[ti + 1].at(r2));
                }
                double q;
                if (criterion == Criterion::instantaneous)
                    q = std::max(e, succ);
                else
                    q = t < T ? succ : e;
                Q[ti][r][u] = q;
            }
            const Index best = argmin(Q[ti][r]);
            sol.strategy.action[ti][r] = best;
            V[ti][r] = Q[ti][r][best];
        });
    }
    for (auto [y0, r] : a.initial) {
        sol.initial_values.push_back(V[0].at(r));
        sol.value = std::max(sol.value, V[0][r]);
    }
    sol.runtime_ms = elapsed_ms(start);
    return sol;
}

// ---- memory DP ------------------------------------------------------------

std::optional<Index> MemorySolution::find(const Memory& m) const {
    const int t = m.t();
    if (t < 0 || static_cast<std::size_t>(t) >= memories.size()) return std::nullopt;
    const auto& ms = memories[static_cast<std::size_t>(t)];
    auto it = std::lower_bound(ms.begin(), ms.end(), m);
    if (it == ms.end() || !(*it == m)) return std::nullopt;
    return static_cast<Index>(it - ms.begin());
}

namespace {

struct MemoryEntry {
    Memory memory;
    std::vector<double> q;
    double value;
    Index action;
};

double memory_rec(const SystemModel& sys, detail::PathSetWalker& walker, const detail::PathNode& node,
                  std::vector<std::vector<MemoryEntry>>& out) {
    const int t = node.memory.t(), T = sys.horizon();
    const IndexSet range = node.range();
    const std::size_t na = sys.actions(t).size();
    std::vector<double> q(na);
    for (Index u = 0; u < na; ++u) {
        double e = 0.0;
        for (Index x : range) e = std::max(e, sys.cost(t, x, u));
        double succ = 0.0;
        if (t < T)
            for (const auto& child : walker.children(node, u))
                succ = std::max(succ, memory_rec(sys, walker, child, out));
        if (sys.criterion() == Criterion::instantaneous)
            q[u] = std::max(e, succ);
        else
            q[u] = t < T ? succ : e;
    }
    const Index a = argmin(q);
    const double v = q[a];
    out[static_cast<std::size_t>(t)].push_back({node.memory, std::move(q), v, a});
    return v;
}

}  // namespace

MemorySolution solve_memory_dp(const SystemModel& sys, std::size_t budget) {
    const auto start = std::chrono::steady_clock::now();
    const auto n = static_cast<std::size_t>(sys.horizon()) + 1;
    detail::PathSetWalker walker(sys, budget);
    std::vector<std::vector<MemoryEntry>> entries(n);
    MemorySolution sol;
    sol.strategy.provenance = "memory";
    for (const auto& root : walker.roots()) {
        const double v = memory_rec(sys, walker, root, entries);
        sol.initial_memories.push_back(root.memory);
        sol.initial_values.push_back(v);
        sol.value = std::max(sol.value, v);
    }
    sol.memories.resize(n);
    sol.values.value.resize(n);
    sol.values.q.resize(n);
    sol.strategy.action.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        auto& es = entries[t];
        std::sort(es.begin(), es.end(),
                  [](const MemoryEntry& a, const MemoryEntry& b) { return a.memory < b.memory; });
        for (auto& e : es) {
            sol.memories[t].push_back(std::move(e.memory));
            sol.values.q[t].push_back(std::move(e.q));
            sol.values.value[t].push_back(e.value);
            sol.strategy.action[t].push_back(e.action);
        }
    }
    sol.runtime_ms = elapsed_ms(start);
    return sol;
}

MemorySolution solve_terminal_dp(const SystemModel& sys, std::size_t budget) {
    if (sys.criterion() != Criterion::terminal)
        throw SchemaError("solve_terminal_dp needs a terminal-criterion model");
    return solve_memory_dp(sys, budget);
}

// ---- strategies -----------------------------------------------------------

Policy policy_from(const InfoAbstraction& a, const Strategy& s) {
    return [pa = &a, ps = &s](const MemoryNode& node) {
        const Index r = pa->locate(node);
        return ps->action.at(static_cast<std::size_t>(node.t)).at(r);
    };
}

namespace {

double evaluate_rec(const SystemModel& sys, const Policy& policy, Memory& m, const IndexSet& range,
                    std::size_t& count, std::size_t budget) {
    if (++count > budget) throw ModelTooLarge(count, budget);
    const int t = m.t(), T = sys.horizon();
    const Index u = policy(MemoryNode{t, m, range});
    if (u >= sys.actions(t).size()) throw OutOfRangeAction("policy returned an action outside U_t");
    double e = 0.0;
    for (Index x : range) e = std::max(e, sys.cost(t, x, u));
    if (t == T) return e;
    double succ = 0.0;
    for (const auto& s : range_successors(sys, RangeState{t, range}, u)) {
        m.u.push_back(u);
        m.y.push_back(s.y);
        succ = std::max(succ, evaluate_rec(sys, policy, m, s.support, count, budget));
        m.y.pop_back();
        m.u.pop_back();
    }
    return sys.criterion() == Criterion::instantaneous ? std::max(e, succ) : succ;
}

}  // namespace

WorstCase evaluate_strategy_worst_case(const SystemModel& sys, const Policy& policy,
                                       std::size_t budget) {
    WorstCase out;
    std::size_t count = 0;
    for (const auto& root : initial_ranges(sys)) {
        Memory m;
        m.y.push_back(root.y);
        const double v = evaluate_rec(sys, policy, m, root.support, count, budget);
        out.per_initial.emplace_back(root.y, v);
        out.value = std::max(out.value, v);
    }
    return out;
}

// ---- bounds ---------------------------------------------------------------

std::vector<double> alpha_bound(const std::vector<double>& eps, const std::vector<double>& delta,
                                const std::vector<double>& lips, Criterion criterion) {
    if (eps.empty()) return {};
    const std::size_t n = eps.size();
    if (delta.size() + 1 < n || lips.size() + 1 < n)
        throw DimensionMismatch("alpha_bound inputs must cover every time step");
    auto check = [](const std::vector<double>& v, const char* what) {
        for (double x : v)
            if (std::isnan(x) || x < 0) throw NegativeInput(std::string(what) + " must be nonnegative");
    };
    check(eps, "eps");
    check(delta, "delta");
    check(lips, "lips");
    std::vector<double> alpha(n);
    alpha[n - 1] = eps[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) {
        const double carry = delta[k] == 0.0 ? 0.0 : lips[k] * delta[k];
        alpha[k] = criterion == Criterion::instantaneous ? std::max(eps[k], alpha[k + 1] + carry)
                                                         : alpha[k + 1] + carry;
    }
    return alpha;
}

// ---- rollouts -------------------------------------------------------------

RolloutSummary simulate_rollouts(const SystemModel& sys, const Policy& policy, std::size_t n,
                                 std::uint64_t seed, bool record_trace) {
    if (n == 0) throw NegativeInput("rollout count must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    const int T = sys.horizon();
    RolloutSummary out;
    out.costs.resize(n);
    std::vector<std::vector<RolloutStep>> traces(record_trace ? n : 0);
    parallel_for(n, default_jobs(), [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 rng(seq);
        auto pick = [&rng](std::size_t k) { return static_cast<Index>(rng() % k); };
        const IndexSet& x0s = sys.initial_states();
        Index x = x0s[pick(x0s.size())];
        Index y = sys.observe(0, x, pick(sys.noises(0).size()));
        RangeState range = range_filter_init(sys, y);
        Memory m;
        m.y.push_back(y);
        double total = 0.0;
        for (int t = 0; t <= T; ++t) {
            const Index u = policy(MemoryNode{t, m, range.support});
            const double c = sys.cost(t, x, u);
            if (sys.criterion() == Criterion::instantaneous)
                total = std::max(total, c);
            else if (t == T)
                total = c;
            if (record_trace) traces[i].push_back({i, t, x, y, u, c});
            if (t == T) break;
            x = sys.next_state(t, x, u, pick(sys.disturbances(t).size()));
            y = sys.observe(t + 1, x, pick(sys.noises(t + 1).size()));
            range = range_filter_update(sys, range, u, y);
            m.u.push_back(u);
            m.y.push_back(y);
        }
        out.costs[i] = total;
    });
    for (double c : out.costs) out.max_cost = std::max(out.max_cost, c);
    for (auto& tr : traces) out.trace.insert(out.trace.end(), tr.begin(), tr.end());
    out.runtime_ms = elapsed_ms(start);
    return out;
}

// ---- serialization --------------------------------------------------------

json solution_to_json(const SystemModel& sys, const InfoAbstraction& a, const Solution& s,
                      const std::vector<double>& alpha) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json values = json::array(), strategy = json::array(), initial = json::array();
    for (int t = 0; t <= a.horizon(); ++t) {
        const auto ti = static_cast<std::size_t>(t);
        json vt = json::array(), st = json::array();
        for (Index r = 0; r < a.size(t); ++r) {
            const Key& k = a.stages[ti].keys[r];
            json real = a.describe ? a.describe(t, k) : json(k);
            json q = json::array();
            for (double v : s.values.q[ti][r]) q.push_back(num(v));
            vt.push_back({{"key", k}, {"realization", real}, {"value", s.values.value[ti][r]}, {"q", q}});
            const Index u = s.strategy.action[ti][r];
            st.push_back({{"key", k}, {"action_index", u}, {"action", to_json(sys.actions(t)[u])}});
        }
        values.push_back(std::move(vt));
        strategy.push_back(std::move(st));
    }
    for (std::size_t i = 0; i < a.initial.size(); ++i) {
        const auto [y0, r] = a.initial[i];
        initial.push_back({{"y0", to_json(sys.observations(0)[y0])},
                           {"key", a.stages[0].keys[r]},
                           {"value", s.initial_values.at(i)}});
    }
    return {{"abstraction", a.kind},
            {"realizations", a.realization_count()},
            {"value", s.value},
            {"initial", initial},
            {"values", values},
            {"strategy",
             {{"provenance", s.strategy.provenance},
              {"tie_break", s.strategy.tie_break},
              {"actions", strategy}}},
            {"alpha", alpha},
            {"runtime_ms", s.runtime_ms}};
}

Solution solution_from_json(const json& j) {
    Solution s;
    s.value = j.at("value").get<double>();
    s.runtime_ms = j.value("runtime_ms", 0.0);
    for (const auto& e : j.at("initial")) s.initial_values.push_back(e.at("value").get<double>());
    for (const auto& vt : j.at("values")) {
        std::vector<double> v;
        std::vector<std::vector<double>> q;
        for (const auto& e : vt) {
            v.push_back(e.at("value").get<double>());
            std::vector<double> row;
            for (const auto& x : e.at("q")) row.push_back(x.is_null() ? kInf : x.get<double>());
            q.push_back(std::move(row));
        }
        s.values.value.push_back(std::move(v));
        s.values.q.push_back(std::move(q));
    }
    const json& st = j.at("strategy");
    s.strategy.provenance = st.at("provenance").get<std::string>();
    s.strategy.tie_break = st.at("tie_break").get<std::string>();
    for (const auto& at : st.at("actions")) {
        std::vector<Index> acts;
        for (const auto& e : at) acts.push_back(e.at("action_index").get<Index>());
        s.strategy.action.push_back(std::move(acts));
    }
    return s;
}

}  // namespace nsais
