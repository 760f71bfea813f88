#include "oracles.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>

namespace nsais::testkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One scenario: its current state and, for rollouts, the criterion so far.
struct Run {
    Index x;
    double acc;
};

using Groups = std::map<Index, std::vector<Run>>;

// Scenarios at t = 0 grouped by y0.
Groups initial_groups(const SystemModel& sys) {
    Groups g;
    for (Index x : sys.initial_states())
        for (Index n = 0; n < sys.noises(0).size(); ++n) g[sys.observe(0, x, n)].push_back({x, 0.0});
    return g;
}

// Every scenario extended by (w_t, n_{t+1}), grouped by the next observation.
Groups extend(const SystemModel& sys, int t, const std::vector<Run>& runs, Index u) {
    Groups g;
    for (const Run& r : runs)
        for (Index w = 0; w < sys.disturbances(t).size(); ++w) {
            const Index x1 = sys.next_state(t, r.x, u, w);
            for (Index n = 0; n < sys.noises(t + 1).size(); ++n)
                g[sys.observe(t + 1, x1, n)].push_back({x1, r.acc});
        }
    return g;
}

double minimax(const SystemModel& sys, int t, const std::vector<Run>& runs) {
    const int T = sys.horizon();
    const bool inst = sys.criterion() == Criterion::instantaneous;
    double best = kInf;
    for (Index u = 0; u < sys.actions(t).size(); ++u) {
        double v = 0.0;
        if (inst || t == T)
            for (const Run& r : runs) v = std::max(v, sys.cost(t, r.x, u));
        if (t < T)
            for (const auto& [y, next] : extend(sys, t, runs, u)) {
                v = std::max(v, minimax(sys, t + 1, next));
                if (v >= best) break;
            }
        best = std::min(best, v);
    }
    return best;
}

double rollout(const SystemModel& sys, const Policy& policy, Memory& m, std::vector<Run> runs) {
    const int t = m.t();
    const int T = sys.horizon();
    IndexSet range;
    for (const Run& r : runs) range.push_back(r.x);
    canonicalize(range);
    const Index u = policy(MemoryNode{t, m, range});
    for (Run& r : runs) {
        const double c = sys.cost(t, r.x, u);
        if (sys.criterion() == Criterion::instantaneous)
            r.acc = std::max(r.acc, c);
        else if (t == T)
            r.acc = c;
    }
    double worst = 0.0;
    if (t == T) {
        for (const Run& r : runs) worst = std::max(worst, r.acc);
        return worst;
    }
    for (auto& [y, next] : extend(sys, t, runs, u)) {
        m.u.push_back(u);
        m.y.push_back(y);
        worst = std::max(worst, rollout(sys, policy, m, std::move(next)));
        m.u.pop_back();
        m.y.pop_back();
    }
    return worst;
}

void collect(const SystemModel& sys, Memory& m, const std::vector<Run>& runs,
             std::vector<std::vector<Memory>>& out) {
    const int t = m.t();
    out[static_cast<std::size_t>(t)].push_back(m);
    if (t == sys.horizon()) return;
    for (Index u = 0; u < sys.actions(t).size(); ++u)
        for (const auto& [y, next] : extend(sys, t, runs, u)) {
            m.u.push_back(u);
            m.y.push_back(y);
            collect(sys, m, next, out);
            m.u.pop_back();
            m.y.pop_back();
        }
}

}  // namespace

OracleValue minimax_oracle(const SystemModel& sys) {
    OracleValue out;
    for (const auto& [y0, runs] : initial_groups(sys)) {
        const double v = minimax(sys, 0, runs);
        out.per_y0[y0] = v;
        out.value = std::max(out.value, v);
    }
    return out;
}

OracleValue rollout_oracle(const SystemModel& sys, const Policy& policy) {
    OracleValue out;
    for (auto& [y0, runs] : initial_groups(sys)) {
        Memory m;
        m.y.push_back(y0);
        const double v = rollout(sys, policy, m, runs);
        out.per_y0[y0] = v;
        out.value = std::max(out.value, v);
    }
    return out;
}

IndexSet brute_force_range(const SystemModel& sys, const Memory& m) {
    // Depth-first over (x0, n0, w0, n1, ...), pruning on the first mismatch.
    IndexSet out;
    const int t_end = m.t();
    auto walk = [&](auto&& self, int t, Index x) -> void {
        if (t == t_end) {
            out.push_back(x);
            return;
        }
        for (Index w = 0; w < sys.disturbances(t).size(); ++w) {
            const Index x1 = sys.next_state(t, x, m.u[static_cast<std::size_t>(t)], w);
            for (Index n = 0; n < sys.noises(t + 1).size(); ++n)
                if (sys.observe(t + 1, x1, n) == m.y[static_cast<std::size_t>(t) + 1]) {
                    self(self, t + 1, x1);
                    break;
                }
        }
    };
    for (Index x : sys.initial_states())
        for (Index n = 0; n < sys.noises(0).size(); ++n)
            if (sys.observe(0, x, n) == m.y[0]) {
                walk(walk, 0, x);
                break;
            }
    canonicalize(out);
    return out;
}

std::vector<std::vector<Memory>> brute_force_memories(const SystemModel& sys) {
    std::vector<std::vector<Memory>> out(static_cast<std::size_t>(sys.horizon()) + 1);
    for (const auto& [y0, runs] : initial_groups(sys)) {
        Memory m;
        m.y.push_back(y0);
        collect(sys, m, runs, out);
    }
    for (auto& v : out) std::sort(v.begin(), v.end());
    return out;
}

std::optional<double> strategy_enumeration_oracle(const SystemModel& sys,
                                                  std::size_t max_strategies) {
    std::vector<Memory> slots;
    for (const auto& stage : brute_force_memories(sys))
        slots.insert(slots.end(), stage.begin(), stage.end());
    std::vector<std::size_t> radix;
    std::size_t total = 1;
    for (const Memory& m : slots) {
        radix.push_back(sys.actions(m.t()).size());
        total *= radix.back();
        if (total > max_strategies) return std::nullopt;
    }
    std::map<Memory, std::size_t> slot_of;
    for (std::size_t i = 0; i < slots.size(); ++i) slot_of[slots[i]] = i;

    std::vector<std::size_t> digits(slots.size(), 0);
    double best = kInf;
    for (std::size_t k = 0; k < total; ++k) {
        Policy g = [&](const MemoryNode& node) {
            return static_cast<Index>(digits[slot_of.at(node.memory)]);
        };
        best = std::min(best, rollout_oracle(sys, g).value);
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (++digits[i] < radix[i]) break;
            digits[i] = 0;
        }
    }
    return best;
}

}  // namespace nsais::testkit
