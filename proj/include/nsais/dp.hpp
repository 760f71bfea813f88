#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsais/model.hpp"

namespace nsais {

// Realization of an abstraction, encoded as integers (a state-index set, a
// memory, a history window...). Keys are kept sorted within a stage.
using Key = std::vector<std::int64_t>;

// What compressions see of a memory: the memory and its conditional range.
struct MemoryNode {
    int t;
    const Memory& memory;
    const IndexSet& range;
};

// Finite realization spaces with transition-range and cost-range generators,
// one stage per time.
class InfoAbstraction {
public:
    struct Stage {
        std::vector<Key> keys;
        std::size_t actions = 0;
        std::vector<IndexSet> next;              // [r * actions + u], ids at t + 1
        std::vector<std::vector<double>> costs;  // [r * actions + u]; empty: not available
    };

    std::string kind;
    std::vector<Stage> stages;
    // Initial observation index -> realization at t = 0.
    std::vector<std::pair<Index, Index>> initial;
    std::function<double(int t, const Key& a, const Key& b)> key_distance;
    std::function<Key(const MemoryNode&)> sigma;
    std::function<nlohmann::json(int t, const Key&)> describe;
    // sigma depends on a memory only through (y_0, conditional range).
    bool range_determined = false;

    int horizon() const { return static_cast<int>(stages.size()) - 1; }
    std::size_t size(int t) const { return stages.at(static_cast<std::size_t>(t)).keys.size(); }
    std::size_t realization_count() const;

    std::optional<Index> find(int t, const Key& k) const;
    // sigma followed by find; GeneratorIncomplete when the realization is unknown.
    Index locate(const MemoryNode& node) const;

    double distance(int t, Index a, Index b) const;
    bool available(int t, Index r, Index u) const;
    const IndexSet& next(int t, Index r, Index u) const;
    const std::vector<double>& cost_range(int t, Index r, Index u) const;
    double worst_cost(int t, Index r, Index u) const;
};

// Collects realizations in discovery order and sorts them canonically at the end.
class AbstractionBuilder {
public:
    AbstractionBuilder(std::string kind, const SystemModel& sys);

    std::pair<Index, bool> intern(int t, const Key& k);  // (id, newly added)
    std::size_t size(int t) const;
    const Key& key(int t, Index r) const;

    bool has_generator(int t, Index r, Index u) const;
    void set_generator(int t, Index r, Index u, IndexSet next, std::vector<double> costs);
    // Union with what is already recorded (classes of merged memories).
    void merge_generator(int t, Index r, Index u, const IndexSet& next,
                         const std::vector<double>& costs);
    void add_initial(Index y0, Index r);

    InfoAbstraction finish();

private:
    std::string kind_;
    std::vector<std::size_t> actions_;
    std::vector<std::map<Key, Index>> ids_;
    std::vector<std::vector<Key>> keys_;
    std::vector<std::vector<IndexSet>> next_;
    std::vector<std::vector<std::vector<double>>> costs_;
    std::vector<std::vector<char>> set_;
    std::vector<std::pair<Index, Index>> initial_;
};

Key memory_key(const Memory& m);
Key index_key(const IndexSet& s);

// Depth-first visit of every reachable memory together with its conditional
// range; children are ordered by action, then observation. Returning false
// from visit skips the node's children.
void walk_memories(const SystemModel& sys, const std::function<bool(const MemoryNode&)>& visit,
                   std::size_t budget = kDefaultBudget);

struct ValueTable {
    std::vector<std::vector<double>> value;           // [t][r]
    std::vector<std::vector<std::vector<double>>> q;  // [t][r][u]; +inf for unavailable actions
};

struct Strategy {
    std::string provenance;  // memory, info-state, approximate, data-driven
    std::string tie_break = "lexicographically-smallest-action";
    std::vector<std::vector<Index>> action;  // [t][r], index into U_t
};

struct Solution {
    ValueTable values;
    Strategy strategy;
    std::vector<double> initial_values;  // aligned with the abstraction's initial list
    double value = 0.0;                  // max over initial realizations
    double runtime_ms = 0.0;
};

// Argmin per row; ties (within tolerance) go to the smallest action index,
// which is the lexicographically smallest action. GeneratorIncomplete when
// a row lacks a column or has no available action.
std::vector<Index> extract_strategy(const std::vector<std::vector<double>>& q,
                                    std::size_t num_actions);

Solution solve_abstraction_dp(const InfoAbstraction& a, Criterion criterion,
                              const std::string& provenance = "info-state");

// Memory DP with conditional ranges computed by brute-force enumeration of
// consistent state trajectories. Realization r at time t is memories[t][r].
struct MemorySolution : Solution {
    std::vector<std::vector<Memory>> memories;
    std::vector<Memory> initial_memories;
    std::optional<Index> find(const Memory& m) const;
};

MemorySolution solve_memory_dp(const SystemModel& sys, std::size_t budget = kDefaultBudget);
// Same solver; rejects models whose criterion is not terminal.
MemorySolution solve_terminal_dp(const SystemModel& sys, std::size_t budget = kDefaultBudget);

// Identity-on-memory abstraction built from the same brute-force ranges.
InfoAbstraction build_memory_abstraction(const SystemModel& sys,
                                         std::size_t budget = kDefaultBudget);
// Conditional-range filter abstraction, propagated forward without memories.
InfoAbstraction build_info_state_abstraction(const SystemModel& sys,
                                             std::size_t budget = kDefaultBudget);

// Any compression of memories: generators are unions over the memories that
// share a realization, and cost ranges likewise.
struct Compression {
    std::string kind;
    std::function<Key(const MemoryNode&)> sigma;
    std::function<double(int t, const Key& a, const Key& b)> distance;
    std::function<nlohmann::json(int t, const Key&)> describe;
};
InfoAbstraction build_compressed_abstraction(const SystemModel& sys, const Compression& c,
                                             std::size_t budget = kDefaultBudget);

// Last observation and the last `delay` actions.
Compression delayed_state_compression(const SystemModel& sys, int delay);

using Policy = std::function<Index(const MemoryNode&)>;
Policy policy_from(const InfoAbstraction& a, const Strategy& s);

struct WorstCase {
    double value = 0.0;                            // max over initial observations
    std::vector<std::pair<Index, double>> per_initial;  // (y0, Lambda_0)
};

// Worst-case criterion of a memory-based policy by backward evaluation over
// every reachable memory the policy can produce.
WorstCase evaluate_strategy_worst_case(const SystemModel& sys, const Policy& policy,
                                       std::size_t budget = kDefaultBudget);

// alpha_t = max(eps_t, alpha_{t+1} + L_{t+1} * delta_t) with alpha_{T+1} = 0;
// the terminal variant uses alpha_T = eps_T and alpha_t = alpha_{t+1} + L_{t+1} * delta_t.
// lips[t] is the Lipschitz constant of the value function at t + 1.
std::vector<double> alpha_bound(const std::vector<double>& eps, const std::vector<double>& delta,
                                const std::vector<double>& lips,
                                Criterion criterion = Criterion::instantaneous);

struct RolloutStep {
    std::size_t replicate;
    int t;
    Index state;
    Index observation;
    Index action;
    double stage_cost;
};

struct RolloutSummary {
    std::vector<double> costs;  // criterion value per rollout
    double max_cost = 0.0;
    double runtime_ms = 0.0;
    std::vector<RolloutStep> trace;
};

// Seeded rollouts with disturbances, noises and the initial state drawn
// uniformly. Rollout i uses its own generator seeded from (seed, i).
RolloutSummary simulate_rollouts(const SystemModel& sys, const Policy& policy, std::size_t n,
                                 std::uint64_t seed, bool record_trace = false);

// {"values": ..., "strategy": ..., "alpha": ..., "runtime_ms": ...}
nlohmann::json solution_to_json(const SystemModel& sys, const InfoAbstraction& a,
                                const Solution& s, const std::vector<double>& alpha = {});
// Values, Q rows and action indices back from solution_to_json output.
Solution solution_from_json(const nlohmann::json& j);

}  // namespace nsais
