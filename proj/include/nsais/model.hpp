#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "nsais/errors.hpp"
#include "nsais/metric.hpp"
#include "nsais/point.hpp"

namespace nsais {

enum class Criterion { instantaneous, terminal };

std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

inline constexpr std::size_t kDefaultBudget = 10'000'000;

// Lookup tables for one time step. Indices refer to the canonical order of
// the stage's point sets; dynamics index into the next stage's states.
struct Stage {
    FinitePointSet states;
    FinitePointSet actions;
    FinitePointSet disturbances;
    FinitePointSet noises;
    FinitePointSet observations;
    std::vector<Index> next;     // [(x * |U| + u) * |W| + w]; empty at the horizon
    std::vector<Index> observe;  // [x * |N| + n]
    std::vector<double> cost;    // [x * |U| + u]
};

class SystemModel {
public:
    SystemModel() = default;
    // Validates table totality, index ranges and cost signs.
    SystemModel(std::string name, Criterion criterion, std::vector<Stage> stages,
                IndexSet initial_states, Metric state_metric, Metric observation_metric);

    const std::string& name() const { return name_; }
    int horizon() const { return static_cast<int>(stages_.size()) - 1; }
    Criterion criterion() const { return criterion_; }

    const Stage& stage(int t) const { return stages_.at(static_cast<std::size_t>(t)); }
    const FinitePointSet& states(int t) const { return stage(t).states; }
    const FinitePointSet& actions(int t) const { return stage(t).actions; }
    const FinitePointSet& disturbances(int t) const { return stage(t).disturbances; }
    const FinitePointSet& noises(int t) const { return stage(t).noises; }
    const FinitePointSet& observations(int t) const { return stage(t).observations; }

    Index next_state(int t, Index x, Index u, Index w) const {
        const Stage& s = stages_[static_cast<std::size_t>(t)];
        return s.next[(x * s.actions.size() + u) * s.disturbances.size() + w];
    }
    Index observe(int t, Index x, Index n) const {
        const Stage& s = stages_[static_cast<std::size_t>(t)];
        return s.observe[x * s.noises.size() + n];
    }
    double cost(int t, Index x, Index u) const {
        const Stage& s = stages_[static_cast<std::size_t>(t)];
        return s.cost[x * s.actions.size() + u];
    }

    const IndexSet& initial_states() const { return initial_; }
    const Metric& state_metric() const { return state_metric_; }
    const Metric& observation_metric() const { return observation_metric_; }

    // Every observation value pins down a single state at every time.
    bool perfectly_observed() const;

    Index action_index(int t, const Point& u) const;       // OutOfRangeAction
    Index observation_index(int t, const Point& y) const;  // OutOfRangeObservation

private:
    std::string name_;
    Criterion criterion_ = Criterion::instantaneous;
    std::vector<Stage> stages_;
    IndexSet initial_;
    Metric state_metric_;
    Metric observation_metric_;
};

// State-space description by rules; tabulate() evaluates the rules on every
// point of the declared finite domains.
struct StateSpaceSpec {
    std::string name = "system";
    int horizon = 0;
    Criterion criterion = Criterion::instantaneous;
    std::vector<FinitePointSet> states;        // one per t, or a single set for all t
    std::vector<FinitePointSet> actions;       // same convention
    std::vector<FinitePointSet> disturbances;  // same convention
    std::vector<FinitePointSet> noises;        // same convention
    FinitePointSet initial_states;
    std::function<Point(int t, const Point& x, const Point& u, const Point& w)> dynamics;
    std::function<Point(int t, const Point& x, const Point& n)> observation;
    std::function<double(int t, const Point& x, const Point& u)> cost;
    Metric state_metric = Metric::euclidean();
    Metric observation_metric = Metric::euclidean();
};

SystemModel tabulate(const StateSpaceSpec& spec);

// Input-output description: y_0 = h_0(w_0), y_{t+1} = h_{t+1}(w_{0:t}, u_{0:t}),
// c_t = d_t(w_{0:t}, u_{0:t}). Converted to state-space form whose state at t
// is the history (w_{0:t}, u_{0:t-1}) flattened into one point.
struct InputOutputSpec {
    std::string name = "io-system";
    int horizon = 0;
    Criterion criterion = Criterion::instantaneous;
    std::vector<FinitePointSet> actions;       // U_0..U_T (or one set)
    std::vector<FinitePointSet> disturbances;  // W_0..W_T (or one set)
    // Observation at time t from w_{0:t-1} (w_0 only when t = 0) and u_{0:t-1}.
    std::function<Point(int t, const std::vector<Point>& w, const std::vector<Point>& u)>
        observation;
    std::function<double(int t, const std::vector<Point>& w, const std::vector<Point>& u)> cost;
    Metric observation_metric = Metric::euclidean();
};

SystemModel from_input_output(const InputOutputSpec& spec);

// Observation history y_{0:t} and action history u_{0:t-1}, as indices into
// the per-time observation and action sets.
struct Memory {
    std::vector<Index> y;
    std::vector<Index> u;

    int t() const { return static_cast<int>(y.size()) - 1; }

    friend bool operator==(const Memory& a, const Memory& b) { return a.y == b.y && a.u == b.u; }
    friend bool operator<(const Memory& a, const Memory& b) {
        return a.y != b.y ? a.y < b.y : a.u < b.u;
    }
};

Memory initial_memory(const SystemModel& sys, const Point& y0);
Memory memory_extend(const SystemModel& sys, const Memory& m, Index u, Index y);
Memory memory_extend(const SystemModel& sys, const Memory& m, const Point& u, const Point& y);

// Conditional range of the state given a memory.
struct RangeState {
    int t = 0;
    IndexSet support;

    friend bool operator==(const RangeState& a, const RangeState& b) {
        return a.t == b.t && a.support == b.support;
    }
};

FinitePointSet support_points(const SystemModel& sys, const RangeState& p);

RangeState range_filter_init(const SystemModel& sys, Index y0);
RangeState range_filter_init(const SystemModel& sys, const Point& y0);
RangeState range_filter_update(const SystemModel& sys, const RangeState& p, Index u, Index y_next);
RangeState range_filter_update(const SystemModel& sys, const RangeState& p, const Point& u,
                               const Point& y_next);
RangeState range_of_memory(const SystemModel& sys, const Memory& m);

// All one-step outcomes of the filter at once, one per feasible next
// observation, in observation order.
struct RangeSuccessor {
    Index y;
    IndexSet support;
};
std::vector<RangeSuccessor> range_successors(const SystemModel& sys, const RangeState& p, Index u);
std::vector<RangeSuccessor> initial_ranges(const SystemModel& sys);

// { f_t(x, u, w) : x in p, w in W_t }.
IndexSet forward_image(const SystemModel& sys, const RangeState& p, Index u);

double worst_case_stage_cost(const SystemModel& sys, const RangeState& p, Index u);
double worst_case_stage_cost(const SystemModel& sys, const FinitePointSet& support, const Point& u);
double worst_case_stage_cost(const SystemModel& sys, const Memory& m, const Point& u);

// Memories at time t with a consistent disturbance/noise history, sorted.
std::vector<Memory> enumerate_reachable_memories(const SystemModel& sys, int t,
                                                 std::size_t budget = kDefaultBudget);

}  // namespace nsais
