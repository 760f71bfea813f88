#include <algorithm>
#include <map>

#include "nsais/model.hpp"

namespace nsais {

Memory initial_memory(const SystemModel& sys, const Point& y0) {
    return Memory{{sys.observation_index(0, y0)}, {}};
}

Memory memory_extend(const SystemModel& sys, const Memory& m, Index u, Index y) {
    const int t = m.t();
    if (t < 0) throw OutOfRangeObservation("memory has no initial observation");
    if (t >= sys.horizon()) throw OutOfRangeAction("memory already spans the horizon");
    if (u >= sys.actions(t).size()) throw OutOfRangeAction("action index out of range");
    if (y >= sys.observations(t + 1).size())
        throw OutOfRangeObservation("observation index out of range");
    Memory out = m;
    out.u.push_back(u);
    out.y.push_back(y);
    return out;
}

Memory memory_extend(const SystemModel& sys, const Memory& m, const Point& u, const Point& y) {
    const int t = m.t();
    if (t >= sys.horizon()) throw OutOfRangeAction("memory already spans the horizon");
    return memory_extend(sys, m, sys.action_index(t, u), sys.observation_index(t + 1, y));
}

FinitePointSet support_points(const SystemModel& sys, const RangeState& p) {
    return sys.states(p.t).select(p.support);
}

RangeState range_filter_init(const SystemModel& sys, Index y0) {
    if (y0 >= sys.observations(0).size()) throw OutOfRangeObservation("y0 index out of range");
    RangeState r{0, {}};
    for (Index x : sys.initial_states())
        for (Index n = 0; n < sys.noises(0).size(); ++n)
            if (sys.observe(0, x, n) == y0) {
                r.support.push_back(x);
                break;
            }
    if (r.support.empty()) throw InfeasibleObservation("no initial state explains y0");
    return r;
}

RangeState range_filter_init(const SystemModel& sys, const Point& y0) {
    auto i = sys.observations(0).index_of(y0);
    if (!i) throw InfeasibleObservation("y0 " + y0.str() + " is outside the image of h_0");
    return range_filter_init(sys, *i);
}

IndexSet forward_image(const SystemModel& sys, const RangeState& p, Index u) {
    IndexSet out;
    for (Index x : p.support)
        for (Index w = 0; w < sys.disturbances(p.t).size(); ++w)
            out.push_back(sys.next_state(p.t, x, u, w));
    canonicalize(out);
    return out;
}

RangeState range_filter_update(const SystemModel& sys, const RangeState& p, Index u,
                               Index y_next) {
    if (p.support.empty()) throw EmptySet("filter update from an empty range");
    if (p.t >= sys.horizon()) throw OutOfRangeAction("no transition after the horizon");
    if (u >= sys.actions(p.t).size()) throw OutOfRangeAction("action index out of range");
    if (y_next >= sys.observations(p.t + 1).size())
        throw OutOfRangeObservation("observation index out of range");
    RangeState r{p.t + 1, {}};
    for (Index x1 : forward_image(sys, p, u))
        for (Index n = 0; n < sys.noises(r.t).size(); ++n)
            if (sys.observe(r.t, x1, n) == y_next) {
                r.support.push_back(x1);
                break;
            }
    if (r.support.empty()) throw InfeasibleObservation("observation inconsistent with range");
    return r;
}

RangeState range_filter_update(const SystemModel& sys, const RangeState& p, const Point& u,
                               const Point& y_next) {
    if (p.t >= sys.horizon()) throw OutOfRangeAction("no transition after the horizon");
    return range_filter_update(sys, p, sys.action_index(p.t, u),
                               sys.observation_index(p.t + 1, y_next));
}

RangeState range_of_memory(const SystemModel& sys, const Memory& m) {
    RangeState r = range_filter_init(sys, m.y.at(0));
    for (std::size_t k = 0; k < m.u.size(); ++k) r = range_filter_update(sys, r, m.u[k], m.y[k + 1]);
    return r;
}

namespace {

std::vector<RangeSuccessor> group_by_observation(const SystemModel& sys, int t,
                                                 const IndexSet& candidates) {
    std::map<Index, IndexSet> buckets;
    for (Index x : candidates)
        for (Index n = 0; n < sys.noises(t).size(); ++n) buckets[sys.observe(t, x, n)].push_back(x);
    std::vector<RangeSuccessor> out;
    out.reserve(buckets.size());
    for (auto& [y, xs] : buckets) {
        canonicalize(xs);
        out.push_back({y, std::move(xs)});
    }
    return out;
}

}  // namespace

std::vector<RangeSuccessor> range_successors(const SystemModel& sys, const RangeState& p, Index u) {
    return group_by_observation(sys, p.t + 1, forward_image(sys, p, u));
}

std::vector<RangeSuccessor> initial_ranges(const SystemModel& sys) {
    return group_by_observation(sys, 0, sys.initial_states());
}

double worst_case_stage_cost(const SystemModel& sys, const RangeState& p, Index u) {
    if (u >= sys.actions(p.t).size()) throw OutOfRangeAction("action index out of range");
    if (p.support.empty()) throw EmptySet("stage cost over an empty range");
    double c = 0.0;
    for (Index x : p.support) c = std::max(c, sys.cost(p.t, x, u));
    return c;
}

double worst_case_stage_cost(const SystemModel& sys, const FinitePointSet& support,
                             const Point& u) {
    // The time is inferred from the first stage whose state set holds the support.
    for (int t = 0; t <= sys.horizon(); ++t) {
        IndexSet idx;
        bool all = true;
        for (const auto& x : support) {
            auto i = sys.states(t).index_of(x);
            if (!i) {
                all = false;
                break;
            }
            idx.push_back(*i);
        }
        if (all && sys.actions(t).contains(u))
            return worst_case_stage_cost(sys, RangeState{t, idx}, sys.action_index(t, u));
    }
    throw OutOfRangeAction("no stage holds both the support and the action " + u.str());
}

double worst_case_stage_cost(const SystemModel& sys, const Memory& m, const Point& u) {
    RangeState r = range_of_memory(sys, m);
    return worst_case_stage_cost(sys, r, sys.action_index(r.t, u));
}

namespace {

void collect(const SystemModel& sys, const Memory& m, const RangeState& r, int target,
             std::vector<Memory>& out, std::size_t& count, std::size_t budget) {
    if (++count > budget) throw ModelTooLarge(count, budget);
    if (r.t == target) {
        out.push_back(m);
        return;
    }
    for (Index u = 0; u < sys.actions(r.t).size(); ++u) {
        for (auto& s : range_successors(sys, r, u)) {
            Memory m2 = m;
            m2.u.push_back(u);
            m2.y.push_back(s.y);
            collect(sys, m2, RangeState{r.t + 1, std::move(s.support)}, target, out, count, budget);
        }
    }
}

}  // namespace

std::vector<Memory> enumerate_reachable_memories(const SystemModel& sys, int t,
                                                 std::size_t budget) {
    if (t < 0 || t > sys.horizon()) throw OutOfRangeAction("time outside the horizon");
    std::vector<Memory> out;
    std::size_t count = 0;
    for (auto& s : initial_ranges(sys))
        collect(sys, Memory{{s.y}, {}}, RangeState{0, std::move(s.support)}, t, out, count, budget);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace nsais
