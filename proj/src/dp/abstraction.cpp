#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "nsais/dp.hpp"
#include "nsais/ranges.hpp"
#include "path_sets.hpp"

namespace nsais {

using nlohmann::json;

// ---- InfoAbstraction ------------------------------------------------------

std::size_t InfoAbstraction::realization_count() const {
    std::size_t n = 0;
    for (const auto& s : stages) n += s.keys.size();
    return n;
}

std::optional<Index> InfoAbstraction::find(int t, const Key& k) const {
    if (t < 0 || t > horizon()) return std::nullopt;
    const auto& keys = stages[static_cast<std::size_t>(t)].keys;
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    if (it == keys.end() || *it != k) return std::nullopt;
    return static_cast<Index>(it - keys.begin());
}

Index InfoAbstraction::locate(const MemoryNode& node) const {
    if (!sigma) throw GeneratorIncomplete(kind + " abstraction has no compression");
    auto r = find(node.t, sigma(node));
    if (!r) throw GeneratorIncomplete(kind + " abstraction lacks the realization of a memory at t=" +
                                      std::to_string(node.t));
    return *r;
}

double InfoAbstraction::distance(int t, Index a, Index b) const {
    if (a == b) return 0.0;
    const auto& keys = stages.at(static_cast<std::size_t>(t)).keys;
    if (!key_distance) return 1.0;
    return key_distance(t, keys.at(a), keys.at(b));
}

namespace {
std::size_t slot(const InfoAbstraction::Stage& s, Index r, Index u) {
    if (r >= s.keys.size() || u >= s.actions)
        throw GeneratorIncomplete("realization or action index out of range");
    return static_cast<std::size_t>(r) * s.actions + u;
}
}  // namespace

bool InfoAbstraction::available(int t, Index r, Index u) const {
    const Stage& s = stages.at(static_cast<std::size_t>(t));
    return !s.costs[slot(s, r, u)].empty();
}

const IndexSet& InfoAbstraction::next(int t, Index r, Index u) const {
    const Stage& s = stages.at(static_cast<std::size_t>(t));
    return s.next[slot(s, r, u)];
}

const std::vector<double>& InfoAbstraction::cost_range(int t, Index r, Index u) const {
    const Stage& s = stages.at(static_cast<std::size_t>(t));
    return s.costs[slot(s, r, u)];
}

double InfoAbstraction::worst_cost(int t, Index r, Index u) const {
    const auto& c = cost_range(t, r, u);
    if (c.empty()) return std::numeric_limits<double>::infinity();
    return *std::max_element(c.begin(), c.end());
}

// ---- builder --------------------------------------------------------------

AbstractionBuilder::AbstractionBuilder(std::string kind, const SystemModel& sys)
    : kind_(std::move(kind)) {
    const std::size_t n = static_cast<std::size_t>(sys.horizon()) + 1;
    for (int t = 0; t <= sys.horizon(); ++t) actions_.push_back(sys.actions(t).size());
    ids_.resize(n);
    keys_.resize(n);
    next_.resize(n);
    costs_.resize(n);
    set_.resize(n);
}

std::pair<Index, bool> AbstractionBuilder::intern(int t, const Key& k) {
    const auto ti = static_cast<std::size_t>(t);
    auto [it, added] = ids_.at(ti).emplace(k, static_cast<Index>(keys_[ti].size()));
    if (added) {
        keys_[ti].push_back(k);
        next_[ti].resize(keys_[ti].size() * actions_[ti]);
        costs_[ti].resize(keys_[ti].size() * actions_[ti]);
        set_[ti].resize(keys_[ti].size() * actions_[ti], 0);
    }
    return {it->second, added};
}

std::size_t AbstractionBuilder::size(int t) const { return keys_.at(static_cast<std::size_t>(t)).size(); }

const Key& AbstractionBuilder::key(int t, Index r) const {
    return keys_.at(static_cast<std::size_t>(t)).at(r);
}

bool AbstractionBuilder::has_generator(int t, Index r, Index u) const {
    const auto ti = static_cast<std::size_t>(t);
    return set_[ti].at(static_cast<std::size_t>(r) * actions_[ti] + u) != 0;
}

void AbstractionBuilder::set_generator(int t, Index r, Index u, IndexSet next,
                                       std::vector<double> costs) {
    const auto ti = static_cast<std::size_t>(t);
    const std::size_t i = static_cast<std::size_t>(r) * actions_[ti] + u;
    canonicalize(next);
    std::sort(costs.begin(), costs.end());
    costs.erase(std::unique(costs.begin(), costs.end()), costs.end());
    next_[ti].at(i) = std::move(next);
    costs_[ti].at(i) = std::move(costs);
    set_[ti].at(i) = 1;
}

void AbstractionBuilder::merge_generator(int t, Index r, Index u, const IndexSet& next,
                                         const std::vector<double>& costs) {
    const auto ti = static_cast<std::size_t>(t);
    const std::size_t i = static_cast<std::size_t>(r) * actions_[ti] + u;
    IndexSet n = next_[ti].at(i);
    n.insert(n.end(), next.begin(), next.end());
    std::vector<double> c = costs_[ti].at(i);
    c.insert(c.end(), costs.begin(), costs.end());
    set_generator(t, r, u, std::move(n), std::move(c));
}

void AbstractionBuilder::add_initial(Index y0, Index r) { initial_.emplace_back(y0, r); }

InfoAbstraction AbstractionBuilder::finish() {
    InfoAbstraction a;
    a.kind = kind_;
    const std::size_t n = keys_.size();
    // Canonical order of keys at every t, and the old-id -> new-id map.
    std::vector<std::vector<Index>> remap(n);
    for (std::size_t t = 0; t < n; ++t) {
        remap[t].resize(keys_[t].size());
        Index i = 0;
        for (const auto& [k, old] : ids_[t]) remap[t][old] = i++;
    }
    a.stages.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        InfoAbstraction::Stage& s = a.stages[t];
        const std::size_t na = actions_[t];
        s.actions = na;
        s.keys.reserve(keys_[t].size());
        for (const auto& kv : ids_[t]) s.keys.push_back(kv.first);
        s.next.resize(keys_[t].size() * na);
        s.costs.resize(keys_[t].size() * na);
        for (Index old = 0; old < keys_[t].size(); ++old) {
            for (std::size_t u = 0; u < na; ++u) {
                const std::size_t from = old * na + u, to = remap[t][old] * na + u;
                if (!set_[t][from]) continue;
                IndexSet nx;
                nx.reserve(next_[t][from].size());
                for (Index r : next_[t][from]) nx.push_back(remap.at(t + 1)[r]);
                canonicalize(nx);
                s.next[to] = std::move(nx);
                s.costs[to] = std::move(costs_[t][from]);
            }
        }
    }
    for (auto [y0, r] : initial_) a.initial.emplace_back(y0, remap[0][r]);
    std::sort(a.initial.begin(), a.initial.end());
    a.initial.erase(std::unique(a.initial.begin(), a.initial.end()), a.initial.end());
    return a;
}

// ---- keys and walks -------------------------------------------------------

Key memory_key(const Memory& m) {
    Key k;
    k.reserve(m.y.size() + m.u.size());
    for (std::size_t i = 0; i < m.y.size(); ++i) {
        k.push_back(m.y[i]);
        if (i < m.u.size()) k.push_back(m.u[i]);
    }
    return k;
}

Key index_key(const IndexSet& s) { return Key(s.begin(), s.end()); }

namespace {

void walk(const SystemModel& sys, Memory& m, const IndexSet& range,
          const std::function<bool(const MemoryNode&)>& visit, std::size_t& count,
          std::size_t budget) {
    if (++count > budget) throw ModelTooLarge(count, budget);
    const int t = m.t();
    if (!visit(MemoryNode{t, m, range}) || t == sys.horizon()) return;
    const RangeState p{t, range};
    for (Index u = 0; u < sys.actions(t).size(); ++u) {
        for (const auto& s : range_successors(sys, p, u)) {
            m.u.push_back(u);
            m.y.push_back(s.y);
            walk(sys, m, s.support, visit, count, budget);
            m.y.pop_back();
            m.u.pop_back();
        }
    }
}

std::vector<double> stage_costs(const SystemModel& sys, int t, const IndexSet& range, Index u) {
    std::vector<double> c;
    c.reserve(range.size());
    for (Index x : range) c.push_back(sys.cost(t, x, u));
    return c;
}

}  // namespace

void walk_memories(const SystemModel& sys, const std::function<bool(const MemoryNode&)>& visit,
                   std::size_t budget) {
    std::size_t count = 0;
    for (const auto& root : initial_ranges(sys)) {
        Memory m;
        m.y.push_back(root.y);
        walk(sys, m, root.support, visit, count, budget);
    }
}

// ---- builders -------------------------------------------------------------

namespace {

json indices_json(const Key& k) { return json(k); }

}  // namespace

InfoAbstraction build_memory_abstraction(const SystemModel& sys, std::size_t budget) {
    AbstractionBuilder b("memory", sys);
    const int T = sys.horizon();
    detail::PathSetWalker walker(sys, budget);
    std::function<Index(const detail::PathNode&)> rec = [&](const detail::PathNode& node) {
        const int t = node.memory.t();
        const Index r = b.intern(t, memory_key(node.memory)).first;
        const IndexSet range = node.range();
        for (Index u = 0; u < sys.actions(t).size(); ++u) {
            IndexSet next;
            if (t < T)
                for (const auto& child : walker.children(node, u)) next.push_back(rec(child));
            b.set_generator(t, r, u, std::move(next), stage_costs(sys, t, range, u));
        }
        return r;
    };
    for (const auto& root : walker.roots()) b.add_initial(root.memory.y[0], rec(root));
    InfoAbstraction a = b.finish();
    a.sigma = [](const MemoryNode& n) { return memory_key(n.memory); };
    a.key_distance = [](int, const Key& x, const Key& y) { return x == y ? 0.0 : 1.0; };
    a.describe = [](int, const Key& k) { return indices_json(k); };
    return a;
}

InfoAbstraction build_info_state_abstraction(const SystemModel& sys, std::size_t budget) {
    AbstractionBuilder b("info-state", sys);
    const int T = sys.horizon();
    std::size_t count = 0;
    std::vector<Index> frontier;
    for (const auto& root : initial_ranges(sys)) {
        auto [r, added] = b.intern(0, index_key(root.support));
        if (added) {
            frontier.push_back(r);
            if (++count > budget) throw ModelTooLarge(count, budget);
        }
        b.add_initial(root.y, r);
    }
    for (int t = 0; t <= T; ++t) {
        std::vector<Index> upcoming;
        for (Index r : frontier) {
            const Key k = b.key(t, r);
            const IndexSet range(k.begin(), k.end());
            for (Index u = 0; u < sys.actions(t).size(); ++u) {
                IndexSet next;
                if (t < T) {
                    for (const auto& s : range_successors(sys, RangeState{t, range}, u)) {
                        auto [r2, added] = b.intern(t + 1, index_key(s.support));
                        if (added) {
                            upcoming.push_back(r2);
                            if (++count > budget) throw ModelTooLarge(count, budget);
                        }
                        next.push_back(r2);
                    }
                }
                b.set_generator(t, r, u, std::move(next), stage_costs(sys, t, range, u));
            }
        }
        frontier = std::move(upcoming);
    }
    InfoAbstraction a = b.finish();
    a.sigma = [](const MemoryNode& n) { return index_key(n.range); };
    a.range_determined = true;
    const Metric eta = sys.state_metric();
    std::vector<FinitePointSet> states;
    for (int t = 0; t <= T; ++t) states.push_back(sys.states(t));
    a.key_distance = [eta, states](int t, const Key& x, const Key& y) {
        const FinitePointSet& xs = states.at(static_cast<std::size_t>(t));
        return hausdorff_indexed(x.size(), y.size(), [&](std::size_t i, std::size_t j) {
            return eta(xs[static_cast<Index>(x[i])], xs[static_cast<Index>(y[j])]);
        });
    };
    a.describe = [states](int t, const Key& k) {
        json pts = json::array();
        for (auto x : k) pts.push_back(states.at(static_cast<std::size_t>(t))[static_cast<Index>(x)].coords());
        return pts;
    };
    return a;
}

InfoAbstraction build_compressed_abstraction(const SystemModel& sys, const Compression& c,
                                             std::size_t budget) {
    AbstractionBuilder b(c.kind, sys);
    const int T = sys.horizon();
    walk_memories(
        sys,
        [&](const MemoryNode& node) {
            const Index r = b.intern(node.t, c.sigma(node)).first;
            if (node.t == 0) b.add_initial(node.memory.y[0], r);
            for (Index u = 0; u < sys.actions(node.t).size(); ++u) {
                IndexSet next;
                if (node.t < T) {
                    for (const auto& s : range_successors(sys, RangeState{node.t, node.range}, u)) {
                        Memory child = node.memory;
                        child.u.push_back(u);
                        child.y.push_back(s.y);
                        next.push_back(b.intern(node.t + 1, c.sigma(MemoryNode{node.t + 1, child, s.support})).first);
                    }
                }
                b.merge_generator(node.t, r, u, next, stage_costs(sys, node.t, node.range, u));
            }
            return true;
        },
        budget);
    InfoAbstraction a = b.finish();
    a.sigma = c.sigma;
    a.key_distance = c.distance;
    a.describe = c.describe ? c.describe : [](int, const Key& k) { return indices_json(k); };
    return a;
}

Compression delayed_state_compression(const SystemModel& sys, int delay) {
    if (delay < 0) throw NegativeInput("delay must be nonnegative");
    Compression c;
    c.kind = "delayed-state";
    c.sigma = [delay](const MemoryNode& n) {
        Key k{static_cast<std::int64_t>(n.memory.y.back())};
        const int from = std::max(0, n.t - delay);
        for (int s = from; s < n.t; ++s) k.push_back(n.memory.u[static_cast<std::size_t>(s)]);
        return k;
    };
    // Observation distance combined with the distances of the windowed actions.
    std::vector<FinitePointSet> obs, act;
    for (int t = 0; t <= sys.horizon(); ++t) {
        obs.push_back(sys.observations(t));
        act.push_back(sys.actions(t));
    }
    const Metric eta = sys.observation_metric();
    c.distance = [eta, obs, act](int t, const Key& x, const Key& y) {
        const auto ti = static_cast<std::size_t>(t);
        double d = eta(obs[ti][static_cast<Index>(x[0])], obs[ti][static_cast<Index>(y[0])]);
        const std::size_t n = x.size() - 1;
        for (std::size_t i = 1; i < x.size(); ++i) {
            const auto& us = act.at(ti - n + i - 1);
            d = std::max(d, Metric::euclidean()(us[static_cast<Index>(x[i])], us[static_cast<Index>(y[i])]));
        }
        return d;
    };
    return c;
}

}  // namespace nsais
