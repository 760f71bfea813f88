#include "nsais/model.hpp"

#include <algorithm>
#include <map>

namespace nsais {

std::string to_string(Criterion c) {
    return c == Criterion::terminal ? "terminal" : "instantaneous";
}

Criterion criterion_from_string(const std::string& s) {
    if (s == "instantaneous") return Criterion::instantaneous;
    if (s == "terminal") return Criterion::terminal;
    throw SchemaError("unknown criterion '" + s + "'");
}

SystemModel::SystemModel(std::string name, Criterion criterion, std::vector<Stage> stages,
                         IndexSet initial_states, Metric state_metric, Metric observation_metric)
    : name_(std::move(name)),
      criterion_(criterion),
      stages_(std::move(stages)),
      initial_(std::move(initial_states)),
      state_metric_(std::move(state_metric)),
      observation_metric_(std::move(observation_metric)) {
    if (stages_.empty()) throw SchemaError("a system needs at least one stage");
    canonicalize(initial_);
    if (initial_.empty()) throw EmptySet("no initial states");
    const int T = horizon();
    for (int t = 0; t <= T; ++t) {
        const Stage& s = stages_[static_cast<std::size_t>(t)];
        const std::string at = " at t=" + std::to_string(t);
        if (s.states.empty() || s.actions.empty() || s.noises.empty() || s.observations.empty())
            throw EmptySet("empty state, action, noise or observation set" + at);
        if (t < T && s.disturbances.empty()) throw EmptySet("empty disturbance set" + at);
        const std::size_t nx = s.states.size(), nu = s.actions.size(), nn = s.noises.size();
        if (s.observe.size() != nx * nn) throw GeneratorIncomplete("observation table size" + at);
        if (s.cost.size() != nx * nu) throw GeneratorIncomplete("cost table size" + at);
        for (Index y : s.observe)
            if (y >= s.observations.size()) throw OutOfDomain("observation index" + at);
        for (double c : s.cost)
            if (!(c >= 0.0)) throw NegativeInput("negative or undefined cost" + at);
        if (t < T) {
            const std::size_t nn1 = stages_[static_cast<std::size_t>(t) + 1].states.size();
            if (s.next.size() != nx * nu * s.disturbances.size())
                throw GeneratorIncomplete("dynamics table size" + at);
            for (Index x : s.next)
                if (x >= nn1) throw OutOfDomain("dynamics leaves the next state set" + at);
        }
    }
    for (Index x : initial_)
        if (x >= stages_[0].states.size()) throw OutOfDomain("initial state index");
}

bool SystemModel::perfectly_observed() const {
    for (int t = 0; t <= horizon(); ++t) {
        const Stage& s = stage(t);
        std::vector<long> owner(s.observations.size(), -1);
        for (Index x = 0; x < s.states.size(); ++x) {
            for (Index n = 0; n < s.noises.size(); ++n) {
                Index y = observe(t, x, n);
                if (owner[y] >= 0 && owner[y] != static_cast<long>(x)) return false;
                owner[y] = x;
            }
        }
    }
    return true;
}

Index SystemModel::action_index(int t, const Point& u) const {
    if (t < 0 || t > horizon()) throw OutOfRangeAction("time out of range");
    auto i = actions(t).index_of(u);
    if (!i) throw OutOfRangeAction("action " + u.str() + " not in U_" + std::to_string(t));
    return *i;
}

Index SystemModel::observation_index(int t, const Point& y) const {
    if (t < 0 || t > horizon()) throw OutOfRangeObservation("time out of range");
    auto i = observations(t).index_of(y);
    if (!i)
        throw OutOfRangeObservation("observation " + y.str() + " not in Y_" + std::to_string(t));
    return *i;
}

namespace {

const FinitePointSet& per_time(const std::vector<FinitePointSet>& sets, int t, const char* what) {
    if (sets.empty()) throw SchemaError(std::string("missing ") + what);
    if (sets.size() == 1) return sets.front();
    if (static_cast<std::size_t>(t) >= sets.size())
        throw SchemaError(std::string(what) + " not declared for every time");
    return sets[static_cast<std::size_t>(t)];
}

}  // namespace

SystemModel tabulate(const StateSpaceSpec& spec) {
    if (spec.horizon < 0) throw SchemaError("negative horizon");
    if (!spec.dynamics && spec.horizon > 0) throw SchemaError("missing dynamics");
    if (!spec.observation || !spec.cost) throw SchemaError("missing observation or cost");
    const int T = spec.horizon;
    std::vector<Stage> stages(static_cast<std::size_t>(T) + 1);
    for (int t = 0; t <= T; ++t) {
        Stage& s = stages[static_cast<std::size_t>(t)];
        s.states = per_time(spec.states, t, "states");
        s.actions = per_time(spec.actions, t, "actions");
        s.noises = per_time(spec.noises, t, "noises");
        // W_T never enters the dynamics, so it may be left undeclared.
        if (t < T)
            s.disturbances = per_time(spec.disturbances, t, "disturbances");
        else if (spec.disturbances.size() == 1 ||
                 spec.disturbances.size() > static_cast<std::size_t>(T))
            s.disturbances = per_time(spec.disturbances, t, "disturbances");
        std::vector<Point> ys;
        for (const auto& x : s.states)
            for (const auto& n : s.noises) ys.push_back(spec.observation(t, x, n));
        s.observations = FinitePointSet(ys);
        for (std::size_t i = 0; i < ys.size(); ++i)
            s.observe.push_back(s.observations.require_index(ys[i]));
        for (const auto& x : s.states)
            for (const auto& u : s.actions) s.cost.push_back(spec.cost(t, x, u));
    }
    for (int t = 0; t < T; ++t) {
        Stage& s = stages[static_cast<std::size_t>(t)];
        const FinitePointSet& next = stages[static_cast<std::size_t>(t) + 1].states;
        for (const auto& x : s.states)
            for (const auto& u : s.actions)
                for (const auto& w : s.disturbances) {
                    Point x1 = spec.dynamics(t, x, u, w);
                    auto i = next.index_of(x1);
                    if (!i)
                        throw OutOfDomain("dynamics maps " + x.str() + " to " + x1.str() +
                                          " outside X_" + std::to_string(t + 1));
                    s.next.push_back(*i);
                }
    }
    IndexSet init;
    for (const auto& x : spec.initial_states) init.push_back(stages[0].states.require_index(x));
    return SystemModel(spec.name, spec.criterion, std::move(stages), std::move(init),
                       spec.state_metric, spec.observation_metric);
}

namespace {

// Splits a flattened input-output history state back into its pieces.
struct HistoryLayout {
    std::vector<std::size_t> wdim, udim;

    void split(const Point& x, int t, std::vector<Point>& w, std::vector<Point>& u) const {
        w.clear();
        u.clear();
        std::size_t off = 0;
        for (int k = 0; k <= t; ++k) {
            w.push_back(x.slice(off, wdim[static_cast<std::size_t>(k)]));
            off += wdim[static_cast<std::size_t>(k)];
        }
        for (int k = 0; k < t; ++k) {
            u.push_back(x.slice(off, udim[static_cast<std::size_t>(k)]));
            off += udim[static_cast<std::size_t>(k)];
        }
    }

    static Point join(const std::vector<Point>& w, const std::vector<Point>& u) {
        Point p;
        for (const auto& v : w) p = concat(p, v);
        for (const auto& v : u) p = concat(p, v);
        return p;
    }
};

}  // namespace

SystemModel from_input_output(const InputOutputSpec& spec) {
    if (!spec.observation || !spec.cost) throw SchemaError("missing observation or cost");
    const int T = spec.horizon;
    HistoryLayout layout;
    std::vector<FinitePointSet> W, U;
    for (int t = 0; t <= T; ++t) {
        W.push_back(per_time(spec.disturbances, t, "disturbances"));
        U.push_back(per_time(spec.actions, t, "actions"));
        layout.wdim.push_back(W.back().dim());
        layout.udim.push_back(U.back().dim());
    }
    // X_t enumerates every (w_{0:t}, u_{0:t-1}).
    std::vector<FinitePointSet> X;
    std::vector<std::pair<std::vector<Point>, std::vector<Point>>> frontier{{{}, {}}};
    for (int t = 0; t <= T; ++t) {
        std::vector<std::pair<std::vector<Point>, std::vector<Point>>> grown;
        for (const auto& [w, u] : frontier) {
            if (t == 0) {
                for (const auto& w0 : W[0]) grown.push_back({{w0}, {}});
                continue;
            }
            for (const auto& ut : U[static_cast<std::size_t>(t) - 1])
                for (const auto& wt : W[static_cast<std::size_t>(t)]) {
                    auto w2 = w;
                    auto u2 = u;
                    w2.push_back(wt);
                    u2.push_back(ut);
                    grown.push_back({std::move(w2), std::move(u2)});
                }
        }
        frontier = std::move(grown);
        std::vector<Point> pts;
        for (const auto& [w, u] : frontier) pts.push_back(HistoryLayout::join(w, u));
        X.emplace_back(std::move(pts));
    }

    StateSpaceSpec ss;
    ss.name = spec.name;
    ss.horizon = T;
    ss.criterion = spec.criterion;
    ss.states = X;
    ss.actions = U;
    for (int t = 0; t <= T; ++t)
        ss.disturbances.push_back(t < T ? W[static_cast<std::size_t>(t) + 1] : W[0]);
    ss.noises = {FinitePointSet{Point{0.0}}};
    ss.initial_states = X[0];
    ss.dynamics = [layout](int t, const Point& x, const Point& u, const Point& w) {
        std::vector<Point> ws, us;
        layout.split(x, t, ws, us);
        ws.push_back(w);
        us.push_back(u);
        return HistoryLayout::join(ws, us);
    };
    ss.observation = [layout, h = spec.observation](int t, const Point& x, const Point&) {
        std::vector<Point> ws, us;
        layout.split(x, t, ws, us);
        if (t > 0) ws.pop_back();  // y_t depends on w_{0:t-1} only
        return h(t, ws, us);
    };
    ss.cost = [layout, d = spec.cost](int t, const Point& x, const Point& u) {
        std::vector<Point> ws, us;
        layout.split(x, t, ws, us);
        us.push_back(u);
        return d(t, ws, us);
    };
    ss.state_metric = Metric::discrete();
    ss.observation_metric = spec.observation_metric;
    return tabulate(ss);
}

}  // namespace nsais
