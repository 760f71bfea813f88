#include "nsais/model_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include "nsais/ranges_io.hpp"

namespace nsais {

using nlohmann::json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

namespace {

std::vector<FinitePointSet> space(const json& spaces, const std::string& key, bool required) {
    if (!spaces.contains(key)) {
        if (required) throw SchemaError("spaces." + key + " is required");
        return {};
    }
    const json& v = spaces.at(key);
    if (v.is_object()) {
        std::vector<FinitePointSet> out;
        for (const auto& s : v.at("per_time")) out.push_back(point_set_from_json(s));
        return out;
    }
    return {point_set_from_json(v)};
}

Point translate_or_stay(const Point& x, const Point& d, const FinitePointSet& feasible) {
    if (d.dim() != x.dim()) throw DimensionMismatch("translation of mismatched dimension");
    std::vector<double> c = x.coords();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += d[i];
    Point moved(std::move(c));
    return feasible.contains(moved) ? moved : x;
}

// Table entries keyed by (t or -1, inputs...).
template <class Key>
using Entries = std::map<std::pair<int, Key>, json>;

int entry_time(const json& e) { return e.contains("t") ? e.at("t").get<int>() : -1; }

template <class Key>
const json& lookup(const Entries<Key>& table, int t, const Key& k, const char* what) {
    auto it = table.find({t, k});
    if (it == table.end()) it = table.find({-1, k});
    if (it == table.end())
        throw SchemaError(std::string(what) + " table is not total at t=" + std::to_string(t));
    return it->second;
}

using Triple = std::tuple<Point, Point, Point>;
using Pair = std::pair<Point, Point>;

}  // namespace

SystemModel model_from_json(const json& j) {
    try {
        if (!j.is_object()) throw SchemaError("model must be a JSON object");
        StateSpaceSpec spec;
        spec.name = j.value("name", std::string("model"));
        spec.horizon = j.at("horizon").get<int>();
        if (spec.horizon < 0) throw SchemaError("horizon must be nonnegative");
        spec.criterion = criterion_from_string(j.value("criterion", std::string("instantaneous")));
        const json& spaces = j.at("spaces");
        spec.states = space(spaces, "states", true);
        spec.actions = space(spaces, "actions", true);
        spec.disturbances = space(spaces, "disturbances", spec.horizon > 0);
        spec.noises = space(spaces, "noises", false);
        if (spec.noises.empty()) spec.noises = {FinitePointSet{Point{0.0}}};
        spec.initial_states = spaces.contains("initial_states")
                                  ? point_set_from_json(spaces.at("initial_states"))
                                  : spec.states.front();
        if (j.contains("metrics")) {
            const json& m = j.at("metrics");
            if (m.contains("state")) spec.state_metric = metric_from_json(m.at("state"));
            if (m.contains("observation"))
                spec.observation_metric = metric_from_json(m.at("observation"));
        }
        auto states_at = [&spec](int t) -> const FinitePointSet& {
            return spec.states.size() == 1 ? spec.states.front()
                                           : spec.states.at(static_cast<std::size_t>(t));
        };

        if (spec.horizon > 0) {
            const json& d = j.at("dynamics");
            if (d.contains("table")) {
                auto table = std::make_shared<Entries<Triple>>();
                for (const auto& e : d.at("table"))
                    (*table)[{entry_time(e), Triple{point_from_json(e.at("x")),
                                                    point_from_json(e.at("u")),
                                                    point_from_json(e.at("w"))}}] = e.at("next");
                spec.dynamics = [table](int t, const Point& x, const Point& u, const Point& w) {
                    return point_from_json(lookup(*table, t, Triple{x, u, w}, "dynamics"));
                };
            } else {
                std::string rule = d.at("rule").get<std::string>();
                if (rule == "identity") {
                    spec.dynamics = [](int, const Point& x, const Point&, const Point&) { return x; };
                } else if (rule == "translate") {
                    spec.dynamics = [states_at](int t, const Point& x, const Point& u,
                                                const Point& w) {
                        return translate_or_stay(translate_or_stay(x, u, states_at(t + 1)), w,
                                                 states_at(t + 1));
                    };
                } else {
                    throw SchemaError("unknown dynamics rule '" + rule + "'");
                }
            }
        }

        const json& o = j.at("observation");
        if (o.contains("table")) {
            auto table = std::make_shared<Entries<Pair>>();
            for (const auto& e : o.at("table"))
                (*table)[{entry_time(e), Pair{point_from_json(e.at("x")),
                                              point_from_json(e.at("n"))}}] = e.at("y");
            spec.observation = [table](int t, const Point& x, const Point& n) {
                return point_from_json(lookup(*table, t, Pair{x, n}, "observation"));
            };
        } else {
            std::string rule = o.at("rule").get<std::string>();
            if (rule == "identity") {
                spec.observation = [](int, const Point& x, const Point&) { return x; };
            } else if (rule == "translate") {
                spec.observation = [states_at](int t, const Point& x, const Point& n) {
                    return translate_or_stay(x, n, states_at(t));
                };
            } else if (rule == "mod") {
                double m = o.at("modulus").get<double>();
                if (m <= 0) throw SchemaError("modulus must be positive");
                spec.observation = [m](int, const Point& x, const Point&) {
                    std::vector<double> c = x.coords();
                    for (double& v : c) v = v - m * std::floor(v / m);
                    return Point(std::move(c));
                };
            } else if (rule == "constant") {
                Point v = o.contains("value") ? point_from_json(o.at("value")) : Point{0.0};
                spec.observation = [v](int, const Point&, const Point&) { return v; };
            } else {
                throw SchemaError("unknown observation rule '" + rule + "'");
            }
        }

        const json& c = j.at("cost");
        if (c.contains("table")) {
            auto table = std::make_shared<Entries<Pair>>();
            for (const auto& e : c.at("table"))
                (*table)[{entry_time(e),
                          Pair{point_from_json(e.at("x")), point_from_json(e.at("u"))}}] = e.at("c");
            spec.cost = [table](int t, const Point& x, const Point& u) {
                return lookup(*table, t, Pair{x, u}, "cost").get<double>();
            };
        } else {
            std::string rule = c.at("rule").get<std::string>();
            if (rule == "zero") {
                spec.cost = [](int, const Point&, const Point&) { return 0.0; };
            } else if (rule == "abs_diff") {
                spec.cost = [](int, const Point& x, const Point& u) {
                    return Metric::manhattan()(x, u);
                };
            } else {
                throw SchemaError("unknown cost rule '" + rule + "'");
            }
        }
        return tabulate(spec);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("model schema: ") + e.what());
    }
}

json model_to_json(const SystemModel& sys) {
    const int T = sys.horizon();
    json states = json::array(), actions = json::array(), dist = json::array(),
         noises = json::array();
    json dyn = json::array(), obs = json::array(), cost = json::array();
    for (int t = 0; t <= T; ++t) {
        const Stage& s = sys.stage(t);
        states.push_back(to_json(s.states));
        actions.push_back(to_json(s.actions));
        dist.push_back(to_json(s.disturbances));
        noises.push_back(to_json(s.noises));
        for (Index x = 0; x < s.states.size(); ++x) {
            for (Index n = 0; n < s.noises.size(); ++n)
                obs.push_back({{"t", t},
                               {"x", to_json(s.states[x])},
                               {"n", to_json(s.noises[n])},
                               {"y", to_json(s.observations[sys.observe(t, x, n)])}});
            for (Index u = 0; u < s.actions.size(); ++u) {
                cost.push_back({{"t", t},
                                {"x", to_json(s.states[x])},
                                {"u", to_json(s.actions[u])},
                                {"c", sys.cost(t, x, u)}});
                if (t == T) continue;
                for (Index w = 0; w < s.disturbances.size(); ++w)
                    dyn.push_back(
                        {{"t", t},
                         {"x", to_json(s.states[x])},
                         {"u", to_json(s.actions[u])},
                         {"w", to_json(s.disturbances[w])},
                         {"next", to_json(sys.states(t + 1)[sys.next_state(t, x, u, w)])}});
            }
        }
    }
    json j{{"name", sys.name()},
           {"horizon", T},
           {"criterion", to_string(sys.criterion())},
           {"spaces",
            {{"states", {{"per_time", states}}},
             {"actions", {{"per_time", actions}}},
             {"disturbances", {{"per_time", dist}}},
             {"noises", {{"per_time", noises}}},
             {"initial_states", to_json(sys.states(0).select(sys.initial_states()))}}},
           {"metrics",
            {{"state", to_json(sys.state_metric())},
             {"observation", to_json(sys.observation_metric())}}},
           {"observation", {{"table", obs}}},
           {"cost", {{"table", cost}}}};
    if (T > 0) j["dynamics"] = {{"table", dyn}};
    return j;
}

SystemModel load_model_file(const std::string& path) { return model_from_json(read_json_file(path)); }

}  // namespace nsais
