#include "nsais/envs.hpp"

#include <algorithm>

#include "nsais/ranges_io.hpp"
#include "nsais/model_io.hpp"

namespace nsais {

const FinitePointSet& move_set() {
    static const FinitePointSet moves{{-1, 0}, {1, 0}, {0, 0}, {0, 1}, {0, -1}};
    return moves;
}

Point clip_move(const Point& pos, const Point& delta, const FinitePointSet& feasible) {
    if (pos.dim() != 2 || delta.dim() != 2) throw DimensionMismatch("cells are 2-d");
    Point moved{pos[0] + delta[0], pos[1] + delta[1]};
    return feasible.contains(moved) ? moved : pos;
}

Point observe(const Point& cell, const Point& noise, const FinitePointSet& feasible) {
    return clip_move(cell, noise, feasible);
}

// ---- wall defense ---------------------------------------------------------

namespace {

constexpr int kMaxDamage = 3;

FinitePointSet rows(int lo_col, int hi_col, std::initializer_list<int> ys) {
    std::vector<Point> cells;
    for (int x = lo_col; x <= hi_col; ++x)
        for (int y : ys) cells.push_back(Point{static_cast<double>(x), static_cast<double>(y)});
    return FinitePointSet(std::move(cells));
}

void check_columns(const WallDefenseConfig& cfg) {
    if (cfg.min_col > cfg.max_col) throw SchemaError("wall defense needs min_col <= max_col");
}

}  // namespace

FinitePointSet wall_agent_cells(const WallDefenseConfig& cfg) {
    check_columns(cfg);
    return rows(cfg.min_col, cfg.max_col, {1, 2});
}

FinitePointSet wall_attacker_cells(const WallDefenseConfig& cfg) {
    check_columns(cfg);
    return rows(cfg.min_col, cfg.max_col, {-1, -2});
}

FinitePointSet wall_quantized_cells(const WallDefenseConfig& cfg) {
    if (!cfg.quantized_cells.empty()) {
        FinitePointSet q(cfg.quantized_cells);
        FinitePointSet all = wall_attacker_cells(cfg);
        for (const auto& c : q)
            if (!all.contains(c)) throw SchemaError("quantized cell " + c.str() + " is off-grid");
        return q;
    }
    std::vector<Point> cells;
    for (const auto& c : wall_attacker_cells(cfg))
        if (static_cast<long>(c[0]) % 2 == 0) cells.push_back(c);
    if (cells.empty()) throw SchemaError("no even column in the wall strip");
    return FinitePointSet(std::move(cells));
}

FinitePointSet wall_attacker_noise() { return FinitePointSet{{0, 0}, {0, 1}}; }

namespace {

WallDefenseState step_with(const WallDefenseConfig& cfg, const FinitePointSet& ag,
                           const FinitePointSet& at, const WallDefenseState& s, const Point& u,
                           const Point& w) {
    WallDefenseState n;
    n.damage = s.damage;
    for (int i = cfg.min_col; i <= cfg.max_col; ++i) {
        const double col = i;
        int attack = s.attacker == Point{col, -1} ? 1 : 0;
        int repair = s.agent == Point{col, 1} ? 1 : 0;
        int& d = n.damage[static_cast<std::size_t>(i - cfg.min_col)];
        d = std::min(kMaxDamage, std::max(0, d + attack - repair));
    }
    n.agent = clip_move(s.agent, u, ag);
    n.attacker = clip_move(s.attacker, w, at);
    return n;
}

}  // namespace

WallDefenseState wall_step(const WallDefenseConfig& cfg, const WallDefenseState& s,
                           const Point& u, const Point& w) {
    return step_with(cfg, wall_agent_cells(cfg), wall_attacker_cells(cfg), s, u, w);
}

double wall_cost(const std::vector<int>& damage) {
    double c = 0.0;
    for (int d : damage) c += d;
    return c;
}

Point wall_encode(const WallDefenseState& s) {
    std::vector<double> c{s.agent[0], s.agent[1], s.attacker[0], s.attacker[1]};
    for (int d : s.damage) c.push_back(d);
    return Point(std::move(c));
}

WallDefenseState wall_decode(const WallDefenseConfig& cfg, const Point& x) {
    const std::size_t cols = static_cast<std::size_t>(cfg.max_col - cfg.min_col + 1);
    if (x.dim() != 4 + cols) throw DimensionMismatch("wall state has the wrong dimension");
    WallDefenseState s{Point{x[0], x[1]}, Point{x[2], x[3]}, {}};
    for (std::size_t i = 0; i < cols; ++i) s.damage.push_back(static_cast<int>(x[4 + i]));
    return s;
}

SystemModel wall_defense_model(const WallDefenseConfig& cfg) {
    const FinitePointSet ag = wall_agent_cells(cfg);
    const FinitePointSet at = wall_attacker_cells(cfg);
    if (!ag.contains(cfg.agent_start)) throw SchemaError("agent_start is not an agent cell");
    const std::size_t cols = static_cast<std::size_t>(cfg.max_col - cfg.min_col + 1);

    std::vector<std::vector<int>> damages{{}};
    for (std::size_t i = 0; i < cols; ++i) {
        std::vector<std::vector<int>> grown;
        for (const auto& d : damages)
            for (int v = 0; v <= kMaxDamage; ++v) {
                grown.push_back(d);
                grown.back().push_back(v);
            }
        damages = std::move(grown);
    }
    std::vector<Point> states;
    for (const auto& a : ag)
        for (const auto& b : at)
            for (const auto& d : damages) states.push_back(wall_encode({a, b, d}));

    std::vector<Point> init;
    FinitePointSet starts = cfg.attacker_start.empty() ? at : FinitePointSet(cfg.attacker_start);
    for (const auto& b : starts) {
        if (!at.contains(b)) throw SchemaError("attacker_start cell " + b.str() + " is off-grid");
        init.push_back(wall_encode({cfg.agent_start, b, std::vector<int>(cols, 0)}));
    }

    StateSpaceSpec spec;
    spec.name = "wall_defense";
    spec.horizon = cfg.horizon;
    spec.criterion = Criterion::instantaneous;
    spec.states = {FinitePointSet(std::move(states))};
    spec.actions = {move_set()};
    spec.disturbances = {move_set()};
    spec.noises = {wall_attacker_noise()};
    spec.initial_states = FinitePointSet(std::move(init));
    spec.dynamics = [cfg, ag, at](int, const Point& x, const Point& u, const Point& w) {
        return wall_encode(step_with(cfg, ag, at, wall_decode(cfg, x), u, w));
    };
    spec.observation = [cfg, at](int, const Point& x, const Point& n) {
        WallDefenseState s = wall_decode(cfg, x);
        s.attacker = observe(s.attacker, n, at);
        return wall_encode(s);
    };
    spec.cost = [cfg](int, const Point& x, const Point&) {
        return wall_cost(wall_decode(cfg, x).damage);
    };
    auto product = Metric::product({block(0, 2, Metric::manhattan()),
                                    block(2, 2, Metric::manhattan()),
                                    block(4, cols, Metric::manhattan())});
    spec.state_metric = product;
    spec.observation_metric = product;
    return tabulate(spec);
}

// ---- pursuit evasion ------------------------------------------------------

std::vector<Point> default_pursuit_obstacles() {
    return {{-2, 1}, {-2, 0}, {-2, -1}, {1, 3}, {2, 3}, {1, -2}, {2, -2}};
}

std::vector<Point> reduced_pursuit_obstacles() { return {{-1, 0}, {1, -1}}; }

FinitePointSet pursuit_free_cells(const PursuitConfig& cfg) {
    if (cfg.radius < 0) throw SchemaError("pursuit radius must be nonnegative");
    FinitePointSet blocked(cfg.obstacles);
    std::vector<Point> cells;
    for (int x = -cfg.radius; x <= cfg.radius; ++x)
        for (int y = -cfg.radius; y <= cfg.radius; ++y) {
            Point c{static_cast<double>(x), static_cast<double>(y)};
            if (!blocked.contains(c)) cells.push_back(c);
        }
    return FinitePointSet(std::move(cells));
}

PursuitState pursuit_step(const FinitePointSet& free_cells, const PursuitState& s, const Point& u,
                          const Point& w) {
    return {clip_move(s.agent, u, free_cells), clip_move(s.target, w, free_cells)};
}

double pursuit_terminal_cost(const Point& target, const Point& agent,
                             const std::vector<Point>& obstacles, int radius) {
    PursuitConfig cfg;
    cfg.radius = radius;
    cfg.obstacles = obstacles;
    FinitePointSet free_cells = pursuit_free_cells(cfg);
    if (!free_cells.contains(target) || !free_cells.contains(agent))
        throw OutOfDomain("terminal cost needs obstacle-free cells");
    return Metric::shortest_path(free_cells)(target, agent);
}

SystemModel pursuit_model(const PursuitConfig& cfg) {
    const FinitePointSet free_cells = pursuit_free_cells(cfg);
    if (!free_cells.contains(cfg.agent_start)) throw SchemaError("agent_start is not a free cell");
    const Metric path = Metric::shortest_path(free_cells);
    // Fail early on a disconnected layout rather than at the first cost lookup.
    for (const auto& c : free_cells) path(free_cells[0], c);

    std::vector<Point> states;
    for (const auto& a : free_cells)
        for (const auto& b : free_cells) states.push_back(concat(a, b));
    std::vector<Point> init;
    FinitePointSet starts =
        cfg.target_start.empty() ? free_cells : FinitePointSet(cfg.target_start);
    for (const auto& b : starts) {
        if (!free_cells.contains(b)) throw SchemaError("target_start cell " + b.str() + " is blocked");
        init.push_back(concat(cfg.agent_start, b));
    }

    const int T = cfg.horizon;
    const FinitePointSet still{{0, 0}};
    StateSpaceSpec spec;
    spec.name = "pursuit";
    spec.horizon = T;
    spec.criterion = Criterion::terminal;
    spec.states = {FinitePointSet(std::move(states))};
    for (int t = 0; t <= T; ++t) {
        spec.actions.push_back(t < T ? move_set() : still);
        spec.disturbances.push_back(move_set());
        spec.noises.push_back(t < T ? move_set() : still);
    }
    spec.initial_states = FinitePointSet(std::move(init));
    spec.dynamics = [free_cells](int, const Point& x, const Point& u, const Point& w) {
        PursuitState s = pursuit_step(free_cells, {x.slice(0, 2), x.slice(2, 2)}, u, w);
        return concat(s.agent, s.target);
    };
    spec.observation = [free_cells](int, const Point& x, const Point& n) {
        return concat(x.slice(0, 2), observe(x.slice(2, 2), n, free_cells));
    };
    spec.cost = [T, path](int t, const Point& x, const Point&) {
        return t == T ? path(x.slice(2, 2), x.slice(0, 2)) : 0.0;
    };
    auto product = Metric::product({block(0, 2, path), block(2, 2, path)});
    spec.state_metric = product;
    spec.observation_metric = product;
    return tabulate(spec);
}

// ---- configuration --------------------------------------------------------

namespace {

std::vector<Point> cells_from_json(const nlohmann::json& j, const char* key) {
    std::vector<Point> out;
    if (!j.contains(key)) return out;
    const auto& v = j.at(key);
    if (v.is_string() && v.get<std::string>() == "any") return out;
    for (const auto& c : v) {
        Point p = point_from_json(c);
        if (p.dim() != 2) throw SchemaError(std::string(key) + " entries must be 2-d cells");
        out.push_back(p);
    }
    return out;
}

}  // namespace

WallDefenseConfig wall_config_from_json(const nlohmann::json& j) {
    try {
        WallDefenseConfig cfg;
        cfg.min_col = j.value("min_col", cfg.min_col);
        cfg.max_col = j.value("max_col", cfg.max_col);
        cfg.horizon = j.value("horizon", cfg.horizon);
        if (cfg.horizon < 0) throw SchemaError("horizon must be nonnegative");
        if (j.contains("agent_start")) cfg.agent_start = point_from_json(j.at("agent_start"));
        cfg.attacker_start = cells_from_json(j, "attacker_start");
        cfg.quantized_cells = cells_from_json(j, "quantized_cells");
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("wall defense config: ") + e.what());
    }
}

PursuitConfig pursuit_config_from_json(const nlohmann::json& j) {
    try {
        PursuitConfig cfg;
        cfg.radius = j.value("radius", cfg.radius);
        cfg.horizon = j.value("horizon", cfg.horizon);
        if (cfg.horizon < 0) throw SchemaError("horizon must be nonnegative");
        if (j.contains("obstacles"))
            cfg.obstacles = cells_from_json(j, "obstacles");
        else
            cfg.obstacles = cfg.radius == 4 ? default_pursuit_obstacles()
                                            : reduced_pursuit_obstacles();
        if (j.contains("agent_start")) cfg.agent_start = point_from_json(j.at("agent_start"));
        cfg.target_start = cells_from_json(j, "target_start");
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("pursuit config: ") + e.what());
    }
}

Environment environment_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("environment must be a JSON object");
    const std::string type = j.value("type", std::string("model"));
    Environment env;
    env.kind = type;
    if (type == "wall_defense") {
        env.wall = wall_config_from_json(j);
        env.model = wall_defense_model(*env.wall);
        env.layout = {0, 2, 2, 2, 2, 2};
    } else if (type == "pursuit") {
        env.pursuit = pursuit_config_from_json(j);
        env.model = pursuit_model(*env.pursuit);
        env.layout = {0, 2, 2, 2, 2, 2};
    } else if (type == "model") {
        env.model = model_from_json(j);
        env.layout = {0, 0, 0, env.model.states(0).dim(), 0, env.model.observations(0).dim()};
    } else {
        throw SchemaError("unknown environment type '" + type + "'");
    }
    return env;
}

}  // namespace nsais
