#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsais/model.hpp"

namespace nsais {

// {(-1,0), (1,0), (0,0), (0,1), (0,-1)}: moves, disturbances and pursuit noise.
const FinitePointSet& move_set();

// pos + delta when that cell is feasible, otherwise pos.
Point clip_move(const Point& pos, const Point& delta, const FinitePointSet& feasible);
// Noisy cell observation: the true cell shifted by the noise, clipped the same way.
Point observe(const Point& cell, const Point& noise, const FinitePointSet& feasible);

// ---- wall defense ---------------------------------------------------------

struct WallDefenseConfig {
    int min_col = -2;
    int max_col = 2;
    int horizon = 2;
    Point agent_start{0, 2};
    // Initial attacker cells; empty means every attacker cell.
    std::vector<Point> attacker_start;
    // Quantized attacker cells; empty means the even columns of both rows.
    std::vector<Point> quantized_cells;
};

struct WallDefenseState {
    Point agent;
    Point attacker;
    std::vector<int> damage;  // one entry per column, min_col..max_col
};

FinitePointSet wall_agent_cells(const WallDefenseConfig& cfg);
FinitePointSet wall_attacker_cells(const WallDefenseConfig& cfg);
FinitePointSet wall_quantized_cells(const WallDefenseConfig& cfg);
FinitePointSet wall_attacker_noise();  // {(0,0), (0,1)}

WallDefenseState wall_step(const WallDefenseConfig& cfg, const WallDefenseState& s,
                           const Point& u, const Point& w);
double wall_cost(const std::vector<int>& damage);

// State points are (agent x, agent y, attacker x, attacker y, D...);
// observations are (agent x, agent y, observed attacker x, y, D...).
Point wall_encode(const WallDefenseState& s);
WallDefenseState wall_decode(const WallDefenseConfig& cfg, const Point& x);

// Instantaneous-criterion model over the full product state space.
SystemModel wall_defense_model(const WallDefenseConfig& cfg);

// ---- pursuit evasion ------------------------------------------------------

struct PursuitConfig {
    int radius = 4;  // grid is [-radius, radius]^2
    std::vector<Point> obstacles;
    int horizon = 3;
    Point agent_start{0, 2};
    // Initial target cells; empty means every free cell.
    std::vector<Point> target_start;
};

struct PursuitState {
    Point agent;
    Point target;
};

// Default layouts: seven obstacles on the 9x9 grid, two on the 5x5 grid.
std::vector<Point> default_pursuit_obstacles();
std::vector<Point> reduced_pursuit_obstacles();

FinitePointSet pursuit_free_cells(const PursuitConfig& cfg);
PursuitState pursuit_step(const FinitePointSet& free_cells, const PursuitState& s, const Point& u,
                          const Point& w);
// Obstacle-avoiding 4-neighbour path length on [-radius, radius]^2.
double pursuit_terminal_cost(const Point& target, const Point& agent,
                             const std::vector<Point>& obstacles, int radius = 4);

// Terminal-criterion model; the agent has the single null action at T and
// observes the target exactly then.
SystemModel pursuit_model(const PursuitConfig& cfg);

// ---- configuration --------------------------------------------------------

// How to split state and observation points into agent / other parts for traces.
struct TraceLayout {
    std::size_t agent_offset = 0, agent_length = 0;
    std::size_t other_offset = 0, other_length = 0;  // in the state
    std::size_t obs_offset = 0, obs_length = 0;      // in the observation
};

struct Environment {
    std::string kind;  // "wall_defense", "pursuit" or "model"
    SystemModel model;
    TraceLayout layout;
    std::optional<WallDefenseConfig> wall;
    std::optional<PursuitConfig> pursuit;
};

WallDefenseConfig wall_config_from_json(const nlohmann::json& j);
PursuitConfig pursuit_config_from_json(const nlohmann::json& j);

// {"type": "wall_defense" | "pursuit", ...} builds a benchmark; otherwise the
// object is read as a model file.
Environment environment_from_json(const nlohmann::json& j);

}  // namespace nsais
