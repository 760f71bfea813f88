#include <gtest/gtest.h>

#include <deque>
#include <map>
#include <random>

#include "nsais/envs.hpp"
#include "nsais/model_io.hpp"

using namespace nsais;

namespace {

// Breadth-first search on the free cells, independent of the metric code.
int bfs(const FinitePointSet& free_cells, const Point& a, const Point& b) {
    std::map<Point, int> dist{{a, 0}};
    std::deque<Point> q{a};
    while (!q.empty()) {
        Point p = q.front();
        q.pop_front();
        if (p == b) return dist[p];
        for (const Point& d : {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}}) {
            Point n{p[0] + d[0], p[1] + d[1]};
            if (free_cells.contains(n) && !dist.count(n)) {
                dist[n] = dist[p] + 1;
                q.push_back(n);
            }
        }
    }
    return -1;
}

WallDefenseState wall_state(Point agent, Point attacker, std::vector<int> damage) {
    return {agent, attacker, std::move(damage)};
}

}  // namespace

TEST(ClipMove, Examples) {
    FinitePointSet grid = pursuit_free_cells(PursuitConfig{.radius = 2, .obstacles = {{1, 0}}});
    EXPECT_EQ(clip_move(Point{0, 0}, Point{0, 0}, grid), (Point{0, 0}));
    EXPECT_EQ(clip_move(Point{0, 0}, Point{1, 0}, grid), (Point{0, 0}));  // into the obstacle
    EXPECT_EQ(clip_move(Point{0, 0}, Point{0, 1}, grid), (Point{0, 1}));
    WallDefenseConfig cfg;
    EXPECT_EQ(clip_move(Point{2, 2}, Point{1, 0}, wall_agent_cells(cfg)), (Point{2, 2}));
    EXPECT_EQ(clip_move(Point{2, 2}, Point{-1, 0}, wall_agent_cells(cfg)), (Point{1, 2}));
}

TEST(Observe, WallNoise) {
    const FinitePointSet at = wall_attacker_cells(WallDefenseConfig{});
    EXPECT_EQ(observe(Point{0, -1}, Point{0, 0}, at), (Point{0, -1}));
    EXPECT_EQ(observe(Point{0, -1}, Point{0, 1}, at), (Point{0, -1}));
    EXPECT_EQ(observe(Point{0, -2}, Point{0, 1}, at), (Point{0, -1}));
}

TEST(WallStep, DamageRule) {
    WallDefenseConfig cfg;
    const Point stay{0, 0};
    auto s = wall_step(cfg, wall_state({2, 2}, {0, -1}, {0, 0, 3, 0, 0}), stay, stay);
    EXPECT_EQ(s.damage[2], 3);
    s = wall_step(cfg, wall_state({0, 1}, {2, -2}, {0, 0, 0, 0, 0}), stay, stay);
    EXPECT_EQ(s.damage[2], 0);
    s = wall_step(cfg, wall_state({0, 1}, {0, -1}, {0, 0, 1, 0, 0}), stay, stay);
    EXPECT_EQ(s.damage[2], 1);
    s = wall_step(cfg, wall_state({2, 2}, {-2, -1}, {0, 0, 0, 0, 0}), Point{0, -1}, Point{1, 0});
    EXPECT_EQ(s.damage, (std::vector<int>{1, 0, 0, 0, 0}));
    EXPECT_EQ(s.agent, (Point{2, 1}));
    EXPECT_EQ(s.attacker, (Point{-1, -1}));
}

TEST(WallCost, Sums) {
    EXPECT_EQ(wall_cost({0, 0, 0, 0, 0}), 0.0);
    EXPECT_EQ(wall_cost({3, 3, 3, 3, 3}), 15.0);
    EXPECT_EQ(wall_cost({1, 0, 2, 0, 0}), 3.0);
}

TEST(WallDefense, EncodeDecode) {
    WallDefenseConfig cfg;
    const auto s = wall_state({-1, 2}, {2, -2}, {0, 1, 2, 3, 0});
    const auto back = wall_decode(cfg, wall_encode(s));
    EXPECT_EQ(back.agent, s.agent);
    EXPECT_EQ(back.attacker, s.attacker);
    EXPECT_EQ(back.damage, s.damage);
    EXPECT_THROW(wall_decode(cfg, Point{0, 0}), DimensionMismatch);
}

TEST(WallDefense, InitialRangeFromNoisyAttacker) {
    WallDefenseConfig cfg{.min_col = -1, .max_col = 1, .horizon = 1};
    const SystemModel sys = wall_defense_model(cfg);
    const Point y0 = wall_encode(wall_state({0, 2}, {0, -1}, {0, 0, 0}));
    std::vector<Point> attackers;
    for (const Point& x : support_points(sys, range_filter_init(sys, y0))) attackers.push_back(wall_decode(cfg, x).attacker);
    EXPECT_EQ(FinitePointSet(attackers), (FinitePointSet{Point{0, -1}, Point{0, -2}}));
    EXPECT_EQ(sys.states(0).size(), 6u * 6u * 64u);
    EXPECT_FALSE(sys.perfectly_observed());
}

TEST(WallDefense, DamageStaysInBoundsUnderRandomPlay) {
    WallDefenseConfig cfg;
    std::mt19937_64 rng(21);
    const auto& moves = move_set();
    for (int run = 0; run < 200; ++run) {
        auto s = wall_state({0, 2}, {static_cast<double>(int(rng() % 5) - 2), -1.0 - double(rng() % 2)}, {0, 0, 0, 0, 0});
        for (int t = 0; t < 30; ++t) {
            s = wall_step(cfg, s, moves[rng() % 5], moves[rng() % 5]);
            for (int d : s.damage) ASSERT_TRUE(d >= 0 && d <= 3);
            ASSERT_TRUE(wall_agent_cells(cfg).contains(s.agent));
            ASSERT_TRUE(wall_attacker_cells(cfg).contains(s.attacker));
        }
    }
}

TEST(WallDefense, QuantizedCellsDefaultToEvenColumns) {
    WallDefenseConfig cfg;
    const auto q = wall_quantized_cells(cfg);
    EXPECT_EQ(q.size(), 6u);
    for (const Point& c : q) EXPECT_EQ(static_cast<int>(c[0]) % 2, 0);
    cfg.quantized_cells = {{9, -1}};
    EXPECT_THROW(wall_quantized_cells(cfg), SchemaError);
}

TEST(PursuitStep, Examples) {
    PursuitConfig cfg{.radius = 2, .obstacles = reduced_pursuit_obstacles()};
    const auto free_cells = pursuit_free_cells(cfg);
    PursuitState s{{0, 0}, {2, 2}};
    auto n = pursuit_step(free_cells, s, Point{0, 0}, Point{0, 0});
    EXPECT_EQ(n.agent, s.agent);
    EXPECT_EQ(n.target, s.target);
    n = pursuit_step(free_cells, s, Point{0, 1}, Point{1, 0});
    EXPECT_EQ(n.agent, (Point{0, 1}));
    EXPECT_EQ(n.target, (Point{2, 2}));  // boundary
    n = pursuit_step(free_cells, s, Point{-1, 0}, Point{0, 0});
    EXPECT_EQ(n.agent, (Point{0, 0}));  // (-1, 0) is an obstacle
}

TEST(PursuitCost, Examples) {
    EXPECT_EQ(pursuit_terminal_cost(Point{1, 1}, Point{1, 1}, {}), 0.0);
    EXPECT_EQ(pursuit_terminal_cost(Point{1, 1}, Point{1, 2}, {}), 1.0);
    EXPECT_EQ(pursuit_terminal_cost(Point{0, 0}, Point{2, 3}, {}), 5.0);
    // A wall of obstacles forces a detour.
    const std::vector<Point> wall{{0, -1}, {0, 0}, {0, 1}};
    EXPECT_EQ(pursuit_terminal_cost(Point{-1, 0}, Point{1, 0}, wall, 2), 6.0);
    EXPECT_THROW(pursuit_terminal_cost(Point{0, 0}, Point{1, 0}, wall, 2), OutOfDomain);
    const std::vector<Point> cut{{0, -1}, {0, 0}, {0, 1}, {0, 2}, {0, -2}};
    EXPECT_THROW(pursuit_terminal_cost(Point{-1, 0}, Point{1, 0}, cut, 2), Disconnected);
}

TEST(PursuitCost, IsAMetricOnTheReducedGrid) {
    PursuitConfig cfg{.radius = 2, .obstacles = reduced_pursuit_obstacles()};
    const auto cells = pursuit_free_cells(cfg);
    const auto obs = reduced_pursuit_obstacles();
    std::map<std::pair<Point, Point>, double> table;
    auto d = [&](const Point& a, const Point& b) { return table.at(std::make_pair(a, b)); };
    for (const Point& a : cells)
        for (const Point& b : cells) {
            table[std::make_pair(a, b)] = pursuit_terminal_cost(a, b, obs, 2);
            ASSERT_EQ(d(a, b), bfs(cells, a, b));
        }
    for (const Point& a : cells)
        for (const Point& b : cells) {
            EXPECT_EQ(d(a, b), d(b, a));
            EXPECT_EQ(d(a, b) == 0.0, a == b);
            for (const Point& c : cells) EXPECT_LE(d(a, c), d(a, b) + d(b, c));
        }
}

TEST(Pursuit, ModelShape) {
    PursuitConfig cfg{.radius = 2, .obstacles = reduced_pursuit_obstacles(), .horizon = 2};
    const SystemModel sys = pursuit_model(cfg);
    EXPECT_EQ(sys.criterion(), Criterion::terminal);
    EXPECT_EQ(sys.states(0).size(), 23u * 23u);
    EXPECT_EQ(sys.initial_states().size(), 23u);
    EXPECT_EQ(sys.actions(2).size(), 1u);
    EXPECT_EQ(sys.noises(2).size(), 1u);  // the target is seen exactly at T
    for (Index x = 0; x < sys.states(0).size(); ++x) EXPECT_EQ(sys.cost(0, x, 0), 0.0);
    cfg.agent_start = Point{-1, 0};
    EXPECT_THROW(pursuit_model(cfg), SchemaError);
}

TEST(Environments, ModelsAreClosedAndTotal) {
    std::vector<SystemModel> models{
        wall_defense_model({.min_col = -1, .max_col = 1, .horizon = 2}),
        pursuit_model({.radius = 2, .obstacles = reduced_pursuit_obstacles(), .horizon = 2})};
    for (const SystemModel& sys : models) {
        for (int t = 0; t <= sys.horizon(); ++t) {
            const Stage& s = sys.stage(t);
            for (double c : s.cost) EXPECT_GE(c, 0.0);
            EXPECT_EQ(s.observe.size(), s.states.size() * s.noises.size());
            if (t < sys.horizon()) {
                EXPECT_EQ(s.next.size(), s.states.size() * s.actions.size() * s.disturbances.size());
                for (Index x : s.next) EXPECT_LT(x, sys.states(t + 1).size());
            }
        }
    }
}

TEST(Environments, FromJson) {
    const auto wall = environment_from_json(nlohmann::json::parse(
        R"({"type": "wall_defense", "min_col": -1, "max_col": 1, "horizon": 1,
            "quantized_cells": [[0, -1], [0, -2]]})"));
    EXPECT_EQ(wall.kind, "wall_defense");
    ASSERT_TRUE(wall.wall.has_value());
    EXPECT_EQ(wall.wall->quantized_cells.size(), 2u);
    const auto pursuit = environment_from_json(nlohmann::json::parse(R"({"type": "pursuit", "radius": 2, "horizon": 1})"));
    EXPECT_EQ(pursuit.kind, "pursuit");
    EXPECT_EQ(pursuit.pursuit->obstacles, reduced_pursuit_obstacles());
    EXPECT_THROW(environment_from_json(nlohmann::json::parse(R"({"type": "pursuit", "radius": 2, "agent_start": [-1, 0]})")),
                 SchemaError);
}
