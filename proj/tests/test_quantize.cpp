#include <gtest/gtest.h>

#include <cmath>

#include "corpus.hpp"
#include "nsais/quantize.hpp"
#include "nsais/ranges.hpp"
#include "oracles.hpp"

using namespace nsais;
using testkit::make_corpus;

namespace {

FinitePointSet S(std::initializer_list<double> v) { return FinitePointSet::scalars(v); }

// Perfectly observed line 0..4 with identity dynamics and cost x.
SystemModel line(int horizon) {
    StateSpaceSpec s;
    s.horizon = horizon;
    s.states = {FinitePointSet::range(0, 4)};
    s.actions = {FinitePointSet::range(0, 0)};
    s.disturbances = {FinitePointSet::range(0, 0)};
    s.noises = {FinitePointSet::range(0, 0)};
    s.initial_states = FinitePointSet::range(0, 4);
    s.dynamics = [](int, const Point& x, const Point&, const Point&) { return x; };
    s.observation = [](int, const Point& x, const Point&) { return x; };
    s.cost = [](int, const Point& x, const Point&) { return x[0]; };
    return tabulate(s);
}

// Max over x of the distance to the nearest grid point, written out directly.
double cover(const FinitePointSet& x, const FinitePointSet& grid, const Metric& m) {
    double r = 0.0;
    for (const Point& p : x) {
        double lo = INFINITY;
        for (const Point& g : grid) lo = std::min(lo, m(p, g));
        r = std::max(r, lo);
    }
    return r;
}

testkit::CorpusOptions bounds_corpus() {
    return {.max_states = 8, .max_horizon = 3, .perfect_share = 0.5};
}

}  // namespace

TEST(Grid, Examples) {
    const Metric e = Metric::euclidean();
    const auto x = FinitePointSet::range(0, 4);
    EXPECT_EQ(build_grid(x, 0.0, e).points, x);
    EXPECT_TRUE(build_grid(x, 0.0, e).exact);
    const GridBlock g = build_grid(x, 1.0, e);
    EXPECT_EQ(g.points, S({0, 2, 4}));
    EXPECT_EQ(g.gamma, 1.0);
}

TEST(Grid, CoverInvariantOnRandomSets) {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 300; ++i) {
        std::vector<Point> pts;
        const int n = testkit::uniform_int(rng, 1, 12);
        for (int k = 0; k < n; ++k)
            pts.push_back(Point{double(testkit::uniform_int(rng, -5, 5)), double(testkit::uniform_int(rng, -5, 5))});
        const FinitePointSet x(pts);
        const double gamma = testkit::uniform_int(rng, 0, 4) * 0.75;
        for (const Metric& m : {Metric::euclidean(), Metric::manhattan(), Metric::chebyshev()}) {
            const GridBlock g = build_grid(x, gamma, m);
            EXPECT_LE(cover(x, g.points, m), gamma + kTolerance);
            EXPECT_EQ(cover(x, g.points, m), g.gamma);
            for (const Point& p : g.points) EXPECT_TRUE(x.contains(p));
        }
    }
}

TEST(Quantize, PointExamples) {
    const GridBlock g = build_grid(FinitePointSet::range(0, 4), 1.0, Metric::euclidean());
    EXPECT_EQ(quantize_point(g, Point{2}), Point{2});
    EXPECT_EQ(quantize_point(g, Point{3}), Point{2});
    EXPECT_EQ(quantize_point(g, Point{1}), Point{0});
}

TEST(Quantize, RangeExamples) {
    const GridBlock g = build_grid(FinitePointSet::range(0, 4), 1.0, Metric::euclidean());
    EXPECT_EQ(quantize_range(g, S({3})), S({2}));
    EXPECT_EQ(quantize_range(g, S({1, 2})), S({0, 2}));
    EXPECT_EQ(quantize_range(g, S({0, 4})), S({0, 4}));
    EXPECT_THROW(quantize_range(g, FinitePointSet{}), EmptySet);
}

TEST(Quantize, UniformGridCoversEveryStage) {
    for (const SystemModel& sys : make_corpus(30, 52)) {
        for (double gamma : {0.0, 1.0, 2.0}) {
            const QuantizationGrid grid = uniform_grid(sys, gamma);
            for (int t = 0; t <= sys.horizon(); ++t) {
                EXPECT_LE(cover_radius(sys, grid, t), gamma + kTolerance);
                EXPECT_EQ(cover_radius(sys, grid, t), grid.gamma[static_cast<std::size_t>(t)]);
                const auto mu = mu_table(sys, grid, t);
                for (Index x = 0; x < mu.size(); ++x)
                    EXPECT_EQ(sys.states(t)[mu[x]], quantize_point(grid, t, sys.states(t)[x]));
            }
        }
    }
}

TEST(Quantize, BlockGridRejectsPointsOutsideTheStates) {
    const SystemModel sys = line(0);
    EXPECT_THROW(mu_table(sys, block_grid(sys, {BlockSpec{0, 1, Metric::euclidean(), S({10})}}), 0), OutOfDomain);
}

TEST(Quantize, WallGridHasUnitRadius) {
    WallDefenseConfig cfg{.min_col = -2, .max_col = 2, .horizon = 1};
    const SystemModel sys = wall_defense_model(cfg);
    const QuantizationGrid grid = wall_defense_grid(sys, cfg);
    EXPECT_EQ(grid.gamma[0], 1.0);
    EXPECT_EQ(cover_radius(sys, grid, 1), 1.0);
}

TEST(Quantize, PursuitGridKeepsTheAgentExact) {
    PursuitConfig cfg{.radius = 2, .obstacles = reduced_pursuit_obstacles(), .horizon = 1};
    const SystemModel sys = pursuit_model(cfg);
    const QuantizationGrid grid = pursuit_grid(sys, cfg, 2.0);
    EXPECT_LE(grid.gamma[0], 2.0);
    EXPECT_GT(grid.gamma[0], 0.0);
    const auto mu = mu_table(sys, grid, 0);
    for (Index x = 0; x < mu.size(); ++x)
        EXPECT_EQ(sys.states(0)[mu[x]].slice(0, 2), sys.states(0)[x].slice(0, 2));
}

TEST(Bounds, PerfectFormulaExamples) {
    const SystemModel sys = line(2);
    const EpsDelta zero = perfect_obs_bounds(sys, uniform_grid(sys, 0.0));
    EXPECT_EQ(zero.eps, (std::vector<double>{0, 0, 0}));
    EXPECT_EQ(zero.delta, (std::vector<double>{0, 0, 0}));
    LipschitzReport l;
    const EpsDelta one = perfect_obs_bounds(sys, uniform_grid(sys, 1.0), &l);
    EXPECT_EQ(l.L_d, (std::vector<double>{1, 1, 1}));
    EXPECT_EQ(l.L_f, (std::vector<double>{1, 1, 0}));
    EXPECT_EQ(one.eps, (std::vector<double>{2, 2, 2}));
    EXPECT_EQ(one.delta, (std::vector<double>{4, 4, 0}));
}

TEST(Bounds, PartialFormulaStructure) {
    for (const SystemModel& sys : make_corpus(30, 53, {.perfect_share = 0.0})) {
        const QuantizationGrid zero = uniform_grid(sys, 0.0);
        const EpsDelta z = partial_obs_bounds(sys, zero);
        for (double v : z.eps) EXPECT_EQ(v, 0.0);
        for (double v : z.delta) EXPECT_EQ(v, 0.0);

        const QuantizationGrid grid = uniform_grid(sys, 1.0);
        LipschitzReport l;
        const EpsDelta p = partial_obs_bounds(sys, grid, &l);
        EXPECT_EQ(p.eps, perfect_obs_bounds(sys, grid).eps);
        const int T = sys.horizon();
        for (int t = 0; t <= T; ++t) {
            const auto ti = static_cast<std::size_t>(t);
            const double g1 = t < T ? grid.gamma[ti + 1] : 0.0;
            const double prod = l.L_fbar[ti] * l.L_h[ti] * l.L_f[ti] * grid.gamma[ti];
            // An infinite L_fbar (successors move although L_h L_f = 0) makes the term infinite.
            const double term = grid.gamma[ti] == 0.0 || l.L_fbar[ti] == 0.0 ? 0.0
                                : std::isinf(l.L_fbar[ti])                   ? INFINITY
                                                                            : 2 * prod;
            const double expect = 2 * g1 + term;
            EXPECT_EQ(p.delta[ti], expect) << "t=" << t;
        }
    }
}

TEST(Bounds, FormulasGrowWithGamma) {
    for (const SystemModel& sys : make_corpus(30, 54, {.perfect_share = 1.0})) {
        QuantizationGrid grid = uniform_grid(sys, 1.0);
        const EpsDelta fine = perfect_obs_bounds(sys, grid);
        for (double& g : grid.gamma) g += 1.0;
        const EpsDelta coarse = perfect_obs_bounds(sys, grid);
        for (std::size_t t = 0; t < fine.eps.size(); ++t) {
            EXPECT_LE(fine.eps[t], coarse.eps[t]);
            EXPECT_LE(fine.delta[t], coarse.delta[t]);
        }
    }
}

TEST(Bounds, ExactAbstractionsMeasureZero) {
    for (const SystemModel& sys : make_corpus(30, 55)) {
        for (const InfoAbstraction& a :
             {build_info_state_abstraction(sys), build_quantized_abstraction(sys, uniform_grid(sys, 0.0))}) {
            const EpsDelta m = empirical_eps_delta(sys, a);
            for (double v : m.eps) EXPECT_EQ(v, 0.0);
            for (double v : m.delta) EXPECT_EQ(v, 0.0);
        }
    }
}

TEST(Bounds, MeasuredNeverExceedsFormulas) {
    int instances = 0;
    for (const SystemModel& sys : make_corpus(50, 56, bounds_corpus())) {
        for (double gamma : {1.0, 2.0}) {
            const QuantizationGrid grid = uniform_grid(sys, gamma);
            const EpsDelta f = formula_bounds(sys, grid);
            const EpsDelta m = empirical_eps_delta(sys, build_quantized_abstraction(sys, grid));
            for (std::size_t t = 0; t < f.eps.size(); ++t) {
                EXPECT_TRUE(approx_le(m.eps[t], f.eps[t])) << "eps t=" << t;
                EXPECT_TRUE(approx_le(m.delta[t], f.delta[t])) << "delta t=" << t;
            }
            ++instances;
        }
    }
    EXPECT_EQ(instances, 100);
}

TEST(Bounds, ValueAndRegretBounds) {
    for (const SystemModel& sys : make_corpus(40, 57, bounds_corpus())) {
        for (double gamma : {1.0, 2.0}) {
            const BoundReport r = bound_report(sys, uniform_grid(sys, gamma), false, true);
            ASSERT_TRUE(r.value_checks.has_value());
            EXPECT_TRUE(r.formulas_hold());
            EXPECT_TRUE(r.value_checks->value_bound_holds);
            EXPECT_TRUE(r.value_checks->regret_bound_holds);
            EXPECT_GE(r.value_checks->min_regret, 0.0);
            for (std::size_t t = 0; t < r.alpha.size(); ++t)
                EXPECT_TRUE(approx_le(r.value_checks->value_gap[t], r.alpha[t]));
        }
    }
}

TEST(Lipschitz, ValueFunctionExamples) {
    InfoAbstraction a;
    a.stages.resize(1);
    a.stages[0].keys = {Key{0}, Key{1}};
    a.key_distance = [](int, const Key& x, const Key& y) { return std::fabs(double(x[0] - y[0])); };
    ValueTable v;
    v.value = {{3.0, 3.0}};
    EXPECT_EQ(verify_value_lipschitz(v, a), (std::vector<double>{0.0}));
    v.value = {{0.0, 1.0}};
    EXPECT_EQ(verify_value_lipschitz(v, a), (std::vector<double>{1.0}));
}

TEST(Lipschitz, MeasuredValueConstantWithinAnalyticBound) {
    for (const SystemModel& sys : make_corpus(40, 58, bounds_corpus())) {
        for (double gamma : {0.0, 1.0, 2.0}) {
            const InfoAbstraction a = build_quantized_abstraction(sys, uniform_grid(sys, gamma));
            const Solution s = solve_abstraction_dp(a, sys.criterion(), "approximate");
            const auto measured = verify_value_lipschitz(s.values, a);
            const auto lambda = measure_lambda(a);
            const auto analytic = analytic_value_lipschitz(measure_cost_lipschitz(a), lambda, sys.criterion());
            for (std::size_t t = 0; t < measured.size(); ++t) {
                EXPECT_TRUE(std::isfinite(measured[t]));
                EXPECT_TRUE(std::isfinite(lambda[t]));
                EXPECT_TRUE(approx_le(measured[t], analytic[t])) << "t=" << t;
            }
        }
    }
}

TEST(Lipschitz, AnalyticRecursion) {
    EXPECT_EQ(analytic_value_lipschitz({1, 2, 3}, {2, 0.5, 0}, Criterion::instantaneous),
              (std::vector<double>{4, 2, 3}));
    EXPECT_EQ(analytic_value_lipschitz({9, 9, 3}, {2, 0.5, 0}, Criterion::terminal),
              (std::vector<double>{3, 1.5, 3}));
    EXPECT_EQ(next_value_lipschitz({4, 5, 6}), (std::vector<double>{5, 6, 0}));
}

TEST(Report, SerializesInfinityAndCsv) {
    const SystemModel sys = line(1);
    BoundReport r = bound_report(sys, uniform_grid(sys, 1.0), false, true);
    r.formula.delta[0] = INFINITY;
    const auto j = bound_report_to_json(r);
    EXPECT_EQ(j.at("delta_formula").at(0), "inf");
    const std::string csv = bound_report_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,eps_formula,eps_measured,delta_formula,delta_measured,alpha");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
