#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsais/dp.hpp"
#include "nsais/envs.hpp"

namespace nsais {

// Quantized values of one coordinate block. gamma is the cover radius
// actually achieved over the block's domain.
struct GridBlock {
    std::size_t offset = 0;
    std::size_t length = 0;
    FinitePointSet points;
    Metric metric;
    double gamma = 0.0;
    bool exact = false;  // mu is the identity on this block
};

// Per-time product of blocks; mu quantizes every block independently.
// gamma[t] = max over x in X_t of eta(x, mu(x)) under the state metric.
struct QuantizationGrid {
    std::vector<std::vector<GridBlock>> blocks;  // [t]
    std::vector<double> gamma;                   // [t]

    int horizon() const { return static_cast<int>(blocks.size()) - 1; }
};

// Greedy cover: points are scanned in canonical order and kept when no kept
// point lies within gamma. gamma = 0 returns x.
GridBlock build_grid(const FinitePointSet& x, double gamma, const Metric& m);

// Nearest grid point; ties go to the canonically smallest point.
Point quantize_point(const GridBlock& grid, const Point& x);
Point quantize_point(const QuantizationGrid& grid, int t, const Point& x);
// { mu(x) : x in p }; EmptySet on an empty range.
FinitePointSet quantize_range(const GridBlock& grid, const FinitePointSet& p);
FinitePointSet quantize_range(const QuantizationGrid& grid, int t, const FinitePointSet& p);

// The same grid over every X_t under the state metric.
QuantizationGrid uniform_grid(const SystemModel& sys, double gamma);

// Blocks given per coordinate range; a block without points keeps every value
// that occurs in X_t (it is not quantized).
struct BlockSpec {
    std::size_t offset = 0;
    std::size_t length = 0;
    Metric metric;
    std::optional<FinitePointSet> points;
};
QuantizationGrid block_grid(const SystemModel& sys, const std::vector<BlockSpec>& specs);

// Agent and damage exact, attacker snapped to the configured quantized cells.
QuantizationGrid wall_defense_grid(const SystemModel& sys, const WallDefenseConfig& cfg);

// Agent exact, target snapped to a greedy gamma-cover of the free cells under
// the shortest-path metric.
QuantizationGrid pursuit_grid(const SystemModel& sys, const PursuitConfig& cfg, double gamma);

// Cover radius of the grid at t, computed exhaustively over X_t.
double cover_radius(const SystemModel& sys, const QuantizationGrid& grid, int t);

// mu as a map on state indices at t. OutOfDomain if mu leaves X_t.
std::vector<Index> mu_table(const SystemModel& sys, const QuantizationGrid& grid, int t);

// Realizations nu(range), optionally tagged with the initial observation.
InfoAbstraction build_quantized_abstraction(const SystemModel& sys, const QuantizationGrid& grid,
                                            bool include_y0 = false,
                                            std::size_t budget = kDefaultBudget);

struct LipschitzReport {
    std::vector<double> L_d;     // [t]
    std::vector<double> L_f;     // [t], 0 at T
    std::vector<double> L_h;     // [t], constant of h_{t+1}; 0 at T
    std::vector<double> L_fbar;  // [t], partially observed systems only
};

// Stage-wise Lipschitz constants of d_t, f_t and h_{t+1}.
LipschitzReport model_lipschitz(const SystemModel& sys);

struct EpsDelta {
    std::vector<double> eps;    // [t]
    std::vector<double> delta;  // [t], 0 at T
};

// eps_t = 2 L_d gamma_t, delta_t = 2 gamma_{t+1} + 2 L_f gamma_t.
EpsDelta perfect_obs_bounds(const SystemModel& sys, const QuantizationGrid& grid,
                            LipschitzReport* lips = nullptr);
// eps_t = 2 L_d gamma_t, delta_t = 2 gamma_{t+1} + 2 L_fbar L_h L_f gamma_t with L_fbar
// measured over reachable range pairs that share a quantized image.
EpsDelta partial_obs_bounds(const SystemModel& sys, const QuantizationGrid& grid,
                            LipschitzReport* lips = nullptr, std::size_t budget = kDefaultBudget);
// perfect_obs_bounds when every observation pins down the state, else partial_obs_bounds.
EpsDelta formula_bounds(const SystemModel& sys, const QuantizationGrid& grid,
                        LipschitzReport* lips = nullptr, std::size_t budget = kDefaultBudget);

// Exhaustive measurement over reachable memories of the cost and evolution
// errors of an abstraction against the exact conditional ranges.
EpsDelta empirical_eps_delta(const SystemModel& sys, const InfoAbstraction& a,
                             std::size_t budget = kDefaultBudget);

// Max over realization pairs of |V(p) - V(q)| / eta(p, q), per t.
std::vector<double> verify_value_lipschitz(const ValueTable& values, const InfoAbstraction& a);

// Max over realization pairs and shared available actions of
// H(next(p, u), next(q, u)) / eta(p, q), per t (0 at T).
std::vector<double> measure_lambda(const InfoAbstraction& a);
// Lipschitz constant of the worst-cost generator over realizations, per t.
std::vector<double> measure_cost_lipschitz(const InfoAbstraction& a);
// L_t = max(L_e_t, L_{t+1} lambda_t) with L_{T+1} = 0; terminal: L_T = L_e_T,
// L_t = L_{t+1} lambda_t.
std::vector<double> analytic_value_lipschitz(const std::vector<double>& cost_lips,
                                             const std::vector<double>& lambda,
                                             Criterion criterion);

// lips[t] = measured Lipschitz constant of V-hat at t + 1 (0 at T).
std::vector<double> next_value_lipschitz(const std::vector<double>& measured);

// Value and regret checks against the memory DP.
struct BoundCheck {
    std::vector<double> value_gap;  // [t]: max over reachable m of |V_t(m) - V-hat_t(sigma(m))|
    double regret = 0.0;            // max over initial memories of Lambda_0 - V_0
    double min_regret = 0.0;        // should be >= 0
    bool value_bound_holds = true;
    bool regret_bound_holds = true;
};
BoundCheck check_value_bounds(const SystemModel& sys, const InfoAbstraction& a,
                                const Solution& approx, const std::vector<double>& alpha,
                                std::size_t budget = kDefaultBudget);

struct BoundReport {
    std::string observation;  // "perfect" or "partial"
    std::vector<double> gamma;
    EpsDelta formula;
    EpsDelta measured;
    std::vector<double> alpha;  // from measured eps, delta and L_Vhat
    LipschitzReport lips;
    std::vector<double> L_Vhat;  // measured, per t
    std::optional<BoundCheck> value_checks;

    // Measured eps/delta never exceed the formulas (within tolerance).
    bool formulas_hold() const;
};

BoundReport bound_report(const SystemModel& sys, const QuantizationGrid& grid, bool include_y0,
                         bool check_values, std::size_t budget = kDefaultBudget);

nlohmann::json bound_report_to_json(const BoundReport& r);
// Header: t,eps_formula,eps_measured,delta_formula,delta_measured,alpha
std::string bound_report_csv(const BoundReport& r);

}  // namespace nsais
