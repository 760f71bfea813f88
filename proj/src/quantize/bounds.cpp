#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "nsais/parallel.hpp"
#include "nsais/quantize.hpp"
#include "nsais/ranges.hpp"

namespace nsais {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio(double num, double den) {
    if (num == 0.0) return 0.0;
    if (den == 0.0) return kInf;
    return num / den;
}

// Max over pairs i < j of f(i, j), evaluated in parallel over i.
template <class F>
double pair_max(std::size_t n, F&& f) {
    std::vector<double> best(n, 0.0);
    parallel_for(n, default_jobs(), [&](std::size_t i) {
        double b = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) b = std::max(b, f(i, j));
        best[i] = b;
    });
    double out = 0.0;
    for (double b : best) out = std::max(out, b);
    return out;
}

double set_distance(const SystemModel& sys, int t, const IndexSet& a, const IndexSet& b) {
    const FinitePointSet& xs = sys.states(t);
    const Metric& eta = sys.state_metric();
    return hausdorff_indexed(a.size(), b.size(),
                             [&](std::size_t i, std::size_t j) { return eta(xs[a[i]], xs[b[j]]); });
}

double family_distance(const SystemModel& sys, int t, const std::vector<RangeSuccessor>& a,
                       const std::vector<RangeSuccessor>& b) {
    return hausdorff_indexed(a.size(), b.size(), [&](std::size_t i, std::size_t j) {
        return set_distance(sys, t, a[i].support, b[j].support);
    });
}

// Reachable conditional ranges per t, from the filter.
std::vector<std::vector<IndexSet>> reachable_ranges(const SystemModel& sys, std::size_t budget) {
    const int T = sys.horizon();
    std::vector<std::vector<IndexSet>> out(static_cast<std::size_t>(T) + 1);
    std::set<IndexSet> seen;
    std::size_t count = 0;
    for (const auto& r : initial_ranges(sys))
        if (seen.insert(r.support).second) out[0].push_back(r.support);
    count += out[0].size();
    for (int t = 0; t < T; ++t) {
        std::set<IndexSet> next;
        for (const auto& p : out[static_cast<std::size_t>(t)])
            for (Index u = 0; u < sys.actions(t).size(); ++u)
                for (auto& s : range_successors(sys, RangeState{t, p}, u))
                    if (next.insert(s.support).second && ++count > budget)
                        throw ModelTooLarge(count, budget);
        out[static_cast<std::size_t>(t) + 1].assign(next.begin(), next.end());
    }
    return out;
}

}  // namespace

LipschitzReport model_lipschitz(const SystemModel& sys) {
    const int T = sys.horizon();
    LipschitzReport r;
    const Metric& eta = sys.state_metric();
    const Metric& eta_obs = sys.observation_metric();
    for (int t = 0; t <= T; ++t) {
        const FinitePointSet& xs = sys.states(t);
        const std::size_t nu = sys.actions(t).size(), nw = sys.disturbances(t).size();
        r.L_d.push_back(pair_max(xs.size(), [&](std::size_t i, std::size_t j) {
            const double dx = eta(xs[static_cast<Index>(i)], xs[static_cast<Index>(j)]);
            double b = 0.0;
            for (Index u = 0; u < nu; ++u)
                b = std::max(b, ratio(std::fabs(sys.cost(t, static_cast<Index>(i), u) -
                                                sys.cost(t, static_cast<Index>(j), u)),
                                      dx));
            return b;
        }));
        if (t == T) {
            r.L_f.push_back(0.0);
            r.L_h.push_back(0.0);
            continue;
        }
        const FinitePointSet& xn = sys.states(t + 1);
        r.L_f.push_back(pair_max(xs.size(), [&](std::size_t i, std::size_t j) {
            const double dx = eta(xs[static_cast<Index>(i)], xs[static_cast<Index>(j)]);
            double b = 0.0;
            for (Index u = 0; u < nu; ++u)
                for (Index w = 0; w < nw; ++w) {
                    const Index a = sys.next_state(t, static_cast<Index>(i), u, w);
                    const Index c = sys.next_state(t, static_cast<Index>(j), u, w);
                    if (a != c) b = std::max(b, ratio(eta(xn[a], xn[c]), dx));
                }
            return b;
        }));
        const FinitePointSet& ys = sys.observations(t + 1);
        const std::size_t nn = sys.noises(t + 1).size();
        r.L_h.push_back(pair_max(xn.size(), [&](std::size_t i, std::size_t j) {
            const double dx = eta(xn[static_cast<Index>(i)], xn[static_cast<Index>(j)]);
            double b = 0.0;
            for (Index n = 0; n < nn; ++n) {
                const Index a = sys.observe(t + 1, static_cast<Index>(i), n);
                const Index c = sys.observe(t + 1, static_cast<Index>(j), n);
                if (a != c) b = std::max(b, ratio(eta_obs(ys[a], ys[c]), dx));
            }
            return b;
        }));
    }
    return r;
}

namespace {

double gamma_at(const QuantizationGrid& grid, int t) {
    if (t > grid.horizon()) return 0.0;
    return grid.gamma.at(static_cast<std::size_t>(t));
}

std::vector<double> eps_formula(const LipschitzReport& l, const QuantizationGrid& grid) {
    std::vector<double> eps;
    for (std::size_t t = 0; t < l.L_d.size(); ++t) {
        const double g = gamma_at(grid, static_cast<int>(t));
        eps.push_back(g == 0.0 ? 0.0 : 2.0 * l.L_d[t] * g);
    }
    return eps;
}

}  // namespace

EpsDelta perfect_obs_bounds(const SystemModel& sys, const QuantizationGrid& grid,
                            LipschitzReport* lips) {
    LipschitzReport l = model_lipschitz(sys);
    EpsDelta out;
    out.eps = eps_formula(l, grid);
    const int T = sys.horizon();
    for (int t = 0; t <= T; ++t) {
        const double g = gamma_at(grid, t), g1 = gamma_at(grid, t + 1);
        const double lf = l.L_f[static_cast<std::size_t>(t)];
        out.delta.push_back(2.0 * g1 + (g == 0.0 ? 0.0 : 2.0 * lf * g));
    }
    if (lips) *lips = std::move(l);
    return out;
}

EpsDelta partial_obs_bounds(const SystemModel& sys, const QuantizationGrid& grid,
                            LipschitzReport* lips, std::size_t budget) {
    LipschitzReport l = model_lipschitz(sys);
    EpsDelta out;
    out.eps = eps_formula(l, grid);
    const int T = sys.horizon();
    const auto ranges = reachable_ranges(sys, budget);
    for (int t = 0; t <= T; ++t) {
        const auto ti = static_cast<std::size_t>(t);
        const double g = gamma_at(grid, t), g1 = gamma_at(grid, t + 1);
        if (t == T) {
            l.L_fbar.push_back(0.0);
            out.delta.push_back(2.0 * g1);
            continue;
        }
        // Pairs of reachable ranges with the same quantized image.
        const std::vector<Index> mu = mu_table(sys, grid, t);
        std::map<IndexSet, std::vector<std::size_t>> classes;
        for (std::size_t i = 0; i < ranges[ti].size(); ++i) {
            IndexSet q;
            for (Index x : ranges[ti][i]) q.push_back(mu[x]);
            canonicalize(q);
            classes[q].push_back(i);
        }
        std::vector<std::vector<std::size_t>> groups;
        for (auto& [q, members] : classes)
            if (members.size() > 1) groups.push_back(std::move(members));
        double m = 0.0;
        for (const auto& members : groups) {
            // Successor families per member and action.
            std::vector<std::vector<std::vector<RangeSuccessor>>> succ(members.size());
            for (std::size_t k = 0; k < members.size(); ++k)
                for (Index u = 0; u < sys.actions(t).size(); ++u)
                    succ[k].push_back(range_successors(sys, RangeState{t, ranges[ti][members[k]]}, u));
            m = std::max(m, pair_max(members.size(), [&](std::size_t i, std::size_t j) {
                const double dx = set_distance(sys, t, ranges[ti][members[i]], ranges[ti][members[j]]);
                double b = 0.0;
                for (std::size_t u = 0; u < succ[i].size(); ++u)
                    b = std::max(b, ratio(family_distance(sys, t + 1, succ[i][u], succ[j][u]), dx));
                return b;
            }));
        }
        const double lh = l.L_h[ti], lf = l.L_f[ti];
        double fbar;
        if (m == 0.0)
            fbar = 0.0;
        else if (lh * lf == 0.0)
            fbar = kInf;
        else
            fbar = m / (lh * lf);
        l.L_fbar.push_back(fbar);
        double term;
        if (g == 0.0 || fbar == 0.0)
            term = 0.0;
        else if (std::isinf(fbar))
            term = kInf;
        else
            term = 2.0 * fbar * lh * lf * g;
        out.delta.push_back(2.0 * g1 + term);
    }
    if (lips) *lips = std::move(l);
    return out;
}

EpsDelta formula_bounds(const SystemModel& sys, const QuantizationGrid& grid,
                        LipschitzReport* lips, std::size_t budget) {
    if (sys.perfectly_observed()) return perfect_obs_bounds(sys, grid, lips);
    return partial_obs_bounds(sys, grid, lips, budget);
}

EpsDelta empirical_eps_delta(const SystemModel& sys, const InfoAbstraction& a,
                             std::size_t budget) {
    const int T = sys.horizon();
    if (a.horizon() != T) throw DimensionMismatch("abstraction horizon differs from the model's");
    EpsDelta out;
    out.eps.assign(static_cast<std::size_t>(T) + 1, 0.0);
    out.delta.assign(out.eps.size(), 0.0);
    std::vector<std::set<std::pair<Index, IndexSet>>> seen(out.eps.size());
    walk_memories(
        sys,
        [&](const MemoryNode& node) {
            const int t = node.t;
            const auto ti = static_cast<std::size_t>(t);
            if (a.range_determined && !seen[ti].insert({node.memory.y[0], node.range}).second)
                return false;
            const Index r = a.locate(node);
            for (Index u = 0; u < sys.actions(t).size(); ++u) {
                if (!a.available(t, r, u)) {
                    out.eps[ti] = out.delta[ti] = kInf;
                    continue;
                }
                double e = 0.0;
                for (Index x : node.range) e = std::max(e, sys.cost(t, x, u));
                out.eps[ti] = std::max(out.eps[ti], std::fabs(e - a.worst_cost(t, r, u)));
                if (t == T) continue;
                IndexSet k;
                for (const auto& s : range_successors(sys, RangeState{t, node.range}, u)) {
                    Memory child = node.memory;
                    child.u.push_back(u);
                    child.y.push_back(s.y);
                    k.push_back(a.locate(MemoryNode{t + 1, child, s.support}));
                }
                canonicalize(k);
                const IndexSet& kh = a.next(t, r, u);
                const double d = hausdorff_indexed(k.size(), kh.size(), [&](std::size_t i, std::size_t j) {
                    return a.distance(t + 1, k[i], kh[j]);
                });
                out.delta[ti] = std::max(out.delta[ti], d);
            }
            return true;
        },
        budget);
    return out;
}

std::vector<double> verify_value_lipschitz(const ValueTable& values, const InfoAbstraction& a) {
    std::vector<double> out;
    for (int t = 0; t <= a.horizon(); ++t) {
        const auto& v = values.value.at(static_cast<std::size_t>(t));
        out.push_back(pair_max(v.size(), [&](std::size_t i, std::size_t j) {
            const double dv = std::fabs(v[i] - v[j]);
            if (dv == 0.0) return 0.0;
            return ratio(dv, a.distance(t, static_cast<Index>(i), static_cast<Index>(j)));
        }));
    }
    return out;
}

std::vector<double> measure_lambda(const InfoAbstraction& a) {
    std::vector<double> out;
    const int T = a.horizon();
    for (int t = 0; t <= T; ++t) {
        if (t == T) {
            out.push_back(0.0);
            break;
        }
        const std::size_t na = a.stages[static_cast<std::size_t>(t)].actions;
        out.push_back(pair_max(a.size(t), [&](std::size_t i, std::size_t j) {
            const Index p = static_cast<Index>(i), q = static_cast<Index>(j);
            const double dx = a.distance(t, p, q);
            double b = 0.0;
            for (Index u = 0; u < na; ++u) {
                if (!a.available(t, p, u) || !a.available(t, q, u)) continue;
                const IndexSet& n1 = a.next(t, p, u);
                const IndexSet& n2 = a.next(t, q, u);
                if (n1 == n2) continue;
                const double h = hausdorff_indexed(n1.size(), n2.size(), [&](std::size_t x, std::size_t y) {
                    return a.distance(t + 1, n1[x], n2[y]);
                });
                b = std::max(b, ratio(h, dx));
            }
            return b;
        }));
    }
    return out;
}

std::vector<double> measure_cost_lipschitz(const InfoAbstraction& a) {
    std::vector<double> out;
    for (int t = 0; t <= a.horizon(); ++t) {
        const std::size_t na = a.stages[static_cast<std::size_t>(t)].actions;
        out.push_back(pair_max(a.size(t), [&](std::size_t i, std::size_t j) {
            const Index p = static_cast<Index>(i), q = static_cast<Index>(j);
            double b = 0.0;
            for (Index u = 0; u < na; ++u) {
                if (!a.available(t, p, u) || !a.available(t, q, u)) continue;
                const double dc = std::fabs(a.worst_cost(t, p, u) - a.worst_cost(t, q, u));
                if (dc > 0.0) b = std::max(b, ratio(dc, a.distance(t, p, q)));
            }
            return b;
        }));
    }
    return out;
}

std::vector<double> analytic_value_lipschitz(const std::vector<double>& cost_lips,
                                             const std::vector<double>& lambda,
                                             Criterion criterion) {
    const std::size_t n = cost_lips.size();
    if (lambda.size() < n) throw DimensionMismatch("lambda must cover every time step");
    std::vector<double> out(n, 0.0);
    double next = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        const double carry = (next == 0.0 || lambda[k] == 0.0) ? 0.0 : next * lambda[k];
        if (k + 1 == n)
            out[k] = cost_lips[k];
        else
            out[k] = criterion == Criterion::instantaneous ? std::max(cost_lips[k], carry) : carry;
        next = out[k];
    }
    return out;
}

std::vector<double> next_value_lipschitz(const std::vector<double>& measured) {
    std::vector<double> out(measured.size(), 0.0);
    for (std::size_t t = 0; t + 1 < measured.size(); ++t) out[t] = measured[t + 1];
    return out;
}

BoundCheck check_value_bounds(const SystemModel& sys, const InfoAbstraction& a,
                                const Solution& approx, const std::vector<double>& alpha,
                                std::size_t budget) {
    const int T = sys.horizon();
    const MemorySolution exact = solve_memory_dp(sys, budget);
    BoundCheck c;
    c.value_gap.assign(static_cast<std::size_t>(T) + 1, 0.0);
    for (int t = 0; t <= T; ++t) {
        const auto ti = static_cast<std::size_t>(t);
        for (std::size_t i = 0; i < exact.memories[ti].size(); ++i) {
            const Memory& m = exact.memories[ti][i];
            const RangeState p = range_of_memory(sys, m);
            const Index r = a.locate(MemoryNode{t, m, p.support});
            const double gap = std::fabs(exact.values.value[ti][i] - approx.values.value[ti][r]);
            c.value_gap[ti] = std::max(c.value_gap[ti], gap);
        }
        if (!approx_le(c.value_gap[ti], alpha.at(ti))) c.value_bound_holds = false;
    }
    const WorstCase wc = evaluate_strategy_worst_case(sys, policy_from(a, approx.strategy), budget);
    c.regret = -kInf;
    c.min_regret = kInf;
    for (std::size_t i = 0; i < exact.initial_memories.size(); ++i) {
        const Index y0 = exact.initial_memories[i].y[0];
        for (auto [y, lam] : wc.per_initial) {
            if (y != y0) continue;
            const double reg = lam - exact.initial_values[i];
            c.regret = std::max(c.regret, reg);
            c.min_regret = std::min(c.min_regret, reg);
        }
    }
    c.regret_bound_holds = approx_le(0.0, c.min_regret) && approx_le(c.regret, 2.0 * alpha.at(0));
    return c;
}

bool BoundReport::formulas_hold() const {
    for (std::size_t t = 0; t < measured.eps.size(); ++t) {
        if (!approx_le(measured.eps[t], formula.eps.at(t))) return false;
        if (!approx_le(measured.delta[t], formula.delta.at(t))) return false;
    }
    return true;
}

BoundReport bound_report(const SystemModel& sys, const QuantizationGrid& grid, bool include_y0,
                         bool check_values, std::size_t budget) {
    BoundReport r;
    r.observation = sys.perfectly_observed() ? "perfect" : "partial";
    r.gamma = grid.gamma;
    r.formula = formula_bounds(sys, grid, &r.lips, budget);
    const InfoAbstraction a = build_quantized_abstraction(sys, grid, include_y0, budget);
    const Solution sol = solve_abstraction_dp(a, sys.criterion(), "approximate");
    r.measured = empirical_eps_delta(sys, a, budget);
    r.L_Vhat = verify_value_lipschitz(sol.values, a);
    r.alpha = alpha_bound(r.measured.eps, r.measured.delta, next_value_lipschitz(r.L_Vhat),
                          sys.criterion());
    if (check_values) r.value_checks = check_value_bounds(sys, a, sol, r.alpha, budget);
    return r;
}

namespace {
nlohmann::json reals(const std::vector<double>& v) {
    nlohmann::json j = nlohmann::json::array();
    for (double x : v) j.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json("inf"));
    return j;
}
std::string real_str(double x) {
    if (std::isinf(x)) return "inf";
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}
}  // namespace

nlohmann::json bound_report_to_json(const BoundReport& r) {
    nlohmann::json j{{"observation", r.observation},
                     {"gamma", reals(r.gamma)},
                     {"eps_formula", reals(r.formula.eps)},
                     {"delta_formula", reals(r.formula.delta)},
                     {"eps_measured", reals(r.measured.eps)},
                     {"delta_measured", reals(r.measured.delta)},
                     {"alpha", reals(r.alpha)},
                     {"lipschitz",
                      {{"L_d", reals(r.lips.L_d)},
                       {"L_f", reals(r.lips.L_f)},
                       {"L_h", reals(r.lips.L_h)},
                       {"L_fbar", reals(r.lips.L_fbar)},
                       {"L_Vhat", reals(r.L_Vhat)}}},
                     {"formulas_hold", r.formulas_hold()}};
    if (r.value_checks) {
        const BoundCheck& c = *r.value_checks;
        j["value_checks"] = {{"value_gap", reals(c.value_gap)},
                         {"regret", c.regret},
                         {"min_regret", c.min_regret},
                         {"value_bound_holds", c.value_bound_holds},
                         {"regret_bound_holds", c.regret_bound_holds}};
    }
    return j;
}

std::string bound_report_csv(const BoundReport& r) {
    std::ostringstream os;
    os << "t,eps_formula,eps_measured,delta_formula,delta_measured,alpha\n";
    for (std::size_t t = 0; t < r.measured.eps.size(); ++t)
        os << t << ',' << real_str(r.formula.eps[t]) << ',' << real_str(r.measured.eps[t]) << ','
           << real_str(r.formula.delta[t]) << ',' << real_str(r.measured.delta[t]) << ','
           << real_str(r.alpha.at(t)) << '\n';
    return os.str();
}

}  // namespace nsais
