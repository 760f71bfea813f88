#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <set>

#include "nsais/quantize.hpp"
#include "nsais/ranges.hpp"

namespace nsais {

namespace {

double block_radius(const GridBlock& b, const FinitePointSet& domain) {
    double r = 0.0;
    for (const auto& x : domain) r = std::max(r, b.metric(x, quantize_point(b, x)));
    return r;
}

FinitePointSet projection(const FinitePointSet& xs, std::size_t off, std::size_t len) {
    std::vector<Point> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(x.slice(off, len));
    return FinitePointSet(std::move(out));
}

}  // namespace

GridBlock build_grid(const FinitePointSet& x, double gamma, const Metric& m) {
    if (gamma < 0) throw NegativeInput("gamma must be nonnegative");
    GridBlock b;
    b.length = x.dim();
    b.metric = m;
    if (gamma == 0.0) {
        b.points = x;
        b.exact = true;
        return b;
    }
    std::vector<Point> kept;
    for (const auto& p : x) {
        bool covered = false;
        for (const auto& q : kept)
            if (approx_le(m(p, q), gamma)) {
                covered = true;
                break;
            }
        if (!covered) kept.push_back(p);
    }
    b.points = FinitePointSet(std::move(kept));
    b.gamma = block_radius(b, x);
    return b;
}

Point quantize_point(const GridBlock& grid, const Point& x) {
    if (grid.exact) return x;
    if (grid.points.empty()) throw EmptySet("quantization grid is empty");
    double best = std::numeric_limits<double>::infinity();
    const Point* arg = nullptr;
    for (const auto& q : grid.points) {
        const double d = grid.metric(x, q);
        if (d < best - kTolerance) {
            best = d;
            arg = &q;
        }
    }
    return *arg;
}

Point quantize_point(const QuantizationGrid& grid, int t, const Point& x) {
    const auto& blocks = grid.blocks.at(static_cast<std::size_t>(t));
    if (blocks.size() == 1 && blocks[0].offset == 0 && blocks[0].length == x.dim())
        return quantize_point(blocks[0], x);
    std::vector<double> c;
    c.reserve(x.dim());
    for (const auto& b : blocks) {
        if (b.offset + b.length > x.dim()) throw DimensionMismatch("grid block exceeds the point");
        Point q = quantize_point(b, x.slice(b.offset, b.length));
        c.insert(c.end(), q.coords().begin(), q.coords().end());
    }
    if (c.size() != x.dim()) throw DimensionMismatch("grid blocks do not cover the point");
    return Point(std::move(c));
}

FinitePointSet quantize_range(const GridBlock& grid, const FinitePointSet& p) {
    if (p.empty()) throw EmptySet("quantize_range of an empty range");
    std::vector<Point> out;
    for (const auto& x : p) out.push_back(quantize_point(grid, x));
    return FinitePointSet(std::move(out));
}

FinitePointSet quantize_range(const QuantizationGrid& grid, int t, const FinitePointSet& p) {
    if (p.empty()) throw EmptySet("quantize_range of an empty range");
    std::vector<Point> out;
    for (const auto& x : p) out.push_back(quantize_point(grid, t, x));
    return FinitePointSet(std::move(out));
}

double cover_radius(const SystemModel& sys, const QuantizationGrid& grid, int t) {
    const std::vector<Index> mu = mu_table(sys, grid, t);
    const FinitePointSet& xs = sys.states(t);
    double r = 0.0;
    for (Index i = 0; i < xs.size(); ++i) r = std::max(r, sys.state_metric()(xs[i], xs[mu[i]]));
    return r;
}

std::vector<Index> mu_table(const SystemModel& sys, const QuantizationGrid& grid, int t) {
    const FinitePointSet& xs = sys.states(t);
    const auto& blocks = grid.blocks.at(static_cast<std::size_t>(t));
    // Blocks repeat the same slices many times over a product space.
    std::vector<std::map<Point, Point>> memo(blocks.size());
    std::vector<Index> out(xs.size());
    for (Index i = 0; i < xs.size(); ++i) {
        const Point& x = xs[i];
        std::vector<double> c;
        c.reserve(x.dim());
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const GridBlock& b = blocks[k];
            Point s = x.slice(b.offset, b.length);
            if (!b.exact) {
                auto it = memo[k].find(s);
                if (it == memo[k].end()) it = memo[k].emplace(s, quantize_point(b, s)).first;
                s = it->second;
            }
            c.insert(c.end(), s.coords().begin(), s.coords().end());
        }
        auto j = xs.index_of(Point(std::move(c)));
        if (!j) throw OutOfDomain("quantized point of " + x.str() + " is not a state at t=" +
                                  std::to_string(t));
        out[i] = *j;
    }
    return out;
}

QuantizationGrid uniform_grid(const SystemModel& sys, double gamma) {
    QuantizationGrid g;
    for (int t = 0; t <= sys.horizon(); ++t) {
        g.blocks.push_back({build_grid(sys.states(t), gamma, sys.state_metric())});
        g.gamma.push_back(cover_radius(sys, g, t));
    }
    return g;
}

QuantizationGrid block_grid(const SystemModel& sys, const std::vector<BlockSpec>& specs) {
    QuantizationGrid g;
    for (int t = 0; t <= sys.horizon(); ++t) {
        const FinitePointSet& xs = sys.states(t);
        std::size_t covered = 0;
        std::vector<GridBlock> blocks;
        for (const auto& s : specs) {
            if (s.offset != covered) throw DimensionMismatch("grid blocks must tile the state");
            covered += s.length;
            const FinitePointSet domain = projection(xs, s.offset, s.length);
            GridBlock b;
            b.offset = s.offset;
            b.length = s.length;
            b.metric = s.metric;
            if (s.points) {
                if (!s.points->empty() && s.points->dim() != s.length)
                    throw DimensionMismatch("grid block points have the wrong dimension");
                b.points = *s.points;
                b.gamma = block_radius(b, domain);
            } else {
                b.points = domain;
                b.exact = true;
            }
            blocks.push_back(std::move(b));
        }
        if (covered != xs.dim()) throw DimensionMismatch("grid blocks must tile the state");
        g.blocks.push_back(std::move(blocks));
        g.gamma.push_back(cover_radius(sys, g, t));
    }
    return g;
}

QuantizationGrid wall_defense_grid(const SystemModel& sys, const WallDefenseConfig& cfg) {
    const std::size_t cols = static_cast<std::size_t>(cfg.max_col - cfg.min_col + 1);
    return block_grid(sys, {{0, 2, Metric::manhattan(), std::nullopt},
                            {2, 2, Metric::manhattan(), wall_quantized_cells(cfg)},
                            {4, cols, Metric::manhattan(), std::nullopt}});
}

QuantizationGrid pursuit_grid(const SystemModel& sys, const PursuitConfig& cfg, double gamma) {
    const FinitePointSet free_cells = pursuit_free_cells(cfg);
    const Metric path = Metric::shortest_path(free_cells);
    const GridBlock cover = build_grid(free_cells, gamma, path);
    return block_grid(sys, {{0, 2, path, std::nullopt}, {2, 2, path, cover.points}});
}

// ---- quantized abstraction ------------------------------------------------

InfoAbstraction build_quantized_abstraction(const SystemModel& sys, const QuantizationGrid& grid,
                                            bool include_y0, std::size_t budget) {
    const int T = sys.horizon();
    if (grid.horizon() != T) throw DimensionMismatch("grid horizon differs from the model's");
    auto mu = std::make_shared<std::vector<std::vector<Index>>>();
    for (int t = 0; t <= T; ++t) mu->push_back(mu_table(sys, grid, t));

    auto key_of = [mu, include_y0](int t, Index y0, const IndexSet& range) {
        Key k;
        if (include_y0) k.push_back(y0);
        IndexSet q;
        q.reserve(range.size());
        for (Index x : range) q.push_back((*mu)[static_cast<std::size_t>(t)][x]);
        canonicalize(q);
        k.insert(k.end(), q.begin(), q.end());
        return k;
    };

    AbstractionBuilder b(include_y0 ? "quantized-y0" : "quantized", sys);
    using Item = std::pair<Index, IndexSet>;  // (y0, range)
    std::set<Item> seen;
    std::vector<Item> frontier;
    std::size_t count = 0;
    for (const auto& root : initial_ranges(sys)) {
        Item it{root.y, root.support};
        if (seen.insert(it).second) {
            frontier.push_back(it);
            if (++count > budget) throw ModelTooLarge(count, budget);
        }
        b.add_initial(root.y, b.intern(0, key_of(0, root.y, root.support)).first);
    }
    for (int t = 0; t <= T; ++t) {
        std::set<Item> seen_next;
        std::vector<Item> upcoming;
        for (const auto& [y0, range] : frontier) {
            const Index r = b.intern(t, key_of(t, y0, range)).first;
            for (Index u = 0; u < sys.actions(t).size(); ++u) {
                IndexSet next;
                if (t < T) {
                    for (const auto& s : range_successors(sys, RangeState{t, range}, u)) {
                        next.push_back(b.intern(t + 1, key_of(t + 1, y0, s.support)).first);
                        Item child{y0, s.support};
                        if (seen_next.insert(child).second) {
                            upcoming.push_back(std::move(child));
                            if (++count > budget) throw ModelTooLarge(count, budget);
                        }
                    }
                }
                std::vector<double> costs;
                for (Index x : range) costs.push_back(sys.cost(t, x, u));
                b.merge_generator(t, r, u, next, costs);
            }
        }
        frontier = std::move(upcoming);
    }

    InfoAbstraction a = b.finish();
    a.range_determined = true;
    a.sigma = [key_of](const MemoryNode& n) { return key_of(n.t, n.memory.y.at(0), n.range); };
    std::vector<FinitePointSet> states;
    for (int t = 0; t <= T; ++t) states.push_back(sys.states(t));
    const Metric eta = sys.state_metric(), eta_obs = sys.observation_metric();
    const FinitePointSet obs0 = sys.observations(0);
    const std::size_t skip = include_y0 ? 1 : 0;
    a.key_distance = [states, eta, eta_obs, obs0, skip](int t, const Key& x, const Key& y) {
        const FinitePointSet& xs = states.at(static_cast<std::size_t>(t));
        double d = hausdorff_indexed(x.size() - skip, y.size() - skip, [&](std::size_t i, std::size_t j) {
            return eta(xs[static_cast<Index>(x[i + skip])], xs[static_cast<Index>(y[j + skip])]);
        });
        if (skip) d = std::max(d, eta_obs(obs0[static_cast<Index>(x[0])], obs0[static_cast<Index>(y[0])]));
        return d;
    };
    a.describe = [states, obs0, skip](int t, const Key& k) {
        nlohmann::json pts = nlohmann::json::array();
        for (std::size_t i = skip; i < k.size(); ++i)
            pts.push_back(states.at(static_cast<std::size_t>(t))[static_cast<Index>(k[i])].coords());
        if (!skip) return pts;
        return nlohmann::json{{"y0", obs0[static_cast<Index>(k[0])].coords()}, {"states", pts}};
    };
    return a;
}

}  // namespace nsais
