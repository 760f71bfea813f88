#include "corpus.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace nsais::testkit {

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

namespace {

FinitePointSet scalar_set(std::vector<int> values) {
    std::vector<Point> pts;
    for (int v : values) pts.push_back(Point{static_cast<double>(v)});
    return FinitePointSet(std::move(pts));
}

// n distinct integers drawn from 0..span-1.
std::vector<int> distinct_values(std::mt19937_64& rng, int n, int span) {
    std::vector<int> all(static_cast<std::size_t>(span));
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(static_cast<std::size_t>(n));
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace

SystemModel random_system(std::mt19937_64& rng, const CorpusOptions& o) {
    const int T = uniform_int(rng, o.min_horizon, o.max_horizon);
    const Criterion criterion =
        o.criterion ? *o.criterion
                    : (uniform_int(rng, 0, 1) ? Criterion::terminal : Criterion::instantaneous);
    const bool perfect = std::uniform_real_distribution<double>(0, 1)(rng) < o.perfect_share;
    const int nu = uniform_int(rng, 1, o.max_actions);
    const int nw = uniform_int(rng, 1, o.max_disturbances);
    const int nn = perfect ? 1 : uniform_int(rng, 1, o.max_noises);

    std::vector<Stage> stages(static_cast<std::size_t>(T) + 1);
    for (auto& s : stages) {
        const int nx = uniform_int(rng, 1, o.max_states);
        s.states = scalar_set(distinct_values(rng, nx, o.max_states + 3));
        s.actions = FinitePointSet::range(0, nu - 1);
        s.disturbances = FinitePointSet::range(0, nw - 1);
        s.noises = FinitePointSet::range(0, nn - 1);
    }
    for (int t = 0; t <= T; ++t) {
        Stage& s = stages[static_cast<std::size_t>(t)];
        const std::size_t nx = s.states.size();
        if (perfect) {
            s.observations = s.states;
            for (Index x = 0; x < nx; ++x) s.observe.push_back(x);
        } else {
            const int ny = uniform_int(rng, 1, o.max_observations);
            s.observations = FinitePointSet::range(0, ny - 1);
            for (std::size_t i = 0; i < nx * static_cast<std::size_t>(nn); ++i)
                s.observe.push_back(static_cast<Index>(uniform_int(rng, 0, ny - 1)));
        }
        for (std::size_t i = 0; i < nx * static_cast<std::size_t>(nu); ++i) {
            double c = uniform_int(rng, 0, o.max_cost);
            if (o.real_costs) c += std::uniform_real_distribution<double>(0, 1)(rng);
            s.cost.push_back(c);
        }
        if (t < T) {
            const int nx1 = static_cast<int>(stages[static_cast<std::size_t>(t) + 1].states.size());
            for (std::size_t i = 0; i < nx * static_cast<std::size_t>(nu * nw); ++i)
                s.next.push_back(static_cast<Index>(uniform_int(rng, 0, nx1 - 1)));
        }
    }
    IndexSet initial;
    const int nx0 = static_cast<int>(stages[0].states.size());
    for (Index x = 0; x < static_cast<Index>(nx0); ++x)
        if (uniform_int(rng, 0, 3) > 0) initial.push_back(x);
    if (initial.empty()) initial.push_back(static_cast<Index>(uniform_int(rng, 0, nx0 - 1)));

    return SystemModel("random", criterion, std::move(stages), std::move(initial),
                       Metric::euclidean(), Metric::euclidean());
}

std::vector<SystemModel> make_corpus(std::size_t n, std::uint64_t seed, const CorpusOptions& o) {
    std::mt19937_64 rng(seed);
    std::vector<SystemModel> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_system(rng, o));
    return out;
}

}  // namespace nsais::testkit
