#include "path_sets.hpp"

#include <algorithm>
#include <map>

namespace nsais::detail {

IndexSet PathNode::range() const {
    IndexSet r;
    r.reserve(paths.size());
    for (const auto& p : paths) r.push_back(p.back());
    canonicalize(r);
    return r;
}

void PathSetWalker::charge(std::size_t n) {
    count_ += n;
    if (count_ > budget_) throw ModelTooLarge(count_, budget_);
}

namespace {

std::vector<PathNode> collect(std::map<Index, std::vector<std::vector<Index>>>& buckets,
                              const Memory* parent, Index u) {
    std::vector<PathNode> out;
    out.reserve(buckets.size());
    for (auto& [y, paths] : buckets) {
        std::sort(paths.begin(), paths.end());
        paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
        PathNode n;
        if (parent) {
            n.memory = *parent;
            n.memory.u.push_back(u);
        }
        n.memory.y.push_back(y);
        n.paths = std::move(paths);
        out.push_back(std::move(n));
    }
    return out;
}

}  // namespace

std::vector<PathNode> PathSetWalker::roots() {
    std::map<Index, std::vector<std::vector<Index>>> buckets;
    for (Index x : sys_.initial_states())
        for (Index n = 0; n < sys_.noises(0).size(); ++n)
            buckets[sys_.observe(0, x, n)].push_back({x});
    auto out = collect(buckets, nullptr, 0);
    charge(out.size());
    return out;
}

std::vector<PathNode> PathSetWalker::children(const PathNode& node, Index u) {
    const int t = node.memory.t();
    std::map<Index, std::vector<std::vector<Index>>> buckets;
    const std::size_t nw = sys_.disturbances(t).size(), nn = sys_.noises(t + 1).size();
    for (const auto& path : node.paths) {
        for (Index w = 0; w < nw; ++w) {
            const Index x2 = sys_.next_state(t, path.back(), u, w);
            for (Index n = 0; n < nn; ++n) {
                auto& b = buckets[sys_.observe(t + 1, x2, n)];
                if (!b.empty() && b.back().size() == path.size() + 1 &&
                    std::equal(path.begin(), path.end(), b.back().begin()) && b.back().back() == x2)
                    continue;
                std::vector<Index> p = path;
                p.push_back(x2);
                b.push_back(std::move(p));
            }
        }
    }
    auto out = collect(buckets, &node.memory, u);
    charge(out.size());
    return out;
}

}  // namespace nsais::detail
