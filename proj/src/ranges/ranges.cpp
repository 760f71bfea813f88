#include "nsais/ranges.hpp"

#include <algorithm>

namespace nsais {

namespace {

void check_same_dim(const FinitePointSet& a, const FinitePointSet& b) {
    if (a.empty() || b.empty()) throw EmptySet("distance between sets needs non-empty sets");
    if (a.dim() != b.dim()) throw DimensionMismatch("sets live in different dimensions");
}

}  // namespace

double hausdorff(const FinitePointSet& a, const FinitePointSet& b, const Metric& m) {
    check_same_dim(a, b);
    return hausdorff_indexed(a.size(), b.size(),
                             [&](std::size_t i, std::size_t j) { return m(a[i], b[j]); });
}

double average_hausdorff(const FinitePointSet& a, const FinitePointSet& b, const Metric& m) {
    check_same_dim(a, b);
    return average_hausdorff_indexed(a.size(), b.size(),
                                     [&](std::size_t i, std::size_t j) { return m(a[i], b[j]); });
}

FiniteRelation::FiniteRelation(std::vector<std::pair<Point, Point>> pairs)
    : pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

FinitePointSet FiniteRelation::x_projection() const {
    std::vector<Point> xs;
    for (const auto& [x, y] : pairs_) xs.push_back(x);
    return FinitePointSet(std::move(xs));
}

FinitePointSet FiniteRelation::y_projection() const {
    std::vector<Point> ys;
    for (const auto& [x, y] : pairs_) ys.push_back(y);
    return FinitePointSet(std::move(ys));
}

FinitePointSet conditional_range(const FiniteRelation& r, const Point& y) {
    std::vector<Point> xs;
    for (const auto& [x, yy] : r.pairs())
        if (yy == y) xs.push_back(x);
    if (xs.empty()) throw UnknownConditioningValue("no pair conditions on " + y.str());
    return FinitePointSet(std::move(xs));
}

double l_inverse_constant(const FiniteMap& f, const Metric& mx, const Metric& my) {
    std::map<Point, std::vector<Point>> preimage;
    for (const auto& [x, y] : f) preimage[y].push_back(x);
    std::vector<Point> image;
    std::vector<FinitePointSet> sets;
    for (auto& [y, xs] : preimage) {
        image.push_back(y);
        sets.emplace_back(std::move(xs));
    }
    return lipschitz_indexed(
        image.size(), [&](std::size_t i, std::size_t j) { return my(image[i], image[j]); },
        [&](std::size_t i, std::size_t j) { return hausdorff(sets[i], sets[j], mx); });
}

double lipschitz_constant(const FiniteMap& f, const Metric& mx, const Metric& my) {
    std::vector<const Point*> xs, ys;
    for (const auto& [x, y] : f) {
        xs.push_back(&x);
        ys.push_back(&y);
    }
    return lipschitz_indexed(
        xs.size(), [&](std::size_t i, std::size_t j) { return mx(*xs[i], *xs[j]); },
        [&](std::size_t i, std::size_t j) { return my(*ys[i], *ys[j]); });
}

double diameter(const FinitePointSet& s, const Metric& m) {
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) d = std::max(d, m(s[i], s[j]));
    return d;
}

}  // namespace nsais
