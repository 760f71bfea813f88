#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "nsais/errors.hpp"
#include "nsais/metric.hpp"
#include "nsais/point.hpp"

namespace nsais {

// Absolute tolerance for comparisons of real-valued quantities.
inline constexpr double kTolerance = 1e-9;

inline bool approx_equal(double a, double b, double tol = kTolerance) {
    return std::fabs(a - b) <= tol;
}
inline bool approx_le(double a, double b, double tol = kTolerance) { return a <= b + tol; }

// Hausdorff distance between two finite families, given sizes and a distance
// callback dist(i, j) between the i-th element of a and the j-th of b.
template <class Dist>
double hausdorff_indexed(std::size_t na, std::size_t nb, Dist&& dist) {
    if (na == 0 || nb == 0) throw EmptySet("hausdorff of an empty set");
    std::vector<double> col_min(nb, std::numeric_limits<double>::infinity());
    double ab = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        double row_min = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nb; ++j) {
            double d = dist(i, j);
            row_min = std::min(row_min, d);
            col_min[j] = std::min(col_min[j], d);
        }
        ab = std::max(ab, row_min);
    }
    double ba = *std::max_element(col_min.begin(), col_min.end());
    return std::max(ab, ba);
}

template <class Dist>
double average_hausdorff_indexed(std::size_t na, std::size_t nb, Dist&& dist) {
    if (na == 0 || nb == 0) throw EmptySet("average hausdorff of an empty set");
    std::vector<double> col_min(nb, std::numeric_limits<double>::infinity());
    double row_sum = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        double row_min = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nb; ++j) {
            double d = dist(i, j);
            row_min = std::min(row_min, d);
            col_min[j] = std::min(col_min[j], d);
        }
        row_sum += row_min;
    }
    double col_sum = 0.0;
    for (double v : col_min) col_sum += v;
    return row_sum / static_cast<double>(na) + col_sum / static_cast<double>(nb);
}

// Max over ordered pairs i != j of dy(i, j) / dx(i, j); 0 with fewer than two
// elements. A zero dx with positive dy yields infinity.
template <class Dx, class Dy>
double lipschitz_indexed(std::size_t n, Dx&& dx, Dy&& dy) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double num = dy(i, j);
            if (num == 0.0) continue;
            double den = dx(i, j);
            if (den == 0.0) return std::numeric_limits<double>::infinity();
            best = std::max(best, num / den);
        }
    }
    return best;
}

double hausdorff(const FinitePointSet& a, const FinitePointSet& b, const Metric& m);
double average_hausdorff(const FinitePointSet& a, const FinitePointSet& b, const Metric& m);

// Set of (x, y) pairs realizing a joint range.
class FiniteRelation {
public:
    FiniteRelation() = default;
    explicit FiniteRelation(std::vector<std::pair<Point, Point>> pairs);

    const std::vector<std::pair<Point, Point>>& pairs() const { return pairs_; }
    FinitePointSet x_projection() const;
    FinitePointSet y_projection() const;

private:
    std::vector<std::pair<Point, Point>> pairs_;
};

FinitePointSet conditional_range(const FiniteRelation& r, const Point& y);

// A total map on a finite domain (the key set).
using FiniteMap = std::map<Point, Point>;

double l_inverse_constant(const FiniteMap& f, const Metric& mx, const Metric& my);
double lipschitz_constant(const FiniteMap& f, const Metric& mx, const Metric& my);

// Greatest distance between two points of a set; 0 for singletons.
double diameter(const FinitePointSet& s, const Metric& m);

}  // namespace nsais
