#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace nsais {

using Index = std::uint32_t;
using IndexSet = std::vector<Index>;  // sorted, no duplicates

// A tuple of scalars. Integer grids are stored exactly in the doubles.
class Point {
public:
    Point() = default;
    Point(std::initializer_list<double> coords) : c_(coords) {}
    explicit Point(std::vector<double> coords) : c_(std::move(coords)) {}

    std::size_t dim() const { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    const std::vector<double>& coords() const { return c_; }

    Point slice(std::size_t offset, std::size_t len) const;

    friend bool operator==(const Point& a, const Point& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
    friend bool operator<(const Point& a, const Point& b) { return a.c_ < b.c_; }

    std::string str() const;

private:
    std::vector<double> c_;
};

Point concat(const Point& a, const Point& b);

// Deduplicated, lexicographically ordered set of points of one dimension.
class FinitePointSet {
public:
    FinitePointSet() = default;
    FinitePointSet(std::initializer_list<Point> pts);
    explicit FinitePointSet(std::vector<Point> pts);

    // Points of the form (v) for each scalar v.
    static FinitePointSet scalars(std::initializer_list<double> values);
    static FinitePointSet range(int lo, int hi);  // 1-d integers lo..hi inclusive

    std::size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }
    std::size_t dim() const { return pts_.empty() ? 0 : pts_.front().dim(); }

    const Point& operator[](std::size_t i) const { return pts_[i]; }
    auto begin() const { return pts_.begin(); }
    auto end() const { return pts_.end(); }
    const std::vector<Point>& points() const { return pts_; }

    bool contains(const Point& p) const;
    std::optional<Index> index_of(const Point& p) const;
    Index require_index(const Point& p) const;  // throws OutOfDomain

    // Subset selected by sorted indices.
    FinitePointSet select(const IndexSet& idx) const;

    friend bool operator==(const FinitePointSet& a, const FinitePointSet& b) {
        return a.pts_ == b.pts_;
    }

    std::string str() const;

private:
    std::vector<Point> pts_;
};

// Sort and deduplicate in place.
void canonicalize(IndexSet& s);

}  // namespace nsais
