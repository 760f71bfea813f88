#include "nsais/point.hpp"

#include <algorithm>
#include <sstream>

#include "nsais/errors.hpp"

namespace nsais {

Point Point::slice(std::size_t offset, std::size_t len) const {
    if (offset + len > c_.size()) throw DimensionMismatch("slice past end of point " + str());
    return Point(std::vector<double>(c_.begin() + offset, c_.begin() + offset + len));
}

std::string Point::str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (i) os << ',';
        os << c_[i];
    }
    os << ')';
    return os.str();
}

Point concat(const Point& a, const Point& b) {
    std::vector<double> c = a.coords();
    c.insert(c.end(), b.coords().begin(), b.coords().end());
    return Point(std::move(c));
}

FinitePointSet::FinitePointSet(std::initializer_list<Point> pts)
    : FinitePointSet(std::vector<Point>(pts)) {}

FinitePointSet::FinitePointSet(std::vector<Point> pts) : pts_(std::move(pts)) {
    for (const auto& p : pts_) {
        if (p.dim() != pts_.front().dim())
            throw DimensionMismatch("mixed dimensions in point set");
    }
    std::sort(pts_.begin(), pts_.end());
    pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

FinitePointSet FinitePointSet::scalars(std::initializer_list<double> values) {
    std::vector<Point> pts;
    for (double v : values) pts.push_back(Point{v});
    return FinitePointSet(std::move(pts));
}

FinitePointSet FinitePointSet::range(int lo, int hi) {
    std::vector<Point> pts;
    for (int v = lo; v <= hi; ++v) pts.push_back(Point{static_cast<double>(v)});
    return FinitePointSet(std::move(pts));
}

bool FinitePointSet::contains(const Point& p) const {
    return std::binary_search(pts_.begin(), pts_.end(), p);
}

std::optional<Index> FinitePointSet::index_of(const Point& p) const {
    auto it = std::lower_bound(pts_.begin(), pts_.end(), p);
    if (it == pts_.end() || *it != p) return std::nullopt;
    return static_cast<Index>(it - pts_.begin());
}

Index FinitePointSet::require_index(const Point& p) const {
    auto i = index_of(p);
    if (!i) throw OutOfDomain("point " + p.str() + " is not in the set");
    return *i;
}

FinitePointSet FinitePointSet::select(const IndexSet& idx) const {
    std::vector<Point> pts;
    pts.reserve(idx.size());
    for (Index i : idx) pts.push_back(pts_.at(i));
    return FinitePointSet(std::move(pts));
}

std::string FinitePointSet::str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        if (i) s += ',';
        s += pts_[i].str();
    }
    return s + "}";
}

void canonicalize(IndexSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

}  // namespace nsais
