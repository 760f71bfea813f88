#include "nsais/metric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "nsais/errors.hpp"

namespace nsais {

struct Metric::Impl {
    MetricKind kind = MetricKind::euclidean;
    FinitePointSet carrier;
    std::vector<double> table;  // row-major |carrier|^2; negative marks no path
    std::vector<MetricBlock> blocks;
};

namespace {

void check_dims(const Point& a, const Point& b) {
    if (a.dim() != b.dim())
        throw DimensionMismatch("cannot measure " + a.str() + " against " + b.str());
}

}  // namespace

std::string to_string(MetricKind k) {
    switch (k) {
        case MetricKind::euclidean: return "euclidean";
        case MetricKind::manhattan: return "manhattan";
        case MetricKind::chebyshev: return "chebyshev";
        case MetricKind::shortest_path: return "shortest_path";
        case MetricKind::discrete: return "discrete";
        case MetricKind::table: return "table";
        case MetricKind::product: return "product";
    }
    return "unknown";
}

Metric::Metric() : Metric(euclidean()) {}

Metric Metric::euclidean() {
    auto impl = std::make_shared<Impl>();
    impl->kind = MetricKind::euclidean;
    return Metric(impl);
}

Metric Metric::manhattan() {
    auto impl = std::make_shared<Impl>();
    impl->kind = MetricKind::manhattan;
    return Metric(impl);
}

Metric Metric::chebyshev() {
    auto impl = std::make_shared<Impl>();
    impl->kind = MetricKind::chebyshev;
    return Metric(impl);
}

Metric Metric::discrete() {
    auto impl = std::make_shared<Impl>();
    impl->kind = MetricKind::discrete;
    return Metric(impl);
}

Metric Metric::shortest_path(const FinitePointSet& free_cells) {
    if (!free_cells.empty() && free_cells.dim() != 2)
        throw DimensionMismatch("shortest_path metric needs 2-d cells");
    auto impl = std::make_shared<Impl>();
    impl->kind = MetricKind::shortest_path;
    impl->carrier = free_cells;
    const std::size_t n = free_cells.size();
    impl->table.assign(n * n, -1.0);
    static const int moves[4][2] = {{-1, 0}, {1, 0}, {0, 1}, {0, -1}};
    for (std::size_t s = 0; s < n; ++s) {
        double* row = &impl->table[s * n];
        std::deque<Index> queue{static_cast<Index>(s)};
        row[s] = 0.0;
        while (!queue.empty()) {
            Index c = queue.front();
            queue.pop_front();
            const Point& p = free_cells[c];
            for (const auto& mv : moves) {
                auto nb = free_cells.index_of(Point{p[0] + mv[0], p[1] + mv[1]});
                if (nb && row[*nb] < 0) {
                    row[*nb] = row[c] + 1.0;
                    queue.push_back(*nb);
                }
            }
        }
    }
    return Metric(impl);
}

Metric Metric::table(FinitePointSet carrier, std::vector<std::vector<double>> distances) {
    const std::size_t n = carrier.size();
    if (distances.size() != n) throw DimensionMismatch("distance table rows != carrier size");
    auto impl = std::make_shared<Impl>();
    impl->kind = MetricKind::table;
    impl->table.reserve(n * n);
    for (const auto& row : distances) {
        if (row.size() != n) throw DimensionMismatch("distance table is not square");
        for (double d : row) {
            if (d < 0) throw NegativeInput("negative distance in table");
            impl->table.push_back(d);
        }
    }
    impl->carrier = std::move(carrier);
    return Metric(impl);
}

Metric Metric::product(std::vector<MetricBlock> blocks) {
    auto impl = std::make_shared<Impl>();
    impl->kind = MetricKind::product;
    impl->blocks = std::move(blocks);
    return Metric(impl);
}

MetricBlock block(std::size_t offset, std::size_t length, Metric m) {
    return MetricBlock{offset, length, std::make_shared<const Metric>(std::move(m))};
}

MetricKind Metric::kind() const { return impl_->kind; }
const FinitePointSet& Metric::carrier() const { return impl_->carrier; }
const std::vector<MetricBlock>& Metric::blocks() const { return impl_->blocks; }

double Metric::operator()(const Point& a, const Point& b) const {
    check_dims(a, b);
    return measure(a, b, 0, a.dim());
}

double Metric::measure(const Point& a, const Point& b, std::size_t off,
                       std::size_t len) const {
    const std::size_t end = off + len;
    switch (impl_->kind) {
        case MetricKind::euclidean: {
            double s = 0.0;
            for (std::size_t i = off; i < end; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
            return std::sqrt(s);
        }
        case MetricKind::manhattan: {
            double s = 0.0;
            for (std::size_t i = off; i < end; ++i) s += std::fabs(a[i] - b[i]);
            return s;
        }
        case MetricKind::chebyshev: {
            double s = 0.0;
            for (std::size_t i = off; i < end; ++i) s = std::max(s, std::fabs(a[i] - b[i]));
            return s;
        }
        case MetricKind::discrete:
            for (std::size_t i = off; i < end; ++i)
                if (a[i] != b[i]) return 1.0;
            return 0.0;
        case MetricKind::shortest_path:
        case MetricKind::table: {
            const auto& c = impl_->carrier;
            const bool whole = off == 0 && len == a.dim();
            auto i = whole ? c.index_of(a) : c.index_of(a.slice(off, len));
            auto j = whole ? c.index_of(b) : c.index_of(b.slice(off, len));
            if (!i || !j) throw OutOfDomain("point outside the metric carrier");
            double v = impl_->table[*i * c.size() + *j];
            if (v < 0) throw Disconnected("no path between " + a.str() + " and " + b.str());
            return v;
        }
        case MetricKind::product: {
            double s = 0.0;
            for (const auto& blk : impl_->blocks) {
                if (blk.offset + blk.length > len)
                    throw DimensionMismatch("product block exceeds point dimension");
                s = std::max(s, blk.metric->measure(a, b, off + blk.offset, blk.length));
            }
            return s;
        }
    }
    return 0.0;
}

}  // namespace nsais
