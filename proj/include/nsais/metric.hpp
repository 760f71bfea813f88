#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nsais/point.hpp"

namespace nsais {

enum class MetricKind { euclidean, manhattan, chebyshev, shortest_path, discrete, table, product };

std::string to_string(MetricKind k);

class Metric;

// A coordinate block of a product space, measured by its own metric.
struct MetricBlock {
    std::size_t offset = 0;
    std::size_t length = 0;
    std::shared_ptr<const Metric> metric;
};

class Metric {
public:
    // Default is euclidean.
    Metric();

    static Metric euclidean();
    static Metric manhattan();
    static Metric chebyshev();
    static Metric discrete();
    // 4-neighbour unit-step path length inside the given 2-d cells.
    static Metric shortest_path(const FinitePointSet& free_cells);
    // Explicit distance matrix over a carrier; distances[i][j] pairs carrier[i], carrier[j].
    static Metric table(FinitePointSet carrier, std::vector<std::vector<double>> distances);
    // Max over the blocks' metrics.
    static Metric product(std::vector<MetricBlock> blocks);

    double operator()(const Point& a, const Point& b) const;

    MetricKind kind() const;

    // Carrier of table / shortest_path metrics (empty otherwise).
    const FinitePointSet& carrier() const;
    const std::vector<MetricBlock>& blocks() const;

private:
    struct Impl;
    explicit Metric(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    double measure(const Point& a, const Point& b, std::size_t off, std::size_t len) const;
    std::shared_ptr<const Impl> impl_;
};

MetricBlock block(std::size_t offset, std::size_t length, Metric m);

}  // namespace nsais
