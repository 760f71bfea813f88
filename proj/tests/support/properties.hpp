#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nsais/ranges.hpp"

namespace nsais::testkit {

// A metric together with a finite carrier to draw points from.
struct Space {
    std::string label;
    Metric metric;
    FinitePointSet carrier;
};

// One of euclidean / manhattan / chebyshev (integer or real coordinates),
// discrete, table (shortest-path closure of random weights) or grid shortest path.
Space random_space(std::mt19937_64& rng);

// Non-empty random subset of the carrier with at most max_size points.
FinitePointSet random_subset(std::mt19937_64& rng, const FinitePointSet& carrier,
                             std::size_t max_size);

// Random 4-connected set of cells grown from the origin.
FinitePointSet random_connected_cells(std::mt19937_64& rng, int size, int radius);

struct SuiteResult {
    std::string name;
    int instances = 0;
    int violations = 0;
    std::string first_failure;

    bool ok() const { return violations == 0 && instances > 0; }
};

SuiteResult metric_axioms_suite(int instances, std::uint64_t seed);
SuiteResult hausdorff_metric_suite(int instances, std::uint64_t seed);
// Conditional ranges of Z = h(X) given Y = g(X) move at most L_{g^-1} L_h eta(y1, y2).
SuiteResult conditional_range_lipschitz_suite(int instances, std::uint64_t seed);
// Sup/inf of two functions on one index set, and max of pairs.
SuiteResult sup_inf_suite(int instances, std::uint64_t seed);
// |max_A f - max_B f| <= L_f H(A, B).
SuiteResult sup_over_sets_suite(int instances, std::uint64_t seed);
// H(A u B, C u D) <= max(H(A, C), H(B, D)).
SuiteResult union_suite(int instances, std::uint64_t seed);

std::vector<SuiteResult> all_property_suites(int instances, std::uint64_t seed);

}  // namespace nsais::testkit
