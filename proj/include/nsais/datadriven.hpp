#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsais/dp.hpp"

namespace nsais {

// Observations, actions and stage costs for t = 0..T, as indices into the
// model's per-time sets.
struct Trajectory {
    std::vector<Index> y;
    std::vector<Index> u;
    std::vector<double> c;

    friend bool operator==(const Trajectory& a, const Trajectory& b) {
        return a.y == b.y && a.u == b.u && a.c == b.c;
    }
    friend bool operator<(const Trajectory& a, const Trajectory& b) {
        if (a.y != b.y) return a.y < b.y;
        if (a.u != b.u) return a.u < b.u;
        return a.c < b.c;
    }
};

struct TrajectoryDataset {
    int horizon = 0;
    std::vector<Trajectory> trajectories;
    nlohmann::json metadata = nlohmann::json::object();
};

enum class Exploration { uniform, round_robin, user };

struct ExplorationSpec {
    Exploration kind = Exploration::uniform;
    Policy user;  // used when kind == user
};

// n seeded rollouts; trajectory i draws from its own generator seeded from (seed, i).
// Round-robin plays action (i + t) mod |U_t| in trajectory i.
TrajectoryDataset generate_dataset(const SystemModel& sys, const ExplorationSpec& spec,
                                   std::size_t n, std::uint64_t seed);

// Every distinct observable trajectory over all initial states, action
// sequences, disturbances and noises.
TrajectoryDataset generate_exhaustive_dataset(const SystemModel& sys,
                                              std::size_t budget = kDefaultBudget);

// Key of a history window: the last k observations and the actions between them.
Key window_key(const Memory& m, int k);

class EmpiricalRangeModel {
public:
    struct Entry {
        IndexSet next_observations;  // K^ob, empty at T
        double max_cost = 0.0;       // C^max
        std::size_t count = 0;
    };
    using Table = std::map<std::pair<Key, Index>, Entry>;  // (window, action)

    int k = 1;
    int horizon = 0;
    std::vector<Table> tables;     // [t]
    std::vector<Index> initial_y;  // observed y_0 values

    const Entry* find(int t, const Key& window, Index u) const;
    std::size_t key_count(int t) const;
};

EmpiricalRangeModel build_empirical_ranges(const TrajectoryDataset& d, int k);

// Average Hausdorff distance between predicted and empirical ranges plus
// lambda * |c_hat - c_max|.
double range_prediction_loss(const FinitePointSet& predicted, const FinitePointSet& empirical,
                             const Metric& m, double c_hat = 0.0, double c_max = 0.0,
                             double lambda = 0.0);

// Window keys as realizations: transitions follow the observed K^ob, costs
// are C^max, and unseen (window, action) pairs are unavailable. MissingKey
// when a predicted successor window never occurs in the data.
InfoAbstraction data_abstraction(const EmpiricalRangeModel& model, const SystemModel& signature);
Solution solve_dp_from_data(const EmpiricalRangeModel& model, const SystemModel& signature);

// Newline-delimited {replicate, t, y, u, c} records with points as coordinates.
void write_dataset_ndjson(const SystemModel& sys, const TrajectoryDataset& d, std::ostream& out);
TrajectoryDataset read_dataset_ndjson(const SystemModel& sys, std::istream& in);

nlohmann::json empirical_model_to_json(const SystemModel& sys, const EmpiricalRangeModel& m);
EmpiricalRangeModel empirical_model_from_json(const SystemModel& sys, const nlohmann::json& j);

}  // namespace nsais
