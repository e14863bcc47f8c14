#ifndef GBBAN_WALKS_HPP
#define GBBAN_WALKS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gbban/graph.hpp"
#include "gbban/rng.hpp"

namespace gbban {

enum class WalkStrategy : int {
    Deepwalk = 0,      // uniform over neighbors
    Node2vec,          // alpha_pq(t,x) * w_vx, second-order bias
    BehaviorWeighted,  // proportional to edge weights (the default walker)
};

const std::string& to_string(WalkStrategy s);
WalkStrategy walk_strategy_from_string(const std::string& s);

struct WalkConfig {
    WalkStrategy strategy = WalkStrategy::BehaviorWeighted;
    double p = 1.0;  // node2vec return parameter
    double q = 2.0;  // node2vec in-out parameter
    int walk_length = 20;
    int walks_per_node = 10;
    std::uint64_t seed = 0;
};

// Transition probabilities from `current` over its neighbors, in adjacency
// order. `prev` is the walk's previous node (absent on the first step).
Eigen::VectorXd transition_distribution(const BehaviorGraph& g, std::optional<int> prev,
                                        int current, const WalkConfig& cfg);

// one walk step drawn from the transition distribution
int sample_next(const BehaviorGraph& g, std::optional<int> prev, int current,
                const WalkConfig& cfg, Rng& rng);

// walks_per_node walks from every node; start order is shuffled per epoch
// and each walk has its own seed-derived stream, so output is reproducible
// and independent of generation order. Isolated nodes yield length-1 walks.
std::vector<std::vector<int>> sample_walks(const BehaviorGraph& g, const WalkConfig& cfg);

// corpus file: one walk per line, space-separated node indexes
void save_walks(const std::string& path, const std::vector<std::vector<int>>& walks);
std::vector<std::vector<int>> load_walks(const std::string& path);

}  // namespace gbban

#endif
