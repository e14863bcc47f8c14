#ifndef GBBAN_CORITIVITY_HPP
#define GBBAN_CORITIVITY_HPP

#include <cstdint>
#include <vector>

#include "gbban/graph.hpp"

namespace gbban {

// Largest node count handled by exhaustive enumeration (~10^6 subsets).
inline constexpr int kExactCoritivityLimit = 20;

struct CoritivityResult {
    int h = 0;                // coritivity value: max over S of ω(G−S) − |S|
    std::vector<int> core;    // a maximizing S, node indexes ascending
    bool is_exact = false;
};

struct MmasParams {
    int n_ants = 20;
    int max_iters = 50;
    double rho = 0.1;        // evaporation rate in (0,1)
    double tau_min = 0.1;
    double tau_max = 5.0;
    double alpha = 1.0;      // pheromone exponent
    double beta = 1.0;       // degree-heuristic exponent
    std::uint64_t seed = 0;
};

struct ConcentrationFeature {
    int core_size = 0;
    int coritivity = 0;
    double norm_core = 0.0;  // |S| / |V_ego|
    double norm_h = 0.0;     // h / |V_ego|
};

// Number of connected components of the graph induced on V \ removed,
// ignoring edge weights. `removed` must be a proper subset of V.
int components_after_removal(const BehaviorGraph& g, const std::vector<int>& removed);

// Exhaustive maximization of ω(G−S) − |S| over all non-empty proper S.
// Among maximizers returns the lexicographically smallest index set.
// Requires a connected graph with |V| <= kExactCoritivityLimit.
CoritivityResult exact_coritivity(const BehaviorGraph& g);

// Max-Min Ant System approximation: per-vertex pheromones clamped to
// [tau_min, tau_max], subset-size draw uniform in [1, ceil(|V|/2)], roulette
// vertex selection by tau^alpha * deg^beta, global-best deposit of 1 per
// iteration. Deterministic in the seed.
CoritivityResult mmas_coritivity(const BehaviorGraph& g, const MmasParams& p);

// Concentration feature of a user: core size and coritivity of the ego
// subgraph, exact when the ego graph is small enough, MMAS otherwise.
ConcentrationFeature concentration_feature(const BehaviorGraph& g, const NodeRef& user,
                                           const MmasParams& p);

}  // namespace gbban

#endif
