#include "gbban/coritivity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gbban/rng.hpp"

namespace gbban {

int components_after_removal(const BehaviorGraph& g, const std::vector<int>& removed) {
    const int n = g.num_nodes();
    std::vector<char> gone(n, 0);
    int n_removed = 0;
    for (int v : removed) {
        if (v < 0 || v >= n) throw std::invalid_argument("node index out of range");
        if (!gone[v]) ++n_removed;
        gone[v] = 1;
    }
    if (n_removed == n) throw std::invalid_argument("cannot remove every node");

    std::vector<char> seen(n, 0);
    std::vector<int> stack;
    int components = 0;
    for (int start = 0; start < n; ++start) {
        if (gone[start] || seen[start]) continue;
        ++components;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (const auto& nb : g.neighbors(v))
                if (!gone[nb.to] && !seen[nb.to]) {
                    seen[nb.to] = 1;
                    stack.push_back(nb.to);
                }
        }
    }
    return components;
}

namespace {

std::vector<int> mask_to_set(std::uint32_t mask) {
    std::vector<int> out;
    for (int v = 0; mask; ++v, mask >>= 1)
        if (mask & 1u) out.push_back(v);
    return out;
}

// component count on the bitmask-encoded graph with `removed` deleted
int components_bitmask(const std::vector<std::uint32_t>& adj, std::uint32_t all,
                       std::uint32_t removed) {
    std::uint32_t remaining = all & ~removed;
    int components = 0;
    while (remaining) {
        ++components;
        std::uint32_t frontier = remaining & (~remaining + 1);  // lowest set bit
        std::uint32_t comp = 0;
        while (frontier) {
            comp |= frontier;
            std::uint32_t next = 0;
            std::uint32_t f = frontier;
            while (f) {
                int v = std::countr_zero(f);
                f &= f - 1;
                next |= adj[v];
            }
            frontier = next & remaining & ~comp;
        }
        remaining &= ~comp;
    }
    return components;
}

}  // namespace

CoritivityResult exact_coritivity(const BehaviorGraph& g) {
    const int n = g.num_nodes();
    if (n > kExactCoritivityLimit)
        throw std::invalid_argument("graph too large for exact coritivity (" + std::to_string(n) +
                                    " > " + std::to_string(kExactCoritivityLimit) +
                                    " nodes); use mmas_coritivity");
    if (n < 2) throw std::invalid_argument("coritivity needs at least 2 nodes");
    if (!g.is_connected()) throw std::invalid_argument("coritivity requires a connected graph");

    std::vector<std::uint32_t> adj(n, 0);
    for (int v = 0; v < n; ++v)
        for (const auto& nb : g.neighbors(v)) adj[v] |= 1u << nb.to;
    const std::uint32_t all = n == 32 ? ~0u : (1u << n) - 1;

    int best = std::numeric_limits<int>::min();
    std::vector<int> best_set;
    for (std::uint32_t mask = 1; mask < all; ++mask) {
        int size = std::popcount(mask);
        int value = components_bitmask(adj, all, mask) - size;
        if (value < best) continue;
        std::vector<int> set = mask_to_set(mask);
        if (value > best || std::lexicographical_compare(set.begin(), set.end(),
                                                         best_set.begin(), best_set.end())) {
            best = value;
            best_set = std::move(set);
        }
    }
    return CoritivityResult{best, std::move(best_set), true};
}

CoritivityResult mmas_coritivity(const BehaviorGraph& g, const MmasParams& p) {
    const int n = g.num_nodes();
    if (n < 2) throw std::invalid_argument("coritivity needs at least 2 nodes");
    if (!g.is_connected()) throw std::invalid_argument("coritivity requires a connected graph");
    if (!(p.tau_min < p.tau_max)) throw std::invalid_argument("tau_min must be < tau_max");

    std::vector<double> tau(n, p.tau_max);
    std::vector<double> heuristic(n);
    for (int v = 0; v < n; ++v) heuristic[v] = std::pow(static_cast<double>(g.degree(v)), p.beta);

    const int max_size = (n + 1) / 2;
    int best = std::numeric_limits<int>::min();
    std::vector<int> best_set;
    std::vector<double> score(n);
    std::vector<char> chosen(n);

    for (int iter = 0; iter < p.max_iters; ++iter) {
        for (int ant = 0; ant < p.n_ants; ++ant) {
            // per-ant stream so a parallel schedule would reproduce serial output
            Rng rng(derive_seed(p.seed, "mmas-ant", static_cast<std::uint64_t>(iter),
                                static_cast<std::uint64_t>(ant)));
            int k = 1 + static_cast<int>(rng.uniform_u64(max_size));
            for (int v = 0; v < n; ++v) {
                score[v] = std::pow(tau[v], p.alpha) * heuristic[v];
                chosen[v] = 0;
            }
            std::vector<int> subset;
            subset.reserve(k);
            for (int pick = 0; pick < k; ++pick) {
                double total = 0;
                for (int v = 0; v < n; ++v)
                    if (!chosen[v]) total += score[v];
                if (total <= 0) break;
                double x = rng.uniform() * total;
                int sel = -1;
                for (int v = 0; v < n; ++v) {
                    if (chosen[v]) continue;
                    x -= score[v];
                    if (x < 0) { sel = v; break; }
                }
                if (sel < 0) {  // numeric edge: fall back to last unchosen
                    for (int v = n - 1; v >= 0; --v)
                        if (!chosen[v]) { sel = v; break; }
                }
                chosen[sel] = 1;
                subset.push_back(sel);
            }
            if (subset.empty()) continue;
            std::sort(subset.begin(), subset.end());
            int value = components_after_removal(g, subset) - static_cast<int>(subset.size());
            if (value > best) {
                best = value;
                best_set = std::move(subset);
            }
        }
        // evaporate everywhere, deposit 1 on the global-best subset, clamp
        std::vector<char> in_best(n, 0);
        for (int v : best_set) in_best[v] = 1;
        for (int v = 0; v < n; ++v) {
            double t = (1.0 - p.rho) * tau[v] + (in_best[v] ? 1.0 : 0.0);
            tau[v] = std::clamp(t, p.tau_min, p.tau_max);
        }
    }
    return CoritivityResult{best, std::move(best_set), false};
}

ConcentrationFeature concentration_feature(const BehaviorGraph& g, const NodeRef& user,
                                           const MmasParams& p) {
    BehaviorGraph ego = ego_subgraph(g, user);
    const int n_ego = ego.num_nodes();
    CoritivityResult res = n_ego <= kExactCoritivityLimit ? exact_coritivity(ego)
                                                          : mmas_coritivity(ego, p);
    ConcentrationFeature feat;
    feat.core_size = static_cast<int>(res.core.size());
    feat.coritivity = res.h;
    feat.norm_core = static_cast<double>(feat.core_size) / n_ego;
    feat.norm_h = static_cast<double>(feat.coritivity) / n_ego;
    return feat;
}

}  // namespace gbban
