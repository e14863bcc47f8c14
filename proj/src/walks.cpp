#include "gbban/walks.hpp"

#include <array>
#include <stdexcept>
#include <unordered_set>

#include "gbban/rng.hpp"
#include "gbban/tsv.hpp"

namespace gbban {

const std::string& to_string(WalkStrategy s) {
    static const std::array<std::string, 3> names = {"deepwalk", "node2vec", "behavior_weighted"};
    return names[static_cast<int>(s)];
}

WalkStrategy walk_strategy_from_string(const std::string& s) {
    for (int i = 0; i < 3; ++i)
        if (to_string(static_cast<WalkStrategy>(i)) == s) return static_cast<WalkStrategy>(i);
    throw std::invalid_argument("unknown walk strategy '" + s + "'");
}

Eigen::VectorXd transition_distribution(const BehaviorGraph& g, std::optional<int> prev,
                                        int current, const WalkConfig& cfg) {
    const auto& nbs = g.neighbors(current);
    if (nbs.empty()) throw std::invalid_argument("isolated node has no transition distribution");

    Eigen::VectorXd w(nbs.size());
    switch (cfg.strategy) {
        case WalkStrategy::Deepwalk:
            w.setOnes();
            break;
        case WalkStrategy::BehaviorWeighted:
            for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = nbs[i].weight;
            break;
        case WalkStrategy::Node2vec: {
            if (!prev) {  // first step: weight-proportional
                for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = nbs[i].weight;
                break;
            }
            std::unordered_set<int> prev_nbrs;
            for (const auto& nb : g.neighbors(*prev)) prev_nbrs.insert(nb.to);
            if (!prev_nbrs.count(current))
                throw std::invalid_argument("prev must be adjacent to current");
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                double alpha;
                if (nbs[i].to == *prev)
                    alpha = 1.0 / cfg.p;  // d(t,x) = 0
                else if (prev_nbrs.count(nbs[i].to))
                    alpha = 1.0;          // d(t,x) = 1
                else
                    alpha = 1.0 / cfg.q;  // d(t,x) = 2
                w[i] = alpha * nbs[i].weight;
            }
            break;
        }
    }
    return w / w.sum();
}

int sample_next(const BehaviorGraph& g, std::optional<int> prev, int current,
                const WalkConfig& cfg, Rng& rng) {
    Eigen::VectorXd probs = transition_distribution(g, prev, current, cfg);
    double x = rng.uniform();
    int pick = static_cast<int>(probs.size()) - 1;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        x -= probs[i];
        if (x < 0) { pick = static_cast<int>(i); break; }
    }
    return g.neighbors(current)[pick].to;
}

std::vector<std::vector<int>> sample_walks(const BehaviorGraph& g, const WalkConfig& cfg) {
    if (cfg.walk_length < 2) throw std::invalid_argument("walk_length must be >= 2");
    const int n = g.num_nodes();
    std::vector<std::vector<int>> walks;
    walks.reserve(static_cast<std::size_t>(n) * cfg.walks_per_node);

    for (int epoch = 0; epoch < cfg.walks_per_node; ++epoch) {
        std::vector<int> starts(n);
        for (int v = 0; v < n; ++v) starts[v] = v;
        Rng order_rng(derive_seed(cfg.seed, "walk-order", static_cast<std::uint64_t>(epoch)));
        order_rng.shuffle(starts);

        for (int start : starts) {
            Rng rng(derive_seed(cfg.seed, "walk", static_cast<std::uint64_t>(epoch),
                                static_cast<std::uint64_t>(start)));
            std::vector<int> walk{start};
            std::optional<int> prev;
            while (static_cast<int>(walk.size()) < cfg.walk_length) {
                int current = walk.back();
                if (g.degree(current) == 0) break;  // singleton component
                Eigen::VectorXd probs = transition_distribution(g, prev, current, cfg);
                double x = rng.uniform();
                int pick = static_cast<int>(probs.size()) - 1;
                for (Eigen::Index i = 0; i < probs.size(); ++i) {
                    x -= probs[i];
                    if (x < 0) { pick = static_cast<int>(i); break; }
                }
                prev = current;
                walk.push_back(g.neighbors(current)[pick].to);
            }
            walks.push_back(std::move(walk));
        }
    }
    return walks;
}

void save_walks(const std::string& path, const std::vector<std::vector<int>>& walks) {
    auto out = open_output(path);
    for (const auto& walk : walks) {
        for (std::size_t i = 0; i < walk.size(); ++i) {
            if (i) out << ' ';
            out << walk[i];
        }
        out << '\n';
    }
}

std::vector<std::vector<int>> load_walks(const std::string& path) {
    std::vector<std::vector<int>> walks;
    for (const auto& line : read_lines(path)) {
        std::vector<int> walk;
        for (const auto& tok : split(line, ' '))
            if (!tok.empty()) walk.push_back(static_cast<int>(parse_i64(tok)));
        if (!walk.empty()) walks.push_back(std::move(walk));
    }
    return walks;
}

}  // namespace gbban
