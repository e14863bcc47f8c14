#ifndef GBBAN_GRAPH_HPP
#define GBBAN_GRAPH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gbban/types.hpp"

namespace gbban {

// The seven entity node kinds of the interaction behavior graph.
enum class NodeKind : int { News = 0, Poster, User, Topic, Tag, Cat1, Cat2 };

inline constexpr int kNumNodeKinds = 7;

const std::string& to_string(NodeKind k);
NodeKind node_kind_from_string(const std::string& s);

// Edge relation kinds; endpoint node kinds must be consistent with the label.
enum class EdgeLabel : int {
    UserNews = 0,
    UserTopic,
    UserTag,
    UserCat1,
    UserCat2,
    UserPoster,
    NewsTopic,
    NewsTag,
    NewsCat1,
    NewsCat2,
    NewsPoster,
};

const std::string& to_string(EdgeLabel l);
EdgeLabel edge_label_from_string(const std::string& s);

struct NodeRef {
    NodeKind kind = NodeKind::News;
    std::string id;
    int index = -1;  // dense in [0, |V|)

    std::string key() const { return to_string(kind) + ":" + id; }
    bool operator==(const NodeRef&) const = default;
};

struct Neighbor {
    int to = -1;
    double weight = 0.0;
    EdgeLabel label = EdgeLabel::UserNews;
};

struct EdgeRecord {
    int i = -1;
    int j = -1;
    EdgeLabel label = EdgeLabel::UserNews;
    double weight = 0.0;
};

// Weighted heterogeneous undirected graph. Immutable once built; adjacency
// lists are symmetric and keep the edge insertion order, so that a graph
// written to disk and read back walks identically.
class BehaviorGraph {
public:
    int add_node(NodeKind kind, const std::string& id);  // idempotent, returns index
    void add_edge(int i, int j, EdgeLabel label, double weight);

    int find(NodeKind kind, const std::string& id) const;  // -1 if absent
    const NodeRef& node(int index) const { return nodes_.at(index); }
    const std::vector<NodeRef>& nodes() const { return nodes_; }
    const std::vector<Neighbor>& neighbors(int index) const { return adj_.at(index); }
    const std::vector<EdgeRecord>& edges() const { return edges_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int degree(int index) const { return static_cast<int>(adj_.at(index).size()); }

    // weight of edge (i, j), if present
    std::optional<double> edge_weight(int i, int j) const;

    bool is_connected() const;

private:
    std::vector<NodeRef> nodes_;
    std::vector<std::vector<Neighbor>> adj_;
    std::vector<EdgeRecord> edges_;
    std::unordered_map<std::string, int> index_;
};

// user-news edge weight for a behavior: its rank on the linear 1..6 scale
double user_news_weight(Behavior b);

// Builds the full interaction behavior graph from the four datasets.
// Node indexing is dense in kind-major insertion order
// (users, news, topics, tags, cat1, cat2, posters).
BehaviorGraph build_graph(const Dataset& ds);

// Induced subgraph on {user} ∪ N(user), edge weights preserved.
// Throws if the user is missing or isolated.
BehaviorGraph ego_subgraph(const BehaviorGraph& g, const NodeRef& user);

// Per-news trigger timestamps, precomputed once from the behavior logs.
class TriggerIndex {
public:
    explicit TriggerIndex(const std::vector<BehaviorLog>& logs);
    // latest trigger of `news_id` strictly before `as_of`, if any
    std::optional<std::int64_t> latest_before(const std::string& news_id, std::int64_t as_of) const;

private:
    std::unordered_map<std::string, std::vector<std::int64_t>> times_;  // sorted ascending
};

// The ≤ n news co-triggered with `b` (sharing a user neighbor) that were
// triggered most recently before `as_of`; ties broken by news_id.
std::vector<NodeRef> environmental_news(const BehaviorGraph& g, const NodeRef& b, int n,
                                        std::int64_t as_of, const TriggerIndex& triggers);
std::vector<NodeRef> environmental_news(const BehaviorGraph& g, const NodeRef& b, int n,
                                        std::int64_t as_of, const std::vector<BehaviorLog>& logs);

// Two-file text export: nodes (`index\tkind\tid`) and edges
// (`i\tj\tlabel\tweight`), edges in insertion order.
void save_graph(const BehaviorGraph& g, const std::string& nodes_path, const std::string& edges_path);
BehaviorGraph load_graph(const std::string& nodes_path, const std::string& edges_path);

}  // namespace gbban

#endif
