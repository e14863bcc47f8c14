#include "gbban/graph.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <stdexcept>

#include "gbban/tsv.hpp"

namespace gbban {

const std::string& to_string(NodeKind k) {
    static const std::array<std::string, kNumNodeKinds> names = {"news", "poster", "user",
                                                                 "topic", "tag",    "cat1", "cat2"};
    return names[static_cast<int>(k)];
}

NodeKind node_kind_from_string(const std::string& s) {
    for (int i = 0; i < kNumNodeKinds; ++i)
        if (to_string(static_cast<NodeKind>(i)) == s) return static_cast<NodeKind>(i);
    throw std::invalid_argument("unknown node kind '" + s + "'");
}

const std::string& to_string(EdgeLabel l) {
    static const std::array<std::string, 11> names = {
        "user-news", "user-topic", "user-tag", "user-cat1", "user-cat2", "user-poster",
        "news-topic", "news-tag",  "news-cat1", "news-cat2", "news-poster"};
    return names[static_cast<int>(l)];
}

EdgeLabel edge_label_from_string(const std::string& s) {
    for (int i = 0; i < 11; ++i)
        if (to_string(static_cast<EdgeLabel>(i)) == s) return static_cast<EdgeLabel>(i);
    throw std::invalid_argument("unknown edge label '" + s + "'");
}

namespace {

// endpoint kinds required by each label, in (first, second) order
std::pair<NodeKind, NodeKind> label_endpoints(EdgeLabel l) {
    switch (l) {
        case EdgeLabel::UserNews: return {NodeKind::User, NodeKind::News};
        case EdgeLabel::UserTopic: return {NodeKind::User, NodeKind::Topic};
        case EdgeLabel::UserTag: return {NodeKind::User, NodeKind::Tag};
        case EdgeLabel::UserCat1: return {NodeKind::User, NodeKind::Cat1};
        case EdgeLabel::UserCat2: return {NodeKind::User, NodeKind::Cat2};
        case EdgeLabel::UserPoster: return {NodeKind::User, NodeKind::Poster};
        case EdgeLabel::NewsTopic: return {NodeKind::News, NodeKind::Topic};
        case EdgeLabel::NewsTag: return {NodeKind::News, NodeKind::Tag};
        case EdgeLabel::NewsCat1: return {NodeKind::News, NodeKind::Cat1};
        case EdgeLabel::NewsCat2: return {NodeKind::News, NodeKind::Cat2};
        case EdgeLabel::NewsPoster: return {NodeKind::News, NodeKind::Poster};
    }
    throw std::logic_error("bad label");
}

}  // namespace

int BehaviorGraph::add_node(NodeKind kind, const std::string& id) {
    std::string key = to_string(kind) + ":" + id;
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int idx = static_cast<int>(nodes_.size());
    nodes_.push_back(NodeRef{kind, id, idx});
    adj_.emplace_back();
    index_.emplace(std::move(key), idx);
    return idx;
}

void BehaviorGraph::add_edge(int i, int j, EdgeLabel label, double weight) {
    if (i == j) throw std::invalid_argument("self-loop");
    if (weight <= 0) throw std::invalid_argument("non-positive edge weight");
    auto [ka, kb] = label_endpoints(label);
    NodeKind ki = nodes_.at(i).kind, kj = nodes_.at(j).kind;
    if (!((ki == ka && kj == kb) || (ki == kb && kj == ka)))
        throw std::invalid_argument("edge label '" + to_string(label) +
                                    "' inconsistent with endpoint kinds");
    adj_[i].push_back(Neighbor{j, weight, label});
    adj_[j].push_back(Neighbor{i, weight, label});
    edges_.push_back(EdgeRecord{i, j, label, weight});
}

int BehaviorGraph::find(NodeKind kind, const std::string& id) const {
    auto it = index_.find(to_string(kind) + ":" + id);
    return it == index_.end() ? -1 : it->second;
}

std::optional<double> BehaviorGraph::edge_weight(int i, int j) const {
    for (const auto& nb : adj_.at(i))
        if (nb.to == j) return nb.weight;
    return std::nullopt;
}

bool BehaviorGraph::is_connected() const {
    if (nodes_.empty()) return true;
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (const auto& nb : adj_[v])
            if (!seen[nb.to]) {
                seen[nb.to] = 1;
                ++visited;
                stack.push_back(nb.to);
            }
    }
    return visited == nodes_.size();
}

double user_news_weight(Behavior b) { return static_cast<double>(behavior_rank(b)); }

namespace {

[[noreturn]] void dangling(const std::string& what, const std::string& id) {
    throw std::runtime_error("dangling " + what + " reference '" + id + "'");
}

}  // namespace

BehaviorGraph build_graph(const Dataset& ds) {
    BehaviorGraph g;

    // Dense indexing in kind-major insertion order: users, news, topics,
    // tags, cat1, cat2, posters. Within a kind, ids in first-appearance
    // order scanning logs, profiles, news index, topic index.
    auto first_appearance = [&](NodeKind kind) {
        std::vector<std::string> order;
        std::set<std::string> seen;
        auto push = [&](const std::string& id) {
            if (id.empty() || id == kNullTag) return;
            if (seen.insert(id).second) order.push_back(id);
        };
        for (const auto& r : ds.logs) {
            if (kind == NodeKind::User) push(r.user_id);
            if (kind == NodeKind::News) push(r.news_id);
            if (kind == NodeKind::Topic) push(r.topic_id);
        }
        for (const auto& r : ds.users) {
            if (kind == NodeKind::User) push(r.user_id);
            if (kind == NodeKind::Cat1)
                for (const auto& id : r.cat1_ids) push(id);
            if (kind == NodeKind::Cat2)
                for (const auto& id : r.cat2_ids) push(id);
            if (kind == NodeKind::Tag)
                for (const auto& id : r.tag_ids) push(id);
        }
        for (const auto& r : ds.news) {
            if (kind == NodeKind::News) push(r.news_id);
            if (kind == NodeKind::Topic) push(r.topic_id);
            if (kind == NodeKind::Cat1) push(r.cat1_id);
            if (kind == NodeKind::Cat2) push(r.cat2_id);
            if (kind == NodeKind::Poster) push(r.poster_id);
            if (kind == NodeKind::Tag)
                for (const auto& id : r.tag_ids) push(id);
        }
        for (const auto& r : ds.topics) {
            if (kind == NodeKind::Topic) push(r.topic_id);
            if (kind == NodeKind::Cat1) push(r.cat1_id);
            if (kind == NodeKind::Cat2) push(r.cat2_id);
            if (kind == NodeKind::Tag)
                for (const auto& id : r.tag_ids) push(id);
        }
        return order;
    };

    for (NodeKind kind : {NodeKind::User, NodeKind::News, NodeKind::Topic, NodeKind::Tag,
                          NodeKind::Cat1, NodeKind::Cat2, NodeKind::Poster})
        for (const auto& id : first_appearance(kind)) g.add_node(kind, id);

    std::unordered_map<std::string, const NewsRecord*> news_by_id;
    for (const auto& n : ds.news) news_by_id[n.news_id] = &n;

    // user-news edges: strongest (max-rank) behavior per (user, news)
    // maps keyed by node index, so iteration order is the dense node order
    std::map<int, std::map<int, int>> best_rank;  // user -> news -> rank
    for (const auto& log : ds.logs) {
        int u = g.find(NodeKind::User, log.user_id);
        int n = g.find(NodeKind::News, log.news_id);
        if (news_by_id.find(log.news_id) == news_by_id.end()) dangling("news", log.news_id);
        int& r = best_rank[u][n];
        r = std::max(r, behavior_rank(log.behavior));
    }
    for (const auto& [u, per_news] : best_rank)
        for (const auto& [n, rank] : per_news)
            g.add_edge(u, n, EdgeLabel::UserNews, static_cast<double>(rank));

    // user-class edges: per label, proportion of the user's distinct
    // triggered news falling in each class; weights per (user, label) sum to 1
    for (const auto& [u, per_news] : best_rank) {
        std::map<int, int> topic_cnt, tag_cnt, cat1_cnt, cat2_cnt, poster_cnt;
        for (const auto& [n, rank] : per_news) {
            const NewsRecord* rec = news_by_id.at(g.node(n).id);
            int t = g.find(NodeKind::Topic, rec->topic_id);
            if (t < 0) dangling("topic", rec->topic_id);
            ++topic_cnt[t];
            int c1 = g.find(NodeKind::Cat1, rec->cat1_id);
            if (c1 < 0) dangling("cat1", rec->cat1_id);
            ++cat1_cnt[c1];
            int c2 = g.find(NodeKind::Cat2, rec->cat2_id);
            if (c2 < 0) dangling("cat2", rec->cat2_id);
            ++cat2_cnt[c2];
            int p = g.find(NodeKind::Poster, rec->poster_id);
            if (p < 0) dangling("poster", rec->poster_id);
            ++poster_cnt[p];
            std::set<std::string> distinct_tags(rec->tag_ids.begin(), rec->tag_ids.end());
            for (const auto& tag : distinct_tags) {
                if (tag == kNullTag) continue;
                int tg = g.find(NodeKind::Tag, tag);
                if (tg < 0) dangling("tag", tag);
                ++tag_cnt[tg];
            }
        }
        auto add_class_edges = [&](const std::map<int, int>& cnt, EdgeLabel label) {
            double total = 0;
            for (const auto& [node, c] : cnt) total += c;
            if (total == 0) return;
            for (const auto& [node, c] : cnt) g.add_edge(u, node, label, c / total);
        };
        add_class_edges(topic_cnt, EdgeLabel::UserTopic);
        add_class_edges(tag_cnt, EdgeLabel::UserTag);
        add_class_edges(cat1_cnt, EdgeLabel::UserCat1);
        add_class_edges(cat2_cnt, EdgeLabel::UserCat2);
        add_class_edges(poster_cnt, EdgeLabel::UserPoster);
    }

    // news attribute edges: topic fixed at 0.5; other labels split uniformly
    // across that news's distinct attributes of the same label
    for (const auto& rec : ds.news) {
        int n = g.find(NodeKind::News, rec.news_id);
        int t = g.find(NodeKind::Topic, rec.topic_id);
        if (t < 0) dangling("topic", rec.topic_id);
        g.add_edge(n, t, EdgeLabel::NewsTopic, 0.5);
        int c1 = g.find(NodeKind::Cat1, rec.cat1_id);
        if (c1 < 0) dangling("cat1", rec.cat1_id);
        g.add_edge(n, c1, EdgeLabel::NewsCat1, 1.0);
        int c2 = g.find(NodeKind::Cat2, rec.cat2_id);
        if (c2 < 0) dangling("cat2", rec.cat2_id);
        g.add_edge(n, c2, EdgeLabel::NewsCat2, 1.0);
        int p = g.find(NodeKind::Poster, rec.poster_id);
        if (p < 0) dangling("poster", rec.poster_id);
        g.add_edge(n, p, EdgeLabel::NewsPoster, 1.0);
        std::vector<std::string> tags;
        for (const auto& tag : rec.tag_ids)
            if (tag != kNullTag && std::find(tags.begin(), tags.end(), tag) == tags.end())
                tags.push_back(tag);
        for (const auto& tag : tags) {
            int tg = g.find(NodeKind::Tag, tag);
            if (tg < 0) dangling("tag", tag);
            g.add_edge(n, tg, EdgeLabel::NewsTag, 1.0 / static_cast<double>(tags.size()));
        }
    }

    return g;
}

BehaviorGraph ego_subgraph(const BehaviorGraph& g, const NodeRef& user) {
    int u = g.find(user.kind, user.id);
    if (u < 0) throw std::invalid_argument("unknown node '" + user.key() + "'");
    if (g.degree(u) == 0) throw std::runtime_error("degenerate ego graph for '" + user.key() + "'");

    std::vector<int> members{u};
    for (const auto& nb : g.neighbors(u)) members.push_back(nb.to);
    std::sort(members.begin() + 1, members.end());
    members.erase(std::unique(members.begin() + 1, members.end()), members.end());

    std::unordered_map<int, int> local;
    BehaviorGraph sub;
    for (int v : members) {
        const NodeRef& node = g.node(v);
        local[v] = sub.add_node(node.kind, node.id);
    }
    for (int v : members)
        for (const auto& nb : g.neighbors(v)) {
            if (nb.to < v) continue;  // each undirected edge once
            auto it = local.find(nb.to);
            if (it != local.end()) sub.add_edge(local[v], it->second, nb.label, nb.weight);
        }
    return sub;
}

TriggerIndex::TriggerIndex(const std::vector<BehaviorLog>& logs) {
    for (const auto& log : logs) times_[log.news_id].push_back(log.timestamp);
    for (auto& [id, ts] : times_) std::sort(ts.begin(), ts.end());
}

std::optional<std::int64_t> TriggerIndex::latest_before(const std::string& news_id,
                                                        std::int64_t as_of) const {
    auto it = times_.find(news_id);
    if (it == times_.end()) return std::nullopt;
    const auto& ts = it->second;
    auto lb = std::lower_bound(ts.begin(), ts.end(), as_of);
    if (lb == ts.begin()) return std::nullopt;
    return *(lb - 1);
}

std::vector<NodeRef> environmental_news(const BehaviorGraph& g, const NodeRef& b, int n,
                                        std::int64_t as_of, const TriggerIndex& triggers) {
    if (n < 0) throw std::invalid_argument("n must be >= 0");
    std::vector<NodeRef> out;
    if (n == 0) return out;
    int bi = g.find(b.kind, b.id);
    if (bi < 0) throw std::invalid_argument("unknown news '" + b.key() + "'");

    std::set<int> candidates;
    for (const auto& nb : g.neighbors(bi)) {
        if (g.node(nb.to).kind != NodeKind::User) continue;
        for (const auto& nb2 : g.neighbors(nb.to))
            if (g.node(nb2.to).kind == NodeKind::News && nb2.to != bi) candidates.insert(nb2.to);
    }

    // sort by (latest trigger desc, news_id asc)
    std::vector<std::pair<std::int64_t, int>> ranked;
    for (int c : candidates) {
        auto t = triggers.latest_before(g.node(c).id, as_of);
        if (t) ranked.emplace_back(*t, c);
    }
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b2) {
        if (a.first != b2.first) return a.first > b2.first;
        return g.node(a.second).id < g.node(b2.second).id;
    });
    for (const auto& [t, c] : ranked) {
        if (static_cast<int>(out.size()) >= n) break;
        out.push_back(g.node(c));
    }
    return out;
}

std::vector<NodeRef> environmental_news(const BehaviorGraph& g, const NodeRef& b, int n,
                                        std::int64_t as_of, const std::vector<BehaviorLog>& logs) {
    return environmental_news(g, b, n, as_of, TriggerIndex(logs));
}

void save_graph(const BehaviorGraph& g, const std::string& nodes_path,
                const std::string& edges_path) {
    auto nodes = open_output(nodes_path);
    for (const auto& node : g.nodes())
        nodes << node.index << '\t' << to_string(node.kind) << '\t' << node.id << '\n';
    auto edges = open_output(edges_path);
    for (const auto& e : g.edges())
        edges << e.i << '\t' << e.j << '\t' << to_string(e.label) << '\t'
              << format_double(e.weight) << '\n';
}

BehaviorGraph load_graph(const std::string& nodes_path, const std::string& edges_path) {
    BehaviorGraph g;
    std::size_t lineno = 0;
    for (const auto& line : read_lines(nodes_path)) {
        ++lineno;
        auto f = split(line, '\t');
        if (f.size() != 3)
            throw std::runtime_error(nodes_path + ": malformed line " + std::to_string(lineno));
        int idx = g.add_node(node_kind_from_string(f[1]), f[2]);
        if (idx != std::stoi(f[0]))
            throw std::runtime_error(nodes_path + ": non-dense index at line " +
                                     std::to_string(lineno));
    }
    lineno = 0;
    for (const auto& line : read_lines(edges_path)) {
        ++lineno;
        auto f = split(line, '\t');
        if (f.size() != 4)
            throw std::runtime_error(edges_path + ": malformed line " + std::to_string(lineno));
        g.add_edge(std::stoi(f[0]), std::stoi(f[1]), edge_label_from_string(f[2]),
                   parse_double(f[3]));
    }
    return g;
}

}  // namespace gbban
