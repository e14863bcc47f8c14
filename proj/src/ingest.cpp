#include "gbban/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "gbban/rng.hpp"
#include "gbban/tsv.hpp"

namespace gbban {

namespace {

[[noreturn]] void line_error(const std::string& path, std::size_t lineno, const std::string& what) {
    throw std::runtime_error(path + ": " + what + " at line " + std::to_string(lineno));
}

void require_fields(const std::string& path, std::size_t lineno,
                    const std::vector<std::string>& fields, std::size_t n) {
    if (fields.size() != n)
        line_error(path, lineno,
                   "malformed line (expected " + std::to_string(n) + " fields, got " +
                       std::to_string(fields.size()) + ")");
}

void check_no_duplicates(const std::string& path, std::size_t lineno,
                         const std::vector<std::string>& ids, const std::string& what) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids)
        if (!seen.insert(id).second) line_error(path, lineno, "duplicate " + what + " '" + id + "'");
}

}  // namespace

std::vector<BehaviorLog> parse_behavior_logs(const std::string& path) {
    std::vector<BehaviorLog> logs;
    std::size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        auto f = split(line, '\t');
        require_fields(path, lineno, f, 5);
        BehaviorLog rec;
        rec.user_id = f[0];
        try {
            rec.timestamp = parse_i64(f[1]);
        } catch (const std::exception&) {
            line_error(path, lineno, "malformed timestamp '" + f[1] + "'");
        }
        if (rec.timestamp <= 0) line_error(path, lineno, "non-positive timestamp");
        rec.news_id = f[2];
        rec.topic_id = f[3];
        try {
            rec.behavior = behavior_from_string(f[4]);
        } catch (const std::invalid_argument& e) {
            line_error(path, lineno, e.what());
        }
        if (rec.user_id.empty() || rec.news_id.empty() || rec.topic_id.empty())
            line_error(path, lineno, "empty identifier");
        logs.push_back(std::move(rec));
    }
    return logs;
}

std::vector<UserProfile> parse_user_profiles(const std::string& path) {
    std::vector<UserProfile> users;
    std::unordered_set<std::string> seen;
    std::size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        auto f = split(line, '\t');
        require_fields(path, lineno, f, 4);
        UserProfile rec;
        rec.user_id = f[0];
        if (rec.user_id.empty()) line_error(path, lineno, "empty user_id");
        if (!seen.insert(rec.user_id).second)
            line_error(path, lineno, "duplicate user_id '" + rec.user_id + "'");
        rec.cat1_ids = split_ids(f[1]);
        rec.cat2_ids = split_ids(f[2]);
        rec.tag_ids = split_ids(f[3]);
        check_no_duplicates(path, lineno, rec.cat1_ids, "cat1_id");
        check_no_duplicates(path, lineno, rec.cat2_ids, "cat2_id");
        check_no_duplicates(path, lineno, rec.tag_ids, "tag_id");
        users.push_back(std::move(rec));
    }
    return users;
}

std::vector<NewsRecord> parse_news_index(const std::string& path) {
    std::vector<NewsRecord> news;
    std::unordered_set<std::string> seen;
    std::size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        auto f = split(line, '\t');
        require_fields(path, lineno, f, 7);
        NewsRecord rec;
        rec.news_id = f[0];
        rec.topic_id = f[1];
        rec.content = f[2].empty() ? std::vector<std::string>{} : split(f[2], ' ');
        rec.cat1_id = f[3];
        rec.cat2_id = f[4];
        rec.poster_id = f[5];
        rec.tag_ids = split_ids(f[6]);
        if (rec.news_id.empty()) line_error(path, lineno, "empty news_id");
        if (!seen.insert(rec.news_id).second)
            line_error(path, lineno, "duplicate news_id '" + rec.news_id + "'");
        if (rec.content.empty()) line_error(path, lineno, "empty content");
        if (static_cast<int>(rec.tag_ids.size()) > kNewsTagCount)
            line_error(path, lineno, "more than 9 tags");
        while (static_cast<int>(rec.tag_ids.size()) < kNewsTagCount) rec.tag_ids.push_back(kNullTag);
        news.push_back(std::move(rec));
    }
    return news;
}

std::vector<TopicRecord> parse_topic_index(const std::string& path) {
    std::vector<TopicRecord> topics;
    std::unordered_set<std::string> seen;
    std::size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        auto f = split(line, '\t');
        require_fields(path, lineno, f, 5);
        TopicRecord rec;
        rec.topic_id = f[0];
        if (rec.topic_id.empty()) line_error(path, lineno, "empty topic_id");
        if (!seen.insert(rec.topic_id).second)
            line_error(path, lineno, "duplicate topic_id '" + rec.topic_id + "'");
        rec.title = f[1].empty() ? std::vector<std::string>{} : split(f[1], ' ');
        rec.cat1_id = f[2];
        rec.cat2_id = f[3];
        rec.tag_ids = split_ids(f[4]);
        topics.push_back(std::move(rec));
    }
    return topics;
}

void write_behavior_logs(const std::string& path, const std::vector<BehaviorLog>& logs) {
    auto out = open_output(path);
    for (const auto& r : logs)
        out << r.user_id << '\t' << r.timestamp << '\t' << r.news_id << '\t' << r.topic_id << '\t'
            << to_string(r.behavior) << '\n';
}

void write_user_profiles(const std::string& path, const std::vector<UserProfile>& users) {
    auto out = open_output(path);
    for (const auto& r : users)
        out << r.user_id << '\t' << join(r.cat1_ids, ',') << '\t' << join(r.cat2_ids, ',') << '\t'
            << join(r.tag_ids, ',') << '\n';
}

void write_news_index(const std::string& path, const std::vector<NewsRecord>& news) {
    auto out = open_output(path);
    for (const auto& r : news)
        out << r.news_id << '\t' << r.topic_id << '\t' << join(r.content, ' ') << '\t' << r.cat1_id
            << '\t' << r.cat2_id << '\t' << r.poster_id << '\t' << join(r.tag_ids, ',') << '\n';
}

void write_topic_index(const std::string& path, const std::vector<TopicRecord>& topics) {
    auto out = open_output(path);
    for (const auto& r : topics)
        out << r.topic_id << '\t' << join(r.title, ' ') << '\t' << r.cat1_id << '\t' << r.cat2_id
            << '\t' << join(r.tag_ids, ',') << '\n';
}

namespace {

constexpr std::int64_t kEpochBase = 1600000000;  // synthetic time origin
constexpr int kWindowDays = 7;
constexpr double kPreferredImpressionProb = 0.7;

// Behavior sampled around the target rank 1 + 5*affinity; sharpness controls
// how tightly the draw concentrates on that rank.
Behavior sample_behavior(Rng& rng, double affinity, double sharpness) {
    const double mu = 1.0 + 5.0 * affinity;
    double weights[kNumBehaviors];
    double total = 0.0;
    for (int r = 1; r <= kNumBehaviors; ++r) {
        weights[r - 1] = std::exp(-sharpness * std::abs(r - mu));
        total += weights[r - 1];
    }
    double u = rng.uniform() * total;
    for (int i = 0; i < kNumBehaviors; ++i) {
        u -= weights[i];
        if (u < 0) return static_cast<Behavior>(i);
    }
    return Behavior::Share;
}

}  // namespace

SynthData generate_synthetic(const SynthConfig& cfg) {
    if (cfg.n_users < 1 || cfg.n_news < 1 || cfg.n_topics < 1 || cfg.n_tags < 1 ||
        cfg.n_cat1 < 1 || cfg.n_cat2 < 1 || cfg.n_posters < 1 || cfg.logs_per_user < 1 ||
        cfg.affinity_sharpness <= 0)
        throw std::invalid_argument("invalid SynthConfig");

    Rng rng(derive_seed(cfg.seed, "synth"));
    SynthData out;
    Dataset& ds = out.data;

    auto id = [](const char* prefix, int i) { return std::string(prefix) + std::to_string(i); };

    // topics: each owns a tag pool and a word vocabulary, so that news of one
    // topic share surface features and the planted preferences are learnable
    struct TopicMeta {
        std::vector<std::string> tag_pool;
        std::vector<std::string> vocab;
        std::vector<int> news;  // indexes into ds.news
    };
    std::vector<TopicMeta> meta(cfg.n_topics);
    for (int t = 0; t < cfg.n_topics; ++t) {
        TopicRecord rec;
        rec.topic_id = id("t", t);
        rec.cat1_id = id("c1_", static_cast<int>(rng.uniform_u64(cfg.n_cat1)));
        rec.cat2_id = id("c2_", static_cast<int>(rng.uniform_u64(cfg.n_cat2)));
        int pool_size = std::min(cfg.n_tags, 4);
        std::set<int> tags;
        while (static_cast<int>(tags.size()) < pool_size)
            tags.insert(static_cast<int>(rng.uniform_u64(cfg.n_tags)));
        for (int g : tags) {
            rec.tag_ids.push_back(id("g", g));
            meta[t].tag_pool.push_back(id("g", g));
        }
        for (int w = 0; w < 30; ++w) meta[t].vocab.push_back("w" + std::to_string(t) + "_" + std::to_string(w));
        rec.title.assign(meta[t].vocab.begin(), meta[t].vocab.begin() + 4);
        ds.topics.push_back(std::move(rec));
    }

    for (int n = 0; n < cfg.n_news; ++n) {
        int t = static_cast<int>(rng.uniform_u64(cfg.n_topics));
        NewsRecord rec;
        rec.news_id = id("n", n);
        rec.topic_id = ds.topics[t].topic_id;
        rec.cat1_id = ds.topics[t].cat1_id;
        rec.cat2_id = ds.topics[t].cat2_id;
        rec.poster_id = id("p", static_cast<int>(rng.uniform_u64(cfg.n_posters)));
        int n_tags = rng.uniform_int(2, std::min<int>(4, static_cast<int>(meta[t].tag_pool.size())));
        std::vector<std::string> pool = meta[t].tag_pool;
        rng.shuffle(pool);
        rec.tag_ids.assign(pool.begin(), pool.begin() + n_tags);
        std::sort(rec.tag_ids.begin(), rec.tag_ids.end());
        while (static_cast<int>(rec.tag_ids.size()) < kNewsTagCount) rec.tag_ids.push_back(kNullTag);
        int len = rng.uniform_int(8, 14);
        for (int w = 0; w < len; ++w)
            rec.content.push_back(meta[t].vocab[rng.uniform_u64(meta[t].vocab.size())]);
        meta[t].news.push_back(n);
        ds.news.push_back(std::move(rec));
    }

    // users: two strongly preferred topics each, everything else near zero
    out.affinity.resize(cfg.n_users, cfg.n_topics);
    for (int u = 0; u < cfg.n_users; ++u) {
        for (int t = 0; t < cfg.n_topics; ++t) out.affinity(u, t) = 0.04 + 0.06 * rng.uniform();
        int p1 = static_cast<int>(rng.uniform_u64(cfg.n_topics));
        int p2 = cfg.n_topics > 1 ? (p1 + 1 + static_cast<int>(rng.uniform_u64(cfg.n_topics - 1))) % cfg.n_topics : p1;
        out.affinity(u, p1) = 1.0;
        out.affinity(u, p2) = 0.7;

        UserProfile prof;
        prof.user_id = id("u", u);
        std::set<std::string> c1{ds.topics[p1].cat1_id, ds.topics[p2].cat1_id};
        std::set<std::string> c2{ds.topics[p1].cat2_id, ds.topics[p2].cat2_id};
        std::set<std::string> tg(meta[p1].tag_pool.begin(), meta[p1].tag_pool.end());
        tg.insert(meta[p2].tag_pool.begin(), meta[p2].tag_pool.end());
        prof.cat1_ids.assign(c1.begin(), c1.end());
        prof.cat2_ids.assign(c2.begin(), c2.end());
        prof.tag_ids.assign(tg.begin(), tg.end());
        ds.users.push_back(std::move(prof));
    }

    // behavior logs, per user in id order, strictly increasing timestamps
    const std::int64_t window = static_cast<std::int64_t>(kWindowDays) * 86400;
    for (int u = 0; u < cfg.n_users; ++u) {
        std::vector<std::int64_t> times(cfg.logs_per_user);
        for (auto& t : times) t = kEpochBase + static_cast<std::int64_t>(rng.uniform_u64(window));
        std::sort(times.begin(), times.end());
        for (std::size_t i = 1; i < times.size(); ++i)
            if (times[i] <= times[i - 1]) times[i] = times[i - 1] + 1;

        for (int j = 0; j < cfg.logs_per_user; ++j) {
            int news_idx;
            if (rng.uniform() < kPreferredImpressionProb) {
                // roulette over affinity, then uniform news within the topic
                double total = out.affinity.row(u).sum();
                double x = rng.uniform() * total;
                int t = cfg.n_topics - 1;
                for (int k = 0; k < cfg.n_topics; ++k) {
                    x -= out.affinity(u, k);
                    if (x < 0) { t = k; break; }
                }
                if (meta[t].news.empty())
                    news_idx = static_cast<int>(rng.uniform_u64(cfg.n_news));
                else
                    news_idx = meta[t].news[rng.uniform_u64(meta[t].news.size())];
            } else {
                news_idx = static_cast<int>(rng.uniform_u64(cfg.n_news));
            }
            const NewsRecord& news = ds.news[news_idx];
            int topic_idx = std::stoi(news.topic_id.substr(1));  // ids are "t<k>"
            BehaviorLog log;
            log.user_id = ds.users[u].user_id;
            log.timestamp = times[j];
            log.news_id = news.news_id;
            log.topic_id = news.topic_id;
            log.behavior = sample_behavior(rng, out.affinity(u, topic_idx), cfg.affinity_sharpness);
            ds.logs.push_back(std::move(log));
        }
    }
    return out;
}

}  // namespace gbban
