#ifndef GBBAN_INGEST_HPP
#define GBBAN_INGEST_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "gbban/types.hpp"

namespace gbban {

// --- TSV parsing -----------------------------------------------------------
//
// All four datasets are UTF-8 TSV, one record per line, no header.
//   behavior logs : user_id \t timestamp \t news_id \t topic_id \t behavior
//   user profiles : user_id \t cat1_ids \t cat2_ids \t tag_ids
//   news index    : news_id \t topic_id \t content \t cat1_id \t cat2_id \t poster_id \t tag_ids
//   topic index   : topic_id \t title \t cat1_id \t cat2_id \t tag_ids
// Multi-id fields are comma-separated; content/title are space-separated
// token lists. News tag lists are padded to exactly 9 with the null tag.

std::vector<BehaviorLog> parse_behavior_logs(const std::string& path);
std::vector<UserProfile> parse_user_profiles(const std::string& path);
std::vector<NewsRecord> parse_news_index(const std::string& path);
std::vector<TopicRecord> parse_topic_index(const std::string& path);

void write_behavior_logs(const std::string& path, const std::vector<BehaviorLog>& logs);
void write_user_profiles(const std::string& path, const std::vector<UserProfile>& users);
void write_news_index(const std::string& path, const std::vector<NewsRecord>& news);
void write_topic_index(const std::string& path, const std::vector<TopicRecord>& topics);

// --- Synthetic data --------------------------------------------------------

struct SynthConfig {
    int n_users = 100;
    int n_news = 50;
    int n_topics = 10;
    int n_tags = 40;
    int n_cat1 = 5;
    int n_cat2 = 10;
    int n_posters = 25;
    int logs_per_user = 10;
    double affinity_sharpness = 6.0;
    std::uint64_t seed = 0;
};

struct SynthData {
    Dataset data;
    // latent per-user topic affinity in [0,1], max-normalized to 1 per user;
    // exposed so tests can check the planted preference structure
    Eigen::MatrixXd affinity;  // n_users x n_topics
};

// Deterministic generator with planted preferences: each user strongly
// prefers two topics; impressions are biased toward preferred topics and the
// behavior rank rises stochastically with the user's affinity for the
// news topic (unclick most likely at zero affinity, share at max).
SynthData generate_synthetic(const SynthConfig& cfg);

}  // namespace gbban

#endif
