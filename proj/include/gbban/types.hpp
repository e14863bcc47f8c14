#ifndef GBBAN_TYPES_HPP
#define GBBAN_TYPES_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbban {

// The six interaction behaviors, ordered by positiveness.
enum class Behavior : int { Unclick = 0, Click, Like, Follow, Comment, Share };

inline constexpr int kNumBehaviors = 6;

// Reserved identifier used to pad news tag lists to exactly 9 entries.
// A null tag never becomes a graph node and embeds as the zero vector.
inline const std::string kNullTag = "__null__";

inline constexpr int kNewsTagCount = 9;

// rank on the linear 1..6 scale (unclick=1 ... share=6)
inline int behavior_rank(Behavior b) { return static_cast<int>(b) + 1; }

inline const std::array<std::string, kNumBehaviors>& behavior_names() {
    static const std::array<std::string, kNumBehaviors> names = {
        "unclick", "click", "like", "follow", "comment", "share"};
    return names;
}

inline const std::string& to_string(Behavior b) { return behavior_names()[static_cast<int>(b)]; }

inline Behavior behavior_from_string(const std::string& token) {
    const auto& names = behavior_names();
    for (int i = 0; i < kNumBehaviors; ++i)
        if (names[i] == token) return static_cast<Behavior>(i);
    throw std::invalid_argument("unknown behavior '" + token + "'");
}

struct BehaviorLog {
    std::string user_id;
    std::int64_t timestamp = 0;  // seconds since epoch, > 0
    std::string news_id;
    std::string topic_id;
    Behavior behavior = Behavior::Unclick;

    bool operator==(const BehaviorLog&) const = default;
};

struct UserProfile {
    std::string user_id;
    std::vector<std::string> cat1_ids;
    std::vector<std::string> cat2_ids;
    std::vector<std::string> tag_ids;

    bool operator==(const UserProfile&) const = default;
};

struct NewsRecord {
    std::string news_id;
    std::string topic_id;
    std::vector<std::string> content;  // whitespace-pre-tokenized, non-empty
    std::string cat1_id;
    std::string cat2_id;
    std::string poster_id;
    std::vector<std::string> tag_ids;  // exactly 9 after null-tag padding

    bool operator==(const NewsRecord&) const = default;
};

struct TopicRecord {
    std::string topic_id;
    std::vector<std::string> title;
    std::string cat1_id;
    std::string cat2_id;
    std::vector<std::string> tag_ids;

    bool operator==(const TopicRecord&) const = default;
};

// The four datasets of one experiment, always handled together.
struct Dataset {
    std::vector<BehaviorLog> logs;
    std::vector<UserProfile> users;
    std::vector<NewsRecord> news;
    std::vector<TopicRecord> topics;
};

}  // namespace gbban

#endif
