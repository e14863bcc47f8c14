#include "gbban/config.hpp"

#include <functional>
#include <map>
#include <stdexcept>

#include "gbban/tsv.hpp"

namespace gbban {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("expected boolean, got '" + v + "'");
}

int parse_int(const std::string& v) { return static_cast<int>(parse_i64(v)); }

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define STR_FIELD(name) \
    {#name, Field{[](RunConfig& c, const std::string& v) { c.name = v; }, \
                  [](const RunConfig& c) { return c.name; }}}
#define INT_FIELD(name) \
    {#name, Field{[](RunConfig& c, const std::string& v) { c.name = parse_int(v); }, \
                  [](const RunConfig& c) { return std::to_string(c.name); }}}
#define DBL_FIELD(name) \
    {#name, Field{[](RunConfig& c, const std::string& v) { c.name = parse_double(v); }, \
                  [](const RunConfig& c) { return format_double(c.name); }}}
#define BOOL_FIELD(name) \
    {#name, Field{[](RunConfig& c, const std::string& v) { c.name = parse_bool(v); }, \
                  [](const RunConfig& c) { return std::string(c.name ? "true" : "false"); }}}

const std::map<std::string, Field>& registry() {
    static const std::map<std::string, Field> fields = {
        STR_FIELD(run_dir),
        {"seed", Field{[](RunConfig& c, const std::string& v) {
                           c.seed = static_cast<std::uint64_t>(parse_i64(v));
                       },
                       [](const RunConfig& c) { return std::to_string(c.seed); }}},
        STR_FIELD(logs_path),
        STR_FIELD(users_path),
        STR_FIELD(news_path),
        STR_FIELD(topics_path),
        INT_FIELD(synth_users),
        INT_FIELD(synth_news),
        INT_FIELD(synth_topics),
        INT_FIELD(synth_tags),
        INT_FIELD(synth_cat1),
        INT_FIELD(synth_cat2),
        INT_FIELD(synth_posters),
        INT_FIELD(synth_logs_per_user),
        DBL_FIELD(synth_affinity_sharpness),
        INT_FIELD(mmas_ants),
        INT_FIELD(mmas_iters),
        DBL_FIELD(mmas_rho),
        DBL_FIELD(mmas_tau_min),
        DBL_FIELD(mmas_tau_max),
        DBL_FIELD(mmas_alpha),
        DBL_FIELD(mmas_beta),
        STR_FIELD(walk_strategy),
        INT_FIELD(walk_length),
        INT_FIELD(walks_per_node),
        DBL_FIELD(node2vec_p),
        DBL_FIELD(node2vec_q),
        INT_FIELD(dim),
        INT_FIELD(window),
        INT_FIELD(sg_epochs),
        DBL_FIELD(sg_lr),
        INT_FIELD(lstm_hidden),
        INT_FIELD(kernels),
        INT_FIELD(conv_width),
        INT_FIELD(content_len),
        INT_FIELD(fc_hidden),
        INT_FIELD(attn_dim),
        INT_FIELD(ensi_depth),
        INT_FIELD(history_len),
        BOOL_FIELD(attention),
        BOOL_FIELD(gf),
        BOOL_FIELD(mr),
        DBL_FIELD(c1),
        DBL_FIELD(c2),
        INT_FIELD(batch_size),
        DBL_FIELD(lr),
        DBL_FIELD(adam_beta1),
        DBL_FIELD(adam_beta2),
        DBL_FIELD(adam_eps),
        INT_FIELD(epochs),
    };
    return fields;
}

#undef STR_FIELD
#undef INT_FIELD
#undef DBL_FIELD
#undef BOOL_FIELD

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [k, f] : registry()) out.push_back(k);
        return out;
    }();
    return names;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = registry().find(key);
    if (it == registry().end()) throw std::runtime_error("unknown config key '" + key + "'");
    try {
        it->second.set(*this, value);
    } catch (const std::exception& e) {
        throw std::runtime_error("config key '" + key + "': " + e.what());
    }
}

std::string RunConfig::get(const std::string& key) const {
    auto it = registry().find(key);
    if (it == registry().end()) throw std::runtime_error("unknown config key '" + key + "'");
    return it->second.get(*this);
}

RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    std::size_t lineno = 0;
    for (const auto& raw : read_lines(path)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     " is not 'key = value'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv) {
    for (const auto& [k, v] : kv) cfg.set(k, v);
}

}  // namespace gbban
