#ifndef GBBAN_CONFIG_HPP
#define GBBAN_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace gbban {

// Every pipeline knob with its documented default. Loaded from a
// line-oriented `key = value` file; unknown keys are rejected.
struct RunConfig {
    std::string run_dir = "run";
    std::uint64_t seed = 0;

    // dataset locations; empty means <run_dir>/<name>.tsv
    std::string logs_path, users_path, news_path, topics_path;

    // synthetic generator
    int synth_users = 100;
    int synth_news = 50;
    int synth_topics = 10;
    int synth_tags = 40;
    int synth_cat1 = 5;
    int synth_cat2 = 10;
    int synth_posters = 25;
    int synth_logs_per_user = 10;
    double synth_affinity_sharpness = 6.0;

    // MMAS coritivity
    int mmas_ants = 20;
    int mmas_iters = 50;
    double mmas_rho = 0.1;
    double mmas_tau_min = 0.1;
    double mmas_tau_max = 5.0;
    double mmas_alpha = 1.0;
    double mmas_beta = 1.0;

    // random walks
    std::string walk_strategy = "behavior_weighted";
    int walk_length = 20;
    int walks_per_node = 10;
    double node2vec_p = 1.0;
    double node2vec_q = 2.0;

    // skip-gram embedding
    int dim = 300;
    int window = 5;
    int sg_epochs = 5;
    double sg_lr = 0.025;

    // model
    int lstm_hidden = 50;
    int kernels = 50;
    int conv_width = 3;
    int content_len = 64;
    int fc_hidden = 64;
    int attn_dim = 0;
    int ensi_depth = 5;
    int history_len = 5;
    bool attention = true;
    bool gf = true;
    bool mr = true;

    // loss and optimizer
    double c1 = 0.1;
    double c2 = 0.01;
    int batch_size = 1200;
    double lr = 0.01;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int epochs = 5;

    static const std::vector<std::string>& keys();
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;
};

// `key = value` lines; blank lines and '#' comments ignored
RunConfig load_config(const std::string& path);
void apply_overrides(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace gbban

#endif
