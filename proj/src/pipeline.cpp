#include "gbban/pipeline.hpp"

#include <filesystem>
#include <json.hpp>

#include "gbban/coritivity.hpp"
#include "gbban/digest.hpp"
#include "gbban/ingest.hpp"
#include "gbban/rng.hpp"
#include "gbban/tsv.hpp"
#include "gbban/walks.hpp"

namespace fs = std::filesystem;

namespace gbban {

RunPaths RunPaths::from(const RunConfig& cfg) {
    RunPaths p;
    p.dir = cfg.run_dir;
    auto at = [&](const char* name) { return (fs::path(cfg.run_dir) / name).string(); };
    p.logs = cfg.logs_path.empty() ? at("logs.tsv") : cfg.logs_path;
    p.users = cfg.users_path.empty() ? at("users.tsv") : cfg.users_path;
    p.news = cfg.news_path.empty() ? at("news.tsv") : cfg.news_path;
    p.topics = cfg.topics_path.empty() ? at("topics.tsv") : cfg.topics_path;
    p.graph_nodes = at("graph_nodes.tsv");
    p.graph_edges = at("graph_edges.tsv");
    p.concentration = at("concentration.tsv");
    p.walks = at("walks.txt");
    p.node_embeddings = at("node_embeddings.tsv");
    p.word_embeddings = at("word_embeddings.tsv");
    p.checkpoint = at("model.ckpt");
    p.loss_curve = at("loss_curve.tsv");
    p.metrics = at("metrics.json");
    p.confusion = at("confusion.tsv");
    p.predictions = at("predictions.tsv");
    p.manifest = at("manifest.tsv");
    return p;
}

namespace {

void require_artifact(const std::string& path, const std::string& producing_stage) {
    if (!fs::exists(path))
        throw StageError(producing_stage, "missing artifact '" + path + "'; run `" +
                                              producing_stage + "` first");
}

void append_manifest(const RunPaths& paths, const std::string& stage, std::uint64_t seed,
                     const std::vector<std::string>& inputs) {
    fs::create_directories(paths.dir);
    std::ofstream out(paths.manifest, std::ios::app);
    out << stage << '\t' << seed << '\t';
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (i) out << ';';
        out << fs::path(inputs[i]).filename().string() << '=' << file_digest(inputs[i]);
    }
    out << '\n';
}

Dataset load_dataset(const RunPaths& paths) {
    require_artifact(paths.logs, "synth");
    require_artifact(paths.users, "synth");
    require_artifact(paths.news, "synth");
    require_artifact(paths.topics, "synth");
    Dataset ds;
    ds.logs = parse_behavior_logs(paths.logs);
    ds.users = parse_user_profiles(paths.users);
    ds.news = parse_news_index(paths.news);
    ds.topics = parse_topic_index(paths.topics);
    return ds;
}

ModelConfig model_config(const RunConfig& cfg) {
    ModelConfig mc;
    mc.dim = cfg.dim;
    mc.lstm_hidden = cfg.lstm_hidden;
    mc.kernels = cfg.kernels;
    mc.conv_width = cfg.conv_width;
    mc.content_len = cfg.content_len;
    mc.fc_hidden = cfg.fc_hidden;
    mc.attn_dim = cfg.attn_dim;
    mc.ensi_depth = cfg.ensi_depth;
    mc.history_len = cfg.history_len;
    mc.use_attention = cfg.attention;
    mc.use_gf = cfg.gf;
    return mc;
}

std::unordered_map<std::string, Eigen::Vector2d> load_concentration(const std::string& path) {
    std::unordered_map<std::string, Eigen::Vector2d> out;
    for (const auto& line : read_lines(path)) {
        auto f = split(line, '\t');
        if (f.size() != 5) throw std::runtime_error(path + ": malformed concentration line");
        out[f[0]] = Eigen::Vector2d(parse_double(f[3]), parse_double(f[4]));
    }
    return out;
}

// everything evaluate/predict/train share
struct LoadedRun {
    Dataset ds;
    BehaviorGraph graph;
    EmbeddingTable node_emb, word_emb;
    std::unordered_map<std::string, Eigen::Vector2d> concentration;
    TriggerIndex triggers;

    LoadedRun(const RunPaths& paths, bool need_gf)
        : ds(load_dataset(paths)), triggers(ds.logs) {
        require_graph(paths);
        graph = load_graph(paths.graph_nodes, paths.graph_edges);
        require_artifact(paths.node_embeddings, "embed");
        require_artifact(paths.word_embeddings, "embed");
        node_emb = load_embeddings(paths.node_embeddings);
        word_emb = load_embeddings(paths.word_embeddings);
        if (need_gf) {
            require_artifact(paths.concentration, "concentration");
            concentration = load_concentration(paths.concentration);
        }
    }

    static void require_graph(const RunPaths& paths) {
        require_artifact(paths.graph_nodes, "build-graph");
        require_artifact(paths.graph_edges, "build-graph");
    }
};

}  // namespace

void run_synth(const RunConfig& cfg) {
    SynthConfig sc;
    sc.n_users = cfg.synth_users;
    sc.n_news = cfg.synth_news;
    sc.n_topics = cfg.synth_topics;
    sc.n_tags = cfg.synth_tags;
    sc.n_cat1 = cfg.synth_cat1;
    sc.n_cat2 = cfg.synth_cat2;
    sc.n_posters = cfg.synth_posters;
    sc.logs_per_user = cfg.synth_logs_per_user;
    sc.affinity_sharpness = cfg.synth_affinity_sharpness;
    sc.seed = cfg.seed;

    RunPaths paths = RunPaths::from(cfg);
    fs::create_directories(paths.dir);
    SynthData data = generate_synthetic(sc);
    write_behavior_logs(paths.logs, data.data.logs);
    write_user_profiles(paths.users, data.data.users);
    write_news_index(paths.news, data.data.news);
    write_topic_index(paths.topics, data.data.topics);
    append_manifest(paths, "synth", cfg.seed, {paths.logs, paths.users, paths.news, paths.topics});
}

void run_build_graph(const RunConfig& cfg) {
    RunPaths paths = RunPaths::from(cfg);
    Dataset ds = load_dataset(paths);
    BehaviorGraph g = build_graph(ds);
    save_graph(g, paths.graph_nodes, paths.graph_edges);
    append_manifest(paths, "build-graph", cfg.seed, {paths.graph_nodes, paths.graph_edges});
}

void run_concentration(const RunConfig& cfg) {
    RunPaths paths = RunPaths::from(cfg);
    LoadedRun::require_graph(paths);
    BehaviorGraph g = load_graph(paths.graph_nodes, paths.graph_edges);

    auto out = open_output(paths.concentration);
    for (const auto& node : g.nodes()) {
        if (node.kind != NodeKind::User) continue;
        if (g.degree(node.index) == 0) continue;  // no ego graph to measure
        MmasParams mp;
        mp.n_ants = cfg.mmas_ants;
        mp.max_iters = cfg.mmas_iters;
        mp.rho = cfg.mmas_rho;
        mp.tau_min = cfg.mmas_tau_min;
        mp.tau_max = cfg.mmas_tau_max;
        mp.alpha = cfg.mmas_alpha;
        mp.beta = cfg.mmas_beta;
        mp.seed = derive_seed(cfg.seed, "concentration", static_cast<std::uint64_t>(node.index));
        ConcentrationFeature feat = concentration_feature(g, node, mp);
        out << node.id << '\t' << feat.core_size << '\t' << feat.coritivity << '\t'
            << format_double(feat.norm_core) << '\t' << format_double(feat.norm_h) << '\n';
    }
    out.close();
    append_manifest(paths, "concentration", cfg.seed, {paths.concentration});
}

void run_walks(const RunConfig& cfg) {
    RunPaths paths = RunPaths::from(cfg);
    LoadedRun::require_graph(paths);
    BehaviorGraph g = load_graph(paths.graph_nodes, paths.graph_edges);

    WalkConfig wc;
    wc.strategy = walk_strategy_from_string(cfg.walk_strategy);
    wc.p = cfg.node2vec_p;
    wc.q = cfg.node2vec_q;
    wc.walk_length = cfg.walk_length;
    wc.walks_per_node = cfg.walks_per_node;
    wc.seed = cfg.seed;
    save_walks(paths.walks, sample_walks(g, wc));
    append_manifest(paths, "walks", cfg.seed, {paths.walks});
}

void run_embed(const RunConfig& cfg) {
    RunPaths paths = RunPaths::from(cfg);
    require_artifact(paths.walks, "walks");
    LoadedRun::require_graph(paths);
    require_artifact(paths.news, "synth");

    BehaviorGraph g = load_graph(paths.graph_nodes, paths.graph_edges);
    auto walks = load_walks(paths.walks);

    Corpus node_corpus;
    node_corpus.reserve(walks.size());
    for (const auto& walk : walks) {
        std::vector<std::string> sentence;
        sentence.reserve(walk.size());
        for (int v : walk) sentence.push_back(g.node(v).key());
        node_corpus.push_back(std::move(sentence));
    }
    SkipGramConfig sg;
    sg.dim = cfg.dim;
    sg.window = cfg.window;
    sg.epochs = cfg.sg_epochs;
    sg.lr = cfg.sg_lr;
    sg.seed = derive_seed(cfg.seed, "embed-nodes");
    save_embeddings(paths.node_embeddings, train_skipgram(node_corpus, sg).table);

    Corpus word_corpus;
    for (const auto& rec : parse_news_index(paths.news)) word_corpus.push_back(rec.content);
    sg.seed = derive_seed(cfg.seed, "embed-words");
    save_embeddings(paths.word_embeddings, train_skipgram(word_corpus, sg).table);

    append_manifest(paths, "embed", cfg.seed, {paths.node_embeddings, paths.word_embeddings});
}

void run_train(const RunConfig& cfg) {
    RunPaths paths = RunPaths::from(cfg);
    ModelConfig mc = model_config(cfg);
    LoadedRun run(paths, mc.use_gf);

    auto samples = build_samples(run.ds.logs, cfg.history_len);
    auto train_set = split_by_last_day(samples).first;
    if (train_set.empty()) throw std::runtime_error("no training samples before the last day");

    FeatureBank bank(run.ds.news, run.word_emb, run.node_emb, mc);
    SampleFeaturizer featurizer(run.graph, bank, run.triggers, run.concentration, mc);

    TrainOptions opts;
    opts.opt.batch_size = cfg.batch_size;
    opts.opt.lr = cfg.lr;
    opts.opt.beta1 = cfg.adam_beta1;
    opts.opt.beta2 = cfg.adam_beta2;
    opts.opt.eps = cfg.adam_eps;
    opts.opt.epochs = cfg.epochs;
    opts.opt.seed = cfg.seed;
    opts.c1 = cfg.c1;
    opts.c2 = cfg.c2;
    opts.manifold = cfg.mr;

    TrainResult result = train(mc, train_set, featurizer, opts);

    Checkpoint ckpt = to_checkpoint(result.params);
    ckpt.meta["seed"] = std::to_string(cfg.seed);
    ckpt.meta["walk_strategy"] = cfg.walk_strategy;
    ckpt.meta["mr"] = cfg.mr ? "1" : "0";
    save_checkpoint(paths.checkpoint, ckpt);

    auto curve = open_output(paths.loss_curve);
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
        curve << e << '\t' << format_double(result.epoch_loss[e]) << '\n';
    curve.close();
    append_manifest(paths, "train", cfg.seed, {paths.checkpoint, paths.loss_curve});
}

EvalReport run_evaluate(const RunConfig& cfg) {
    RunPaths paths = RunPaths::from(cfg);
    require_artifact(paths.checkpoint, "train");
    // dims and flags come from the checkpoint, not the config
    ModelParams params = params_from_checkpoint(load_checkpoint(paths.checkpoint));
    LoadedRun run(paths, params.cfg.use_gf);

    auto samples = build_samples(run.ds.logs, params.cfg.history_len);
    auto test_set = split_by_last_day(samples).second;
    if (test_set.empty()) throw std::runtime_error("no test samples on the last day");

    FeatureBank bank(run.ds.news, run.word_emb, run.node_emb, params.cfg);
    SampleFeaturizer featurizer(run.graph, bank, run.triggers, run.concentration, params.cfg);
    EvalReport report = evaluate(params, test_set, featurizer);

    nlohmann::json j;
    j["auc"] = report.auc;
    j["precision"] = report.precision;
    j["n_test"] = report.n_test;
    j["warning_no_positive_predictions"] = report.precision_warning;
    auto metrics = open_output(paths.metrics);
    metrics << j.dump() << '\n';
    metrics.close();

    auto conf = open_output(paths.confusion);
    conf << "true\\pred";
    for (int c = 0; c < kNumBehaviors; ++c) conf << '\t' << behavior_names()[c];
    conf << '\n';
    for (int r = 0; r < kNumBehaviors; ++r) {
        conf << behavior_names()[r];
        for (int c = 0; c < kNumBehaviors; ++c) conf << '\t' << report.confusion(r, c);
        conf << '\n';
    }
    conf.close();
    append_manifest(paths, "evaluate", cfg.seed, {paths.metrics, paths.confusion});
    return report;
}

void run_predict(const RunConfig& cfg) {
    RunPaths paths = RunPaths::from(cfg);
    require_artifact(paths.checkpoint, "train");
    ModelParams params = params_from_checkpoint(load_checkpoint(paths.checkpoint));
    LoadedRun run(paths, params.cfg.use_gf);

    auto samples = build_samples(run.ds.logs, params.cfg.history_len);
    auto test_set = split_by_last_day(samples).second;

    FeatureBank bank(run.ds.news, run.word_emb, run.node_emb, params.cfg);
    SampleFeaturizer featurizer(run.graph, bank, run.triggers, run.concentration, params.cfg);

    auto out = open_output(paths.predictions);
    for (const auto& s : test_set) {
        Eigen::VectorXd probs = predict_sample(params, featurizer.features(s));
        out << s.user_id << '\t' << s.candidate;
        for (int c = 0; c < kNumBehaviors; ++c) out << '\t' << format_double(probs[c]);
        out << '\n';
    }
    out.close();
    append_manifest(paths, "predict", cfg.seed, {paths.predictions});
}

}  // namespace gbban
