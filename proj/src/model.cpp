#include "gbban/model.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "gbban/rng.hpp"

namespace gbban {

namespace {

void glorot_init(Rng& rng, Eigen::MatrixXd& m) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-limit, limit);
}

bool is_bias(const Parameter& p) { return p.value.cols() == 1; }

}  // namespace

ModelParams ModelParams::init(const ModelConfig& cfg, std::uint64_t seed) {
    ModelParams p;
    p.cfg = cfg;
    const int d = cfg.dim, K = cfg.kernels, dh = cfg.lstm_hidden;
    p.word_map_M = Parameter("word_map.M", d, d);
    p.word_map_d = Parameter("word_map.d", d, 1);
    p.conv_filters = Parameter("conv.filters", K, cfg.channels() * d * cfg.conv_width);
    p.conv_bias = Parameter("conv.bias", K, 1);
    p.lstm = LstmParams("lstm", K, dh);
    p.attention = AttentionParams("attention", cfg.attention_dim(), K, dh);
    p.fc1_W = Parameter("fc1.W", cfg.fc_hidden, cfg.user_rep_dim() + K);
    p.fc1_b = Parameter("fc1.b", cfg.fc_hidden, 1);
    p.fc2_W = Parameter("fc2.W", kNumBehaviors, cfg.fc_hidden);
    p.fc2_b = Parameter("fc2.b", kNumBehaviors, 1);

    Rng rng(derive_seed(seed, "model-init"));
    for (Parameter* param : p.all())
        if (!is_bias(*param)) glorot_init(rng, param->value);
    return p;
}

std::vector<Parameter*> ModelParams::all() {
    std::vector<Parameter*> out = {&word_map_M, &word_map_d, &conv_filters, &conv_bias,
                                   &lstm.W,     &lstm.U,     &lstm.b};
    if (cfg.use_attention) {
        out.push_back(&attention.W1);
        out.push_back(&attention.W2);
        out.push_back(&attention.v);
    }
    out.push_back(&fc1_W);
    out.push_back(&fc1_b);
    out.push_back(&fc2_W);
    out.push_back(&fc2_b);
    return out;
}

std::vector<const Parameter*> ModelParams::all() const {
    auto mutable_all = const_cast<ModelParams*>(this)->all();
    return {mutable_all.begin(), mutable_all.end()};
}

void ModelParams::zero_grads() {
    for (Parameter* p : all()) p->zero_grad();
}

Checkpoint to_checkpoint(const ModelParams& params) {
    Checkpoint ckpt;
    const ModelConfig& c = params.cfg;
    ckpt.meta["dim"] = std::to_string(c.dim);
    ckpt.meta["lstm_hidden"] = std::to_string(c.lstm_hidden);
    ckpt.meta["kernels"] = std::to_string(c.kernels);
    ckpt.meta["conv_width"] = std::to_string(c.conv_width);
    ckpt.meta["content_len"] = std::to_string(c.content_len);
    ckpt.meta["fc_hidden"] = std::to_string(c.fc_hidden);
    ckpt.meta["attn_dim"] = std::to_string(c.attention_dim());
    ckpt.meta["ensi_depth"] = std::to_string(c.ensi_depth);
    ckpt.meta["history_len"] = std::to_string(c.history_len);
    ckpt.meta["use_attention"] = c.use_attention ? "1" : "0";
    ckpt.meta["use_gf"] = c.use_gf ? "1" : "0";
    for (const Parameter* p : params.all()) ckpt.tensors.emplace_back(p->name, p->value);
    return ckpt;
}

ModelParams params_from_checkpoint(const Checkpoint& ckpt) {
    auto meta_int = [&](const std::string& key) {
        auto it = ckpt.meta.find(key);
        if (it == ckpt.meta.end()) throw std::runtime_error("checkpoint missing meta '" + key + "'");
        return std::stoi(it->second);
    };
    ModelConfig cfg;
    cfg.dim = meta_int("dim");
    cfg.lstm_hidden = meta_int("lstm_hidden");
    cfg.kernels = meta_int("kernels");
    cfg.conv_width = meta_int("conv_width");
    cfg.content_len = meta_int("content_len");
    cfg.fc_hidden = meta_int("fc_hidden");
    cfg.attn_dim = meta_int("attn_dim");
    cfg.ensi_depth = meta_int("ensi_depth");
    cfg.history_len = meta_int("history_len");
    cfg.use_attention = meta_int("use_attention") != 0;
    cfg.use_gf = meta_int("use_gf") != 0;

    ModelParams params = ModelParams::init(cfg, 0);
    for (Parameter* p : params.all()) {
        const Eigen::MatrixXd& t = ckpt.tensor(p->name);
        if (t.rows() != p->value.rows() || t.cols() != p->value.cols())
            throw std::runtime_error("checkpoint tensor '" + p->name + "' has wrong shape");
        p->value = t;
    }
    return params;
}

NewsRawInput build_news_raw(const NewsRecord& news, const EmbeddingTable& word_table,
                            const EmbeddingTable& node_table, const ModelConfig& cfg) {
    if (word_table.dim() != cfg.dim || node_table.dim() != cfg.dim)
        throw std::invalid_argument("embedding dimension does not match model dim");
    NewsRawInput raw;
    raw.words = Eigen::MatrixXd::Zero(cfg.dim, cfg.content_len);
    const int n_words = std::min<int>(cfg.content_len, static_cast<int>(news.content.size()));
    for (int i = 0; i < n_words; ++i) {
        int idx = word_table.index_of(news.content[i]);
        if (idx >= 0) raw.words.col(i) = word_table.vectors.row(idx).transpose();
    }

    raw.fixed = Eigen::MatrixXd::Zero(cfg.dim, kNewsTagCount + 2);
    auto node_col = [&](NodeKind kind, const std::string& id) {
        int idx = node_table.index_of(to_string(kind) + ":" + id);
        if (idx < 0)
            throw std::runtime_error("no embedding for node '" + to_string(kind) + ":" + id + "'");
        return node_table.vectors.row(idx).transpose();
    };
    for (int t = 0; t < kNewsTagCount; ++t) {
        const std::string& tag = news.tag_ids.at(t);
        if (tag != kNullTag) raw.fixed.col(t) = node_col(NodeKind::Tag, tag);
    }
    raw.fixed.col(kNewsTagCount) = node_col(NodeKind::Cat1, news.cat1_id);
    raw.fixed.col(kNewsTagCount + 1) = node_col(NodeKind::Cat2, news.cat2_id);
    return raw;
}

FeatureBank::FeatureBank(const std::vector<NewsRecord>& news, const EmbeddingTable& word_table,
                         const EmbeddingTable& node_table, const ModelConfig& cfg) {
    for (const auto& rec : news) cache_.emplace(rec.news_id, build_news_raw(rec, word_table, node_table, cfg));
}

const NewsRawInput& FeatureBank::raw(const std::string& news_id) const {
    auto it = cache_.find(news_id);
    if (it == cache_.end()) throw std::out_of_range("unknown news '" + news_id + "'");
    return it->second;
}

Eigen::MatrixXd word_space_map(const Eigen::MatrixXd& words, const ModelParams& params) {
    if (words.rows() != params.word_map_M.value.cols())
        throw std::invalid_argument("word_space_map: shape mismatch");
    Eigen::MatrixXd out = params.word_map_M.value * words;
    out.colwise() += params.word_map_d.value.col(0);
    return out.array().tanh().matrix();
}

Eigen::MatrixXd build_news_input(const NewsRecord& news, const EmbeddingTable& word_table,
                                 const EmbeddingTable& node_table, const ModelParams& params) {
    NewsRawInput raw = build_news_raw(news, word_table, node_table, params.cfg);
    Eigen::MatrixXd out(params.cfg.dim, params.cfg.news_cols());
    out.leftCols(params.cfg.content_len) = word_space_map(raw.words, params);
    out.rightCols(kNewsTagCount + 2) = raw.fixed;
    return out;
}

namespace {

double channel_scale(int c) { return 1.0 / (1.0 + c); }

// --- per-news G-CNN pass ------------------------------------------------------

struct StackCache {
    std::vector<Eigen::MatrixXd> mapped;  // g-mapped word block per channel (empty if null)
    std::vector<const NewsRawInput*> raws;
    Conv1dCache conv;
    Eigen::MatrixXd pre;  // K x L
    PoolCache pool;
    Eigen::VectorXd rep;  // K
};

void stack_forward(const ModelParams& params, const std::vector<const NewsRawInput*>& raws,
                   StackCache& cache) {
    const ModelConfig& cfg = params.cfg;
    if (static_cast<int>(raws.size()) != cfg.channels())
        throw std::invalid_argument("news tensor channel count mismatch");
    const int L = cfg.news_cols();

    std::vector<Eigen::MatrixXd> channels(raws.size());
    cache.mapped.assign(raws.size(), Eigen::MatrixXd());
    cache.raws = raws;
    for (std::size_t c = 0; c < raws.size(); ++c) {
        if (!raws[c]) {
            channels[c] = Eigen::MatrixXd::Zero(cfg.dim, L);
            continue;
        }
        cache.mapped[c] = word_space_map(raws[c]->words, params);
        channels[c].resize(cfg.dim, L);
        channels[c].leftCols(cfg.content_len) = cache.mapped[c];
        channels[c].rightCols(kNewsTagCount + 2) = raws[c]->fixed;
        channels[c] *= channel_scale(static_cast<int>(c));
    }
    cache.pre = conv1d_forward(params.conv_filters.value, params.conv_bias.value.col(0), channels,
                               cfg.conv_width, &cache.conv);
    Eigen::MatrixXd act = cache.pre.cwiseMax(0.0);
    cache.rep = max_over_time_pool(act, &cache.pool);
}

void stack_backward(ModelParams& params, const StackCache& cache, const Eigen::VectorXd& drep) {
    const ModelConfig& cfg = params.cfg;
    Eigen::MatrixXd dact = Eigen::MatrixXd::Zero(cache.pre.rows(), cache.pre.cols());
    max_over_time_pool_backward(cache.pool, drep, dact);
    Eigen::MatrixXd dpre = (cache.pre.array() > 0.0).select(dact, 0.0);

    std::vector<Eigen::MatrixXd> dchannels(cache.raws.size(),
                                           Eigen::MatrixXd::Zero(cfg.dim, cfg.news_cols()));
    Eigen::VectorXd dbias = Eigen::VectorXd::Zero(cfg.kernels);
    conv1d_backward(params.conv_filters.value, cfg.conv_width, cache.conv, dpre,
                    params.conv_filters.grad, dbias, &dchannels);
    params.conv_bias.grad.col(0) += dbias;

    for (std::size_t c = 0; c < cache.raws.size(); ++c) {
        if (!cache.raws[c]) continue;
        const double scale = channel_scale(static_cast<int>(c));
        Eigen::MatrixXd dmapped = scale * dchannels[c].leftCols(cfg.content_len);
        Eigen::MatrixXd dpre_map =
            (dmapped.array() * (1.0 - cache.mapped[c].array().square())).matrix();
        params.word_map_M.grad.noalias() += dpre_map * cache.raws[c]->words.transpose();
        params.word_map_d.grad.col(0) += dpre_map.rowwise().sum();
    }
}

// --- full sample pass ------------------------------------------------------------

struct SampleCache {
    StackCache cand;
    std::vector<StackCache> hist;
    LstmCache lstm;
    AttentionCache attn;
    DenseCache fc1, fc2;
    Eigen::VectorXd probs;
};

Eigen::VectorXd sample_forward(const ModelParams& params, const SampleFeatures& features,
                               SampleCache& cache) {
    const ModelConfig& cfg = params.cfg;
    if (static_cast<int>(features.history.size()) != cfg.history_len)
        throw std::invalid_argument("sample must carry exactly " +
                                    std::to_string(cfg.history_len) + " history items");

    stack_forward(params, features.candidate, cache.cand);
    cache.hist.resize(features.history.size());
    Eigen::MatrixXd lstm_in(cfg.history_len, cfg.kernels);
    for (int t = 0; t < cfg.history_len; ++t) {
        stack_forward(params, features.history[t], cache.hist[t]);
        lstm_in.row(t) = cache.hist[t].rep;
    }

    Eigen::MatrixXd hidden = lstm_forward(params.lstm, lstm_in, &cache.lstm);
    Eigen::VectorXd context;
    if (cfg.use_attention)
        context = attention_forward(params.attention, cache.cand.rep, hidden, &cache.attn);
    else
        context = hidden.row(cfg.history_len - 1).transpose();

    Eigen::VectorXd user_rep(cfg.user_rep_dim());
    user_rep << context, (cfg.use_gf ? features.concentration : Eigen::Vector2d::Zero());

    Eigen::VectorXd z(user_rep.size() + cache.cand.rep.size());
    z << user_rep, cache.cand.rep;
    Eigen::VectorXd h1 = dense_forward(params.fc1_W.value, params.fc1_b.value.col(0), z,
                                       Activation::Tanh, &cache.fc1);
    Eigen::VectorXd logits = dense_forward(params.fc2_W.value, params.fc2_b.value.col(0), h1,
                                           Activation::None, &cache.fc2);
    cache.probs = softmax(logits);
    return cache.probs;
}

void sample_backward(ModelParams& params, const SampleCache& cache, const Eigen::VectorXd& dprobs) {
    const ModelConfig& cfg = params.cfg;
    Eigen::VectorXd dlogits = softmax_backward(cache.probs, dprobs);

    Eigen::VectorXd db2 = Eigen::VectorXd::Zero(kNumBehaviors);
    Eigen::VectorXd dh1 = Eigen::VectorXd::Zero(cfg.fc_hidden);
    dense_backward(params.fc2_W.value, Activation::None, cache.fc2, dlogits, params.fc2_W.grad,
                   db2, &dh1);
    params.fc2_b.grad.col(0) += db2;

    Eigen::VectorXd db1 = Eigen::VectorXd::Zero(cfg.fc_hidden);
    Eigen::VectorXd dz = Eigen::VectorXd::Zero(cfg.user_rep_dim() + cfg.kernels);
    dense_backward(params.fc1_W.value, Activation::Tanh, cache.fc1, dh1, params.fc1_W.grad, db1,
                   &dz);
    params.fc1_b.grad.col(0) += db1;

    Eigen::VectorXd dcontext = dz.head(cfg.lstm_hidden);
    Eigen::VectorXd dcand = dz.tail(cfg.kernels);

    Eigen::MatrixXd dhidden = Eigen::MatrixXd::Zero(cfg.history_len, cfg.lstm_hidden);
    if (cfg.use_attention) {
        Eigen::VectorXd dquery = Eigen::VectorXd::Zero(cfg.kernels);
        attention_backward(params.attention, cache.attn, dcontext, &dquery, &dhidden);
        dcand += dquery;
    } else {
        dhidden.row(cfg.history_len - 1) += dcontext.transpose();
    }

    Eigen::MatrixXd dlstm_in = Eigen::MatrixXd::Zero(cfg.history_len, cfg.kernels);
    lstm_backward(params.lstm, cache.lstm, dhidden, &dlstm_in);
    for (int t = 0; t < cfg.history_len; ++t)
        stack_backward(params, cache.hist[t], dlstm_in.row(t).transpose());
    stack_backward(params, cache.cand, dcand);
}

}  // namespace

Eigen::VectorXd news_representation(const std::vector<Eigen::MatrixXd>& channels,
                                    const ModelParams& params) {
    const ModelConfig& cfg = params.cfg;
    if (static_cast<int>(channels.size()) != cfg.channels())
        throw std::invalid_argument("news tensor channel count mismatch");
    std::vector<Eigen::MatrixXd> scaled(channels.size());
    for (std::size_t c = 0; c < channels.size(); ++c)
        scaled[c] = channel_scale(static_cast<int>(c)) * channels[c];
    Eigen::MatrixXd pre = conv1d_forward(params.conv_filters.value, params.conv_bias.value.col(0),
                                         scaled, cfg.conv_width, nullptr);
    return max_over_time_pool(pre.cwiseMax(0.0), nullptr);
}

Eigen::VectorXd user_representation(const std::vector<Eigen::VectorXd>& history_reps,
                                    const Eigen::VectorXd& candidate_rep,
                                    const Eigen::Vector2d& concentration,
                                    const ModelParams& params) {
    const ModelConfig& cfg = params.cfg;
    if (static_cast<int>(history_reps.size()) != cfg.history_len)
        throw std::invalid_argument("user_representation expects exactly " +
                                    std::to_string(cfg.history_len) + " history items");
    Eigen::MatrixXd lstm_in(cfg.history_len, cfg.kernels);
    for (int t = 0; t < cfg.history_len; ++t) lstm_in.row(t) = history_reps[t].transpose();
    Eigen::MatrixXd hidden = lstm_forward(params.lstm, lstm_in, nullptr);
    Eigen::VectorXd context;
    if (cfg.use_attention)
        context = attention_forward(params.attention, candidate_rep, hidden, nullptr);
    else
        context = hidden.row(cfg.history_len - 1).transpose();
    Eigen::VectorXd out(cfg.user_rep_dim());
    out << context, (cfg.use_gf ? concentration : Eigen::Vector2d::Zero());
    return out;
}

Eigen::VectorXd predict_probs(const Eigen::VectorXd& user_rep, const Eigen::VectorXd& news_rep,
                              const ModelParams& params) {
    Eigen::VectorXd z(user_rep.size() + news_rep.size());
    z << user_rep, news_rep;
    Eigen::VectorXd h1 = dense_forward(params.fc1_W.value, params.fc1_b.value.col(0), z,
                                       Activation::Tanh, nullptr);
    Eigen::VectorXd logits = dense_forward(params.fc2_W.value, params.fc2_b.value.col(0), h1,
                                           Activation::None, nullptr);
    return softmax(logits);
}

double batch_loss(const Eigen::MatrixXd& preds, const std::vector<int>& labels,
                  const Eigen::MatrixXd& W, const LossConfig& cfg, Eigen::MatrixXd* dpreds) {
    const Eigen::Index B = preds.cols();
    if (B < 1) throw std::invalid_argument("batch_loss: empty batch");
    if (static_cast<Eigen::Index>(labels.size()) != B)
        throw std::invalid_argument("batch_loss: label count mismatch");
    if (W.rows() != B || W.cols() != B) throw std::invalid_argument("batch_loss: W shape mismatch");
    if ((W - W.transpose()).cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("batch_loss: W must be symmetric");
    if (W.diagonal().cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("batch_loss: W must have zero diagonal");
    if (W.minCoeff() < 0.0) throw std::invalid_argument("batch_loss: W must be non-negative");
    if (cfg.class_weights.size() != kNumBehaviors ||
        std::abs(cfg.class_weights.sum() - kNumBehaviors) > 1e-6)
        throw std::invalid_argument("batch_loss: class weights must be six values summing to 6");

    double ce = 0.0, r1 = 0.0;
    for (Eigen::Index k = 0; k < B; ++k) {
        const int l = labels[k];
        if (l < 0 || l >= kNumBehaviors) throw std::invalid_argument("batch_loss: bad label");
        const double alpha = cfg.class_weights[l];
        const double p = preds(l, k);
        ce -= alpha * std::log(std::max(p, 1e-300));
        if (dpreds) (*dpreds)(l, k) -= alpha / std::max(p, 1e-300);

        // hinge on softmax outputs: max(0, 1 + max_{i != l} yhat_i - yhat_l)
        int rival = -1;
        for (int i = 0; i < kNumBehaviors; ++i) {
            if (i == l) continue;
            if (rival < 0 || preds(i, k) > preds(rival, k)) rival = i;
        }
        const double hinge = 1.0 + preds(rival, k) - preds(l, k);
        if (hinge > 0.0) {
            r1 += hinge;
            if (dpreds) {
                (*dpreds)(rival, k) += cfg.c1;
                (*dpreds)(l, k) -= cfg.c1;
            }
        }
    }

    // manifold regularity tr(F L F^T), L = D - W
    Eigen::MatrixXd laplacian = Eigen::MatrixXd(W.rowwise().sum().asDiagonal()) - W;
    Eigen::MatrixXd fl = preds * laplacian;  // 6 x B
    const double r2 = (fl.array() * preds.array()).sum();
    if (dpreds) *dpreds += cfg.c2 * 2.0 * fl;

    return ce + cfg.c1 * r1 + cfg.c2 * r2;
}

Eigen::MatrixXd batch_similarity(const std::vector<int>& candidate_nodes, const BehaviorGraph& g) {
    const int B = static_cast<int>(candidate_nodes.size());
    std::vector<std::set<int>> attrs(B);
    for (int k = 0; k < B; ++k) {
        for (const auto& nb : g.neighbors(candidate_nodes[k]))
            if (nb.label == EdgeLabel::NewsTopic || nb.label == EdgeLabel::NewsTag ||
                nb.label == EdgeLabel::NewsCat1)
                attrs[k].insert(nb.to);
    }
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(B, B);
    for (int k = 0; k < B; ++k)
        for (int j = k + 1; j < B; ++j) {
            bool shared = false;
            for (int a : attrs[k])
                if (attrs[j].count(a)) { shared = true; break; }
            if (shared) W(k, j) = W(j, k) = 1.0;
        }
    return W;
}

BatchResult model_batch(ModelParams& params, const std::vector<SampleFeatures>& batch,
                        const std::vector<int>& labels, const Eigen::MatrixXd& W,
                        const LossConfig& loss_cfg, bool backward) {
    const int B = static_cast<int>(batch.size());
    BatchResult result;
    result.preds.resize(kNumBehaviors, B);

    std::vector<SampleCache> caches(backward ? B : 1);
    for (int k = 0; k < B; ++k) {
        SampleCache& cache = caches[backward ? k : 0];
        result.preds.col(k) = sample_forward(params, batch[k], cache);
    }

    Eigen::MatrixXd dpreds;
    if (backward) dpreds = Eigen::MatrixXd::Zero(kNumBehaviors, B);
    result.loss = batch_loss(result.preds, labels, W, loss_cfg, backward ? &dpreds : nullptr);

    if (backward)
        for (int k = 0; k < B; ++k) sample_backward(params, caches[k], dpreds.col(k));
    return result;
}

Eigen::VectorXd predict_sample(const ModelParams& params, const SampleFeatures& features) {
    SampleCache cache;
    return sample_forward(params, features, cache);
}

}  // namespace gbban
