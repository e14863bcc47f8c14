#include "gbban/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "gbban/rng.hpp"

namespace gbban {

std::vector<TrainingSample> build_samples(const std::vector<BehaviorLog>& logs, int history_len) {
    if (history_len < 1) throw std::invalid_argument("history_len must be >= 1");

    std::map<std::string, std::vector<const BehaviorLog*>> per_user;
    for (const auto& log : logs) per_user[log.user_id].push_back(&log);

    std::vector<TrainingSample> samples;
    for (auto& [user, events] : per_user) {
        std::stable_sort(events.begin(), events.end(),
                         [](const BehaviorLog* a, const BehaviorLog* b) {
                             return a->timestamp < b->timestamp;
                         });
        for (std::size_t j = history_len; j < events.size(); ++j) {
            TrainingSample s;
            s.user_id = user;
            for (std::size_t k = j - history_len; k < j; ++k)
                s.history.push_back(events[k]->news_id);
            s.candidate = events[j]->news_id;
            s.label = events[j]->behavior;
            s.as_of = events[j]->timestamp;
            samples.push_back(std::move(s));
        }
    }
    return samples;  // per_user map iteration gives (user_id, as_of) order
}

std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>> split_by_last_day(
    const std::vector<TrainingSample>& samples, std::int64_t day_seconds) {
    if (samples.empty()) return {};
    std::int64_t last_day = 0;
    for (const auto& s : samples) last_day = std::max(last_day, s.as_of / day_seconds);
    std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>> out;
    for (const auto& s : samples)
        (s.as_of / day_seconds == last_day ? out.second : out.first).push_back(s);
    return out;
}

SampleFeaturizer::SampleFeaturizer(const BehaviorGraph& graph, const FeatureBank& bank,
                                   const TriggerIndex& triggers,
                                   std::unordered_map<std::string, Eigen::Vector2d> concentration,
                                   const ModelConfig& cfg)
    : graph_(graph), bank_(bank), triggers_(triggers),
      concentration_(std::move(concentration)), cfg_(cfg) {}

std::vector<const NewsRawInput*> SampleFeaturizer::stack(const std::string& news_id,
                                                         std::int64_t as_of) const {
    std::vector<const NewsRawInput*> out(cfg_.channels(), nullptr);
    out[0] = &bank_.raw(news_id);
    if (cfg_.ensi_depth > 0) {
        int node = graph_.find(NodeKind::News, news_id);
        if (node < 0) throw std::runtime_error("news '" + news_id + "' not in graph");
        auto env = environmental_news(graph_, graph_.node(node), cfg_.ensi_depth, as_of, triggers_);
        for (std::size_t i = 0; i < env.size(); ++i) out[i + 1] = &bank_.raw(env[i].id);
    }
    return out;
}

SampleFeatures SampleFeaturizer::features(const TrainingSample& s) const {
    SampleFeatures f;
    f.candidate = stack(s.candidate, s.as_of);
    for (const auto& news_id : s.history) f.history.push_back(stack(news_id, s.as_of));
    if (cfg_.use_gf) {
        auto it = concentration_.find(s.user_id);
        if (it == concentration_.end())
            throw std::runtime_error("no concentration feature for user '" + s.user_id + "'");
        f.concentration = it->second;
    }
    return f;
}

int SampleFeaturizer::candidate_node(const TrainingSample& s) const {
    int node = graph_.find(NodeKind::News, s.candidate);
    if (node < 0) throw std::runtime_error("news '" + s.candidate + "' not in graph");
    return node;
}

Adam::Adam(ModelParams& params, const OptimizerConfig& cfg) : params_(params), cfg_(cfg) {
    for (Parameter* p : params_.all()) {
        m_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
        v_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    auto all = params_.all();
    for (std::size_t i = 0; i < all.size(); ++i) {
        Parameter& p = *all[i];
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * p.grad;
        v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * p.grad.cwiseProduct(p.grad);
        p.value.array() -= cfg_.lr * (m_[i].array() / bc1) /
                           ((v_[i].array() / bc2).sqrt() + cfg_.eps);
    }
}

Eigen::VectorXd inverse_frequency_weights(const std::vector<TrainingSample>& samples) {
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(kNumBehaviors);
    for (const auto& s : samples) counts[static_cast<int>(s.label)] += 1.0;
    Eigen::VectorXd inv(kNumBehaviors);
    for (int i = 0; i < kNumBehaviors; ++i) inv[i] = 1.0 / std::max(counts[i], 1.0);
    return inv * (kNumBehaviors / inv.sum());
}

TrainResult train(const ModelConfig& model_cfg, const std::vector<TrainingSample>& samples,
                  const SampleFeaturizer& featurizer, const TrainOptions& opts) {
    if (samples.empty()) throw std::invalid_argument("train: no samples");

    TrainResult result;
    result.params = ModelParams::init(model_cfg, opts.opt.seed);
    Adam adam(result.params, opts.opt);

    LossConfig loss_cfg;
    loss_cfg.c1 = opts.c1;
    loss_cfg.c2 = opts.manifold ? opts.c2 : 0.0;
    if (opts.inverse_freq_weights) loss_cfg.class_weights = inverse_frequency_weights(samples);

    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const int B = std::max(1, opts.opt.batch_size);
    for (int epoch = 0; epoch < opts.opt.epochs; ++epoch) {
        Rng rng(derive_seed(opts.opt.seed, "train-epoch", static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);

        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += B) {
            const std::size_t end = std::min(order.size(), begin + B);
            std::vector<SampleFeatures> batch;
            std::vector<int> labels;
            std::vector<int> cand_nodes;
            batch.reserve(end - begin);
            for (std::size_t i = begin; i < end; ++i) {
                const TrainingSample& s = samples[order[i]];
                batch.push_back(featurizer.features(s));
                labels.push_back(static_cast<int>(s.label));
                cand_nodes.push_back(featurizer.candidate_node(s));
            }
            Eigen::MatrixXd W = opts.manifold
                                    ? batch_similarity(cand_nodes, featurizer.graph())
                                    : Eigen::MatrixXd::Zero(batch.size(), batch.size());

            result.params.zero_grads();
            BatchResult br = model_batch(result.params, batch, labels, W, loss_cfg, true);
            adam.step();
            epoch_loss += br.loss;
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(samples.size()));
    }
    return result;
}

bool binarize_positive(Behavior label) { return label != Behavior::Unclick; }

double positive_score(const Eigen::VectorXd& probs) {
    if (probs.size() != kNumBehaviors) throw std::invalid_argument("need six probabilities");
    return 1.0 - probs[static_cast<int>(Behavior::Unclick)];
}

double auc(const std::vector<double>& scores, const std::vector<bool>& positives) {
    if (scores.size() != positives.size()) throw std::invalid_argument("auc: size mismatch");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (bool p : positives) n_pos += p;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("auc needs at least one positive and one negative");

    // rank-sum with average ranks on ties; all intermediate values are exact
    // half-integers, so this equals pairwise counting bit for bit
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (positives[idx[k]]) rank_sum_pos += avg_rank;
        i = j;
    }
    const double n_pos_d = static_cast<double>(n_pos);
    return (rank_sum_pos - n_pos_d * (n_pos_d + 1.0) / 2.0) /
           (n_pos_d * static_cast<double>(n_neg));
}

PrecisionResult precision(const std::vector<int>& predicted_classes,
                          const std::vector<int>& true_classes) {
    if (predicted_classes.size() != true_classes.size())
        throw std::invalid_argument("precision: size mismatch");
    const int unclick = static_cast<int>(Behavior::Unclick);
    std::int64_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < predicted_classes.size(); ++i) {
        if (predicted_classes[i] == unclick) continue;
        (true_classes[i] != unclick ? tp : fp) += 1;
    }
    PrecisionResult out;
    if (tp + fp == 0) {
        out.no_positive_warning = true;
        return out;
    }
    out.value = static_cast<double>(tp) / static_cast<double>(tp + fp);
    return out;
}

EvalReport evaluate(const ModelParams& params, const std::vector<TrainingSample>& samples,
                    const SampleFeaturizer& featurizer) {
    EvalReport report;
    report.confusion.setZero();
    report.n_test = static_cast<int>(samples.size());

    std::vector<double> scores;
    std::vector<bool> positives;
    std::vector<int> predicted, truth;
    for (const auto& s : samples) {
        Eigen::VectorXd probs = predict_sample(params, featurizer.features(s));
        int argmax = 0;
        probs.maxCoeff(&argmax);
        const int label = static_cast<int>(s.label);
        report.confusion(label, argmax) += 1;
        scores.push_back(positive_score(probs));
        positives.push_back(binarize_positive(s.label));
        predicted.push_back(argmax);
        truth.push_back(label);
    }
    report.auc = auc(scores, positives);
    PrecisionResult prec = precision(predicted, truth);
    report.precision = prec.value;
    report.precision_warning = prec.no_positive_warning;
    return report;
}

}  // namespace gbban
