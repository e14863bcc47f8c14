#ifndef GBBAN_MODEL_HPP
#define GBBAN_MODEL_HPP

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gbban/checkpoint.hpp"
#include "gbban/graph.hpp"
#include "gbban/layers.hpp"
#include "gbban/skipgram.hpp"
#include "gbban/types.hpp"

namespace gbban {

struct ModelConfig {
    int dim = 300;         // embedding dimension d (word and node space share it)
    int lstm_hidden = 50;  // d_h
    int kernels = 50;      // convolution filters per layer
    int conv_width = 3;
    int content_len = 64;  // M_b: word columns per news
    int fc_hidden = 64;
    int attn_dim = 0;      // 0 -> lstm_hidden
    int ensi_depth = 5;    // n environmental news channels
    int history_len = 5;   // prior news per sample
    bool use_attention = true;
    bool use_gf = true;    // concentration feature

    int channels() const { return ensi_depth + 1; }
    int news_cols() const { return content_len + kNewsTagCount + 2; }
    int attention_dim() const { return attn_dim > 0 ? attn_dim : lstm_hidden; }
    int user_rep_dim() const { return lstm_hidden + 2; }
};

// All trainable blocks of G-BBAN.
struct ModelParams {
    ModelConfig cfg;
    Parameter word_map_M;    // d x d
    Parameter word_map_d;    // d x 1
    Parameter conv_filters;  // K x (channels * d * width)
    Parameter conv_bias;     // K x 1
    LstmParams lstm;         // input K, hidden d_h
    AttentionParams attention;
    Parameter fc1_W, fc1_b;  // fc_hidden x (d_h + 2 + K)
    Parameter fc2_W, fc2_b;  // 6 x fc_hidden

    static ModelParams init(const ModelConfig& cfg, std::uint64_t seed);

    std::vector<Parameter*> all();
    std::vector<const Parameter*> all() const;
    void zero_grads();
};

Checkpoint to_checkpoint(const ModelParams& params);
ModelParams params_from_checkpoint(const Checkpoint& ckpt);

// --- news inputs -------------------------------------------------------------

// Raw per-news input: word-embedding columns (pre mapping) and the fixed
// node-embedding columns (9 tags then cat1, cat2; null tags are zero).
struct NewsRawInput {
    Eigen::MatrixXd words;  // d x M_b, zero-padded / truncated
    Eigen::MatrixXd fixed;  // d x 11
};

// Caches the raw input of every news record once; unknown content words map
// to zero columns, unresolvable tag or category nodes are an error.
class FeatureBank {
public:
    FeatureBank(const std::vector<NewsRecord>& news, const EmbeddingTable& word_table,
                const EmbeddingTable& node_table, const ModelConfig& cfg);
    const NewsRawInput& raw(const std::string& news_id) const;

private:
    std::unordered_map<std::string, NewsRawInput> cache_;
};

NewsRawInput build_news_raw(const NewsRecord& news, const EmbeddingTable& word_table,
                            const EmbeddingTable& node_table, const ModelConfig& cfg);

// column-wise g(w) = tanh(M w + d)
Eigen::MatrixXd word_space_map(const Eigen::MatrixXd& words, const ModelParams& params);

// Full news embedding matrix [g(words), tags, cats], d x (M_b + 11).
Eigen::MatrixXd build_news_input(const NewsRecord& news, const EmbeddingTable& word_table,
                                 const EmbeddingTable& node_table, const ModelParams& params);

// G-CNN: channel c scaled by 1/(1+c), multi-channel convolution, ReLU,
// max-over-time pooling. Channel count must match the filter block.
Eigen::VectorXd news_representation(const std::vector<Eigen::MatrixXd>& channels,
                                    const ModelParams& params);

// LSTM over the history representations; additive attention with the
// candidate as query (or the last hidden state when disabled); the
// normalized concentration pair fills the final two entries (zero when GF
// is disabled).
Eigen::VectorXd user_representation(const std::vector<Eigen::VectorXd>& history_reps,
                                    const Eigen::VectorXd& candidate_rep,
                                    const Eigen::Vector2d& concentration,
                                    const ModelParams& params);

// concat(user_rep, news_rep) -> FC1 tanh -> FC2 -> softmax over the six behaviors
Eigen::VectorXd predict_probs(const Eigen::VectorXd& user_rep, const Eigen::VectorXd& news_rep,
                              const ModelParams& params);

// --- loss ---------------------------------------------------------------------

struct LossConfig {
    double c1 = 0.1;   // maximum-interval regularity weight
    double c2 = 0.01;  // manifold regularity weight
    Eigen::VectorXd class_weights;  // six alphas summing to 6

    LossConfig() : class_weights(Eigen::VectorXd::Ones(kNumBehaviors)) {}
};

// Composite loss on softmax outputs: weighted cross entropy, hinge-style
// maximum-interval term, and the Laplacian quadratic form tr(F L F^T) with
// L = D - W. dpreds, when given, is accumulated with d(loss)/d(preds).
double batch_loss(const Eigen::MatrixXd& preds, const std::vector<int>& labels,
                  const Eigen::MatrixXd& W, const LossConfig& cfg, Eigen::MatrixXd* dpreds);

// Binary intra-batch candidate similarity: 1 when two candidates share a
// topic, any (real) tag, or the primary category; zero diagonal.
Eigen::MatrixXd batch_similarity(const std::vector<int>& candidate_nodes, const BehaviorGraph& g);

// --- end-to-end sample path ------------------------------------------------------

// One training sample resolved to feature space. Channel lists have exactly
// cfg.channels() entries; a null entry is a zero channel (environment
// shorter than n).
struct SampleFeatures {
    std::vector<const NewsRawInput*> candidate;
    std::vector<std::vector<const NewsRawInput*>> history;  // history_len stacks
    Eigen::Vector2d concentration = Eigen::Vector2d::Zero();
};

struct BatchResult {
    double loss = 0.0;
    Eigen::MatrixXd preds;  // 6 x B softmax outputs
};

// Forward (and optionally backward) over a mini-batch under the composite
// loss. Gradients accumulate into params; callers zero beforehand.
BatchResult model_batch(ModelParams& params, const std::vector<SampleFeatures>& batch,
                        const std::vector<int>& labels, const Eigen::MatrixXd& W,
                        const LossConfig& loss_cfg, bool backward);

// forward-only convenience for one sample
Eigen::VectorXd predict_sample(const ModelParams& params, const SampleFeatures& features);

}  // namespace gbban

#endif
