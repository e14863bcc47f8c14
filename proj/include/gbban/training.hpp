#ifndef GBBAN_TRAINING_HPP
#define GBBAN_TRAINING_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gbban/graph.hpp"
#include "gbban/model.hpp"
#include "gbban/types.hpp"

namespace gbban {

struct TrainingSample {
    std::string user_id;
    std::vector<std::string> history;  // exactly history_len news ids, time order
    std::string candidate;
    Behavior label = Behavior::Unclick;
    std::int64_t as_of = 0;  // timestamp of the candidate event
};

// Sliding window per user: every event with >= history_len prior triggered
// news yields one sample. Output ordered by (user_id, as_of).
std::vector<TrainingSample> build_samples(const std::vector<BehaviorLog>& logs,
                                          int history_len = 5);

// temporal split: samples whose as_of falls on the last active day are test
std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>> split_by_last_day(
    const std::vector<TrainingSample>& samples, std::int64_t day_seconds = 86400);

// --- featurization -----------------------------------------------------------

// Resolves samples to model inputs: news tensors with ENSI channels and the
// per-user normalized concentration pair.
class SampleFeaturizer {
public:
    SampleFeaturizer(const BehaviorGraph& graph, const FeatureBank& bank,
                     const TriggerIndex& triggers,
                     std::unordered_map<std::string, Eigen::Vector2d> concentration,
                     const ModelConfig& cfg);

    SampleFeatures features(const TrainingSample& s) const;
    int candidate_node(const TrainingSample& s) const;
    const BehaviorGraph& graph() const { return graph_; }

private:
    std::vector<const NewsRawInput*> stack(const std::string& news_id, std::int64_t as_of) const;

    const BehaviorGraph& graph_;
    const FeatureBank& bank_;
    const TriggerIndex& triggers_;
    std::unordered_map<std::string, Eigen::Vector2d> concentration_;
    ModelConfig cfg_;
};

// --- optimization --------------------------------------------------------------

struct OptimizerConfig {
    int batch_size = 1200;
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int epochs = 5;
    std::uint64_t seed = 0;
};

class Adam {
public:
    Adam(ModelParams& params, const OptimizerConfig& cfg);
    void step();  // consumes accumulated grads

private:
    ModelParams& params_;
    OptimizerConfig cfg_;
    std::vector<Eigen::MatrixXd> m_, v_;
    std::int64_t t_ = 0;
};

// inverse class frequency over the sample labels, renormalized to sum 6;
// zero-count classes are smoothed to count 1
Eigen::VectorXd inverse_frequency_weights(const std::vector<TrainingSample>& samples);

struct TrainResult {
    ModelParams params;
    std::vector<double> epoch_loss;  // mean per-sample loss per epoch
};

struct TrainOptions {
    OptimizerConfig opt;
    double c1 = 0.1;
    double c2 = 0.01;
    bool manifold = true;             // c2 term active
    bool inverse_freq_weights = true; // otherwise uniform alphas
};

// Mini-batch Adam on the composite loss; per-epoch seeded shuffling;
// deterministic in the seed.
TrainResult train(const ModelConfig& model_cfg, const std::vector<TrainingSample>& samples,
                  const SampleFeaturizer& featurizer, const TrainOptions& opts);

// --- evaluation ------------------------------------------------------------------

// unclick is the negative class, everything else positive
bool binarize_positive(Behavior label);

// ranking score: 1 - p(unclick)
double positive_score(const Eigen::VectorXd& probs);

// Mann-Whitney pairwise AUC, ties counted 0.5. Needs both classes present.
double auc(const std::vector<double>& scores, const std::vector<bool>& positives);

struct PrecisionResult {
    double value = 0.0;
    bool no_positive_warning = false;  // set when nothing was predicted positive
};

// predicted positive iff the argmax class is not unclick
PrecisionResult precision(const std::vector<int>& predicted_classes,
                          const std::vector<int>& true_classes);

struct EvalReport {
    double auc = 0.0;
    double precision = 0.0;
    bool precision_warning = false;
    Eigen::Matrix<std::int64_t, kNumBehaviors, kNumBehaviors> confusion;  // row true, col predicted
    int n_test = 0;
};

EvalReport evaluate(const ModelParams& params, const std::vector<TrainingSample>& samples,
                    const SampleFeaturizer& featurizer);

}  // namespace gbban

#endif
