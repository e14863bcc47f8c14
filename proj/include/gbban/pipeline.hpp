#ifndef GBBAN_PIPELINE_HPP
#define GBBAN_PIPELINE_HPP

#include <stdexcept>
#include <string>

#include "gbban/config.hpp"
#include "gbban/training.hpp"

namespace gbban {

// Raised when a stage's upstream artifact is missing; `missing_stage` names
// the subcommand that produces it.
struct StageError : std::runtime_error {
    std::string missing_stage;
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(what), missing_stage(std::move(stage)) {}
};

// Resolved artifact locations of one run directory.
struct RunPaths {
    std::string dir;
    std::string logs, users, news, topics;
    std::string graph_nodes, graph_edges;
    std::string concentration;
    std::string walks;
    std::string node_embeddings, word_embeddings;
    std::string checkpoint, loss_curve;
    std::string metrics, confusion, predictions;
    std::string manifest;

    static RunPaths from(const RunConfig& cfg);
};

void run_synth(const RunConfig& cfg);
void run_build_graph(const RunConfig& cfg);
void run_concentration(const RunConfig& cfg);
void run_walks(const RunConfig& cfg);
void run_embed(const RunConfig& cfg);
void run_train(const RunConfig& cfg);
EvalReport run_evaluate(const RunConfig& cfg);
void run_predict(const RunConfig& cfg);

}  // namespace gbban

#endif
