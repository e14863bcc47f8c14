// gbban: pipeline driver for the interactive-news behavior prediction stack.
//
// Subcommands mirror the pipeline stages and write their artifacts into the
// run directory; each stage appends a manifest line (stage, seed, digests).
//
//   gbban synth --config desk.cfg --seed 1
//   gbban build-graph ... concentration ... walks ... embed ... train ... evaluate ... predict
//
// Any config key can be overridden on the command line: --key value.
// Exit codes: 0 ok, 1 usage/config error, 2 missing upstream artifact.

#include <CLI11.hpp>
#include <iostream>

#include "gbban/config.hpp"
#include "gbban/pipeline.hpp"

namespace {

struct StageSpec {
    std::string name;
    std::string description;
    bool seed_required;
    std::function<void(const gbban::RunConfig&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"G-BBAN interactive-news recommendation pipeline"};
    app.require_subcommand(1);

    const std::vector<StageSpec> stages = {
        {"synth", "generate a deterministic synthetic dataset", false, gbban::run_synth},
        {"build-graph", "build the interaction behavior graph", false, gbban::run_build_graph},
        {"concentration", "per-user core/coritivity concentration features", false,
         gbban::run_concentration},
        {"walks", "sample the random-walk corpus", true, gbban::run_walks},
        {"embed", "train node and word embeddings with skip-gram", true, gbban::run_embed},
        {"train", "train the behavior prediction model", true, gbban::run_train},
        {"evaluate", "compute AUC, precision and the confusion matrix", false,
         [](const gbban::RunConfig& cfg) {
             gbban::EvalReport r = gbban::run_evaluate(cfg);
             std::cout << "auc=" << r.auc << " precision=" << r.precision
                       << " n_test=" << r.n_test << '\n';
         }},
        {"predict", "write per-sample behavior probabilities", false, gbban::run_predict},
    };

    struct SubState {
        CLI::App* cmd = nullptr;
        std::string config_path;
        std::vector<std::pair<std::string, std::string>> overrides;
        const StageSpec* spec = nullptr;
    };
    std::vector<SubState> subs(stages.size());

    for (std::size_t i = 0; i < stages.size(); ++i) {
        SubState& st = subs[i];
        st.spec = &stages[i];
        st.cmd = app.add_subcommand(stages[i].name, stages[i].description);
        st.cmd->add_option("--config", st.config_path, "key = value config file");
        for (const auto& key : gbban::RunConfig::keys()) {
            auto* opt = st.cmd->add_option_function<std::string>(
                "--" + key,
                [&st, key](const std::string& value) { st.overrides.emplace_back(key, value); },
                "override config key '" + key + "'");
            if (key == "seed" && stages[i].seed_required) opt->required();
        }
    }

    CLI11_PARSE(app, argc, argv);

    for (const SubState& st : subs) {
        if (!st.cmd->parsed()) continue;
        try {
            gbban::RunConfig cfg;
            if (!st.config_path.empty()) cfg = gbban::load_config(st.config_path);
            gbban::apply_overrides(cfg, st.overrides);
            st.spec->run(cfg);
        } catch (const gbban::StageError& e) {
            std::cerr << st.spec->name << ": " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            std::cerr << st.spec->name << ": " << e.what() << '\n';
            return 1;
        }
        return 0;
    }
    return 1;
}
