#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cotpress/pipeline.hpp"

namespace {

// Exit codes: 0 success, 1 generic error, 2 invalid config, 3 backend
// unreachable (no sample succeeded), 4 partial per-sample failure.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfigInvalid = 2;
constexpr int kExitBackendUnreachable = 3;
constexpr int kExitPartialFailure = 4;

struct CommonArgs {
    std::string config_path;
    bool resume = true;
    bool mock_backends = false;
    std::optional<uint64_t> seed;
    std::optional<std::string> strategy;
    std::optional<double> alpha;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "pipeline config JSON")->required();
    cmd->add_flag("--resume,!--no-resume", args.resume,
                  "reuse stage checkpoints from a previous run (default on)");
    cmd->add_flag("--mock-backends", args.mock_backends,
                  "use the in-process mock generator and scorer");
    cmd->add_option("--seed", args.seed, "override search.random_seed");
    cmd->add_option("--strategy", args.strategy, "override search strategy")
        ->check(CLI::IsMember({"greedy", "random"}));
    cmd->add_option("--alpha", args.alpha, "override search.alpha")
        ->check(CLI::Range(0.0, 1.0));
}

int exit_code_for(const cotpress::StageCounts& counts, bool backend_stage) {
    if (counts.failed == 0) return kExitOk;
    if (backend_stage && counts.ok == 0) return kExitBackendUnreachable;
    return kExitPartialFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cotpress: chunk-level compression of long reasoning traces"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* cmd_segment = app.add_subcommand("segment", "segment solutions into chunks");
    CLI::App* cmd_compress = app.add_subcommand("compress", "generate compressed chunk candidates");
    CLI::App* cmd_search = app.add_subcommand("search", "select candidates by likelihood search");
    CLI::App* cmd_filter = app.add_subcommand("filter-emit", "apply filters and emit the dataset");
    CLI::App* cmd_eval = app.add_subcommand("eval", "reflection/coherence/length reports");
    CLI::App* cmd_run = app.add_subcommand("run", "all stages in order");
    for (CLI::App* cmd : {cmd_segment, cmd_compress, cmd_search, cmd_filter, cmd_eval, cmd_run}) {
        add_common_options(cmd, args);
    }

    CLI11_PARSE(app, argc, argv);

    cotpress::PipelineConfig cfg;
    try {
        cfg = cotpress::load_pipeline_config(args.config_path);
    } catch (const cotpress::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    if (args.seed) cfg.search.random_seed = *args.seed;
    if (args.alpha) cfg.search.alpha = *args.alpha;
    if (args.strategy) {
        cfg.search.strategy = *args.strategy == "random"
                                  ? cotpress::SearchConfig::Strategy::random
                                  : cotpress::SearchConfig::Strategy::greedy_likelihood;
    }

    cotpress::PipelineOptions opts;
    opts.resume = args.resume;
    opts.mock_backends = args.mock_backends;
    opts.log = &std::cout;

    try {
        cotpress::Pipeline pipeline(std::move(cfg), opts);
        cotpress::StageCounts counts;
        bool backend_stage = false;
        if (app.got_subcommand(cmd_segment)) {
            counts = pipeline.segment();
        } else if (app.got_subcommand(cmd_compress)) {
            counts = pipeline.compress();
            backend_stage = true;
        } else if (app.got_subcommand(cmd_search)) {
            counts = pipeline.search();
            backend_stage = true;
        } else if (app.got_subcommand(cmd_filter)) {
            counts = pipeline.filter_emit();
        } else if (app.got_subcommand(cmd_eval)) {
            counts = pipeline.eval();
        } else {
            counts = pipeline.run_all();
            backend_stage = true;
        }
        return exit_code_for(counts, backend_stage);
    } catch (const cotpress::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigInvalid;
    } catch (const cotpress::TransportError& e) {
        std::cerr << "backend error: " << e.what() << '\n';
        return kExitBackendUnreachable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}
