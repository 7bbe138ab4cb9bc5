#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>

#include "cotpress/backend.hpp"
#include "cotpress/config.hpp"

namespace cotpress {

// ============================================================================
// Stage orchestration with per-stage checkpoints and resume
// ============================================================================
// Every stage writes JSONL records in canonical order (sorted sample_id, then
// chunk_index, then candidate_index) through a single ordered writer, so a
// run, a rerun, and a kill/resume all produce byte-identical files.

struct StageCounts {
    int64_t ok = 0;
    int64_t failed = 0;  // per-sample failures recorded, run continued
};

struct PipelineOptions {
    bool resume = true;
    bool mock_backends = false;    // force in-process mock generator and scorer
    std::ostream* log = nullptr;   // progress/summary lines; nullptr = quiet
    ChatBackend* chat_override = nullptr;  // test injection, non-owning
    Scorer* scorer_override = nullptr;
    SleepFn sleep = {};            // injectable backoff sleep
};

class Pipeline {
public:
    Pipeline(PipelineConfig cfg, PipelineOptions opts);

    StageCounts segment();
    StageCounts compress();
    StageCounts search();
    StageCounts filter_emit();
    StageCounts eval();
    // The five stages in order over shared checkpoints; throws on the first
    // hard failure with the stage name in the message.
    StageCounts run_all();

    // Stage artifact locations (inside cfg.paths.workdir unless noted).
    std::filesystem::path chunks_path() const;
    std::filesystem::path candidates_path() const;
    std::filesystem::path gen_failed_path() const;
    std::filesystem::path compressed_path() const;
    std::filesystem::path search_failed_path() const;
    std::filesystem::path filter_report_path() const;
    std::filesystem::path dataset_path() const;  // cfg.paths.output
    std::filesystem::path eval_report_path() const;
    std::filesystem::path eval_samples_csv_path() const;
    std::filesystem::path loss_curves_csv_path() const;

    const PipelineConfig& config() const { return cfg_; }

private:
    ChatBackend& chat_backend();
    Scorer& scorer();
    std::vector<Sample> load_input_sorted() const;
    void log_line(const std::string& s) const;

    PipelineConfig cfg_;
    PipelineOptions opts_;
    std::unique_ptr<ChatBackend> owned_chat_;
    std::unique_ptr<Scorer> owned_scorer_;
};

}  // namespace cotpress
