#pragma once

#include <filesystem>
#include <string>

#include "cotpress/chunker.hpp"
#include "cotpress/dataset.hpp"
#include "cotpress/generator.hpp"
#include "cotpress/metrics.hpp"
#include "cotpress/scorer.hpp"
#include "cotpress/search.hpp"

namespace cotpress {

// ============================================================================
// Pipeline configuration (single JSON file, validated at startup)
// ============================================================================

struct PipelinePaths {
    std::filesystem::path input;    // corpus JSONL
    std::filesystem::path workdir;  // stage checkpoints
    std::filesystem::path output;   // SFT dataset JSONL
};

struct PipelineConfig {
    SegmentationConfig segmentation;
    GeneratorConfig generator;
    ScorerConfig scorer;
    SearchConfig search;
    RatioBounds ratio_bounds;
    ReflectionConfig reflection;
    int64_t max_chunks = 30;
    PipelinePaths paths;
    int max_inflight_requests = 8;
};

// Parses and validates; errors name the offending JSON path
// ("generator.num_candidates: must be >= 1"). Unknown keys are errors too so
// typos cannot silently fall back to defaults.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Invariant checks shared by load and by tests that build configs directly.
void validate_config(const PipelineConfig& cfg);

}  // namespace cotpress
