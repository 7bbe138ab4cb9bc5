#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cotpress/chunker.hpp"
#include "cotpress/search.hpp"

namespace cotpress {

// ============================================================================
// Corpus ingestion, filter strategy, SFT emission
// ============================================================================

struct Sample {
    std::string sample_id;
    std::string problem;
    std::string solution;
    std::map<std::string, std::string> source_meta;
};

// JSONL of {id, problem, solution} (+ optional string-valued meta object).
// Order-preserving; malformed lines and duplicate ids are errors naming the
// line number.
std::vector<Sample> load_samples(const std::filesystem::path& path);

struct RatioBounds {
    double min_ratio = 0.2;
    double max_ratio = 0.95;
};

enum class RejectReason {
    chunk_cap,
    generation_failed,
    no_valid_answer,   // original or compressed lacks an extractable answer
    answer_mismatch,   // both extractable but different
    ratio,
};

std::string to_string(RejectReason r);

struct Verdict {
    std::string sample_id;
    std::optional<RejectReason> reject;  // nullopt = kept
    std::string detail;
};

struct FilterReport {
    int64_t loaded = 0;
    int64_t after_chunk_cap = 0;
    int64_t generation_failed = 0;  // count of failures, not survivors
    int64_t after_generation = 0;
    int64_t after_valid_answer = 0;
    int64_t after_same_answer = 0;
    int64_t after_ratio = 0;
    int64_t emitted = 0;
    std::vector<Verdict> verdicts;  // one per loaded sample, ordered by sample_id
};

// ----------------------------------------------------------------------------
// Individual filter stages (each pure over its inputs)
// ----------------------------------------------------------------------------

struct ChunkCapResult {
    std::vector<Sample> kept;
    std::vector<std::pair<Sample, int64_t>> rejected;  // with offending chunk count
};

ChunkCapResult filter_chunk_cap(const std::vector<Sample>& samples, const SegmentationConfig& cfg,
                                int64_t max_chunks = 30);

struct AnswerFilterResult {
    std::vector<CompressedSample> kept;
    std::vector<std::pair<CompressedSample, RejectReason>> rejected;
};

// Kept iff the original solution has an extractable answer, the compressed
// CoT has one too, and the two match.
AnswerFilterResult filter_answers(
    const std::vector<CompressedSample>& compressed,
    const std::unordered_map<std::string, std::string>& original_solution_by_id);

struct RatioFilterResult {
    std::vector<CompressedSample> kept;
    std::vector<CompressedSample> rejected;
};

RatioFilterResult filter_ratio(const std::vector<CompressedSample>& compressed,
                               const RatioBounds& bounds);

// ----------------------------------------------------------------------------
// SFT emission
// ----------------------------------------------------------------------------

// Writes JSONL of {instruction, output, meta:{sample_id, ratio, m}} ordered by
// sample_id; byte-stable across runs. The instruction wraps the problem in
// the math template unless template_by_id maps the sample to "gpqa". Returns
// the number of lines written.
int64_t emit_sft(const std::vector<CompressedSample>& kept, const std::filesystem::path& out_path,
                 const std::unordered_map<std::string, std::string>& template_by_id = {});

// ----------------------------------------------------------------------------
// Full filter pipeline
// ----------------------------------------------------------------------------

struct FilterOutcome {
    std::vector<CompressedSample> kept;  // ordered by sample_id
    FilterReport report;
};

// Applies the fixed stage order: chunk cap, generation failures, valid
// answer, same answer, ratio. Each rejected sample carries exactly the first
// failing stage as its reason.
FilterOutcome run_filter_pipeline(
    const std::vector<Sample>& samples, const SegmentationConfig& seg_cfg, int64_t max_chunks,
    const std::unordered_map<std::string, CompressedSample>& compressed_by_id,
    const std::unordered_map<std::string, std::string>& failed_by_id, const RatioBounds& bounds);

}  // namespace cotpress
