#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cotpress/generator.hpp"
#include "cotpress/scorer.hpp"

namespace cotpress {

// ============================================================================
// Inter-chunk search: alpha length filter + greedy likelihood selection
// ============================================================================

struct SearchConfig {
    double alpha = 0.5;  // fraction of longest candidates discarded, in [0, 1)
    enum class Strategy { greedy_likelihood, random };
    Strategy strategy = Strategy::greedy_likelihood;
    uint64_t random_seed = 0;
    // Select by mean token logprob instead of the sum. Off by default: the
    // chunk score is the sequence probability, and length preference is
    // already the alpha filter's job.
    bool length_normalized = false;
    // Candidate scorings at one position may run concurrently; selection
    // across positions stays sequential (each step conditions on the last).
    int scoring_concurrency = 1;
};

struct Selection {
    int chunk_index = 0;
    int candidate_index = 0;
    std::string text;
    std::optional<ScoreResult> score;  // absent under the random strategy
};

struct CompressedSample {
    std::string sample_id;
    std::string problem;
    std::vector<Selection> selected;  // exactly one per chunk
    std::string compressed_cot;       // y*: trimmed selections joined with "\n\n"
    int64_t original_len = 0;         // in len_unit
    int64_t compressed_len = 0;
    double compression_ratio = 0.0;   // compressed_len / original_len (may exceed 1)
};

// How many candidates survive the alpha filter: max(1, ceil((1-alpha) * M)).
// The ceiling keeps at least the stated fraction; the floor guard prevents an
// empty filtered set.
size_t filter_keep_count(size_t m, double alpha);

// Keeps the filter_keep_count shortest candidates, ties broken by lowest
// candidate_index; output preserves candidate_index order.
CandidateSet length_filter(const CandidateSet& candidates, double alpha);

// Scoring context for position i: the problem verbatim, then the previously
// selected texts under the same join rule as y*. Empty prefix means the
// problem alone.
std::string selection_context(const std::string& problem,
                              const std::vector<std::string>& selected_texts);

// Argmax of score_continuation(context, candidate).total_logprob over the
// filtered set; ties go to the lowest candidate_index. Scoring failures
// propagate as ScoringError (the caller marks the sample failed).
std::pair<const Candidate*, ScoreResult> select_chunk(const std::string& problem,
                                                      const std::vector<std::string>& prefix,
                                                      const CandidateSet& filtered, Scorer& scorer,
                                                      bool length_normalized = false,
                                                      int scoring_concurrency = 1);

// Full per-sample search: filter then select left-to-right (greedy), or a
// seeded uniform draw from each filtered set (random baseline). The seed is
// mixed with the sample id so results do not depend on processing order.
CompressedSample compress_sample(const std::string& sample_id, const std::string& problem,
                                 const std::string& original_solution,
                                 const std::vector<CandidateSet>& candidate_sets,
                                 const SearchConfig& cfg, Scorer& scorer, LenUnit len_unit);

}  // namespace cotpress
