#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cotpress/scorer.hpp"
#include "cotpress/util.hpp"

namespace cotpress {

// ============================================================================
// Evaluation statistics: reflections, coherence, lengths
// ============================================================================

struct ReflectionConfig {
    // Lowercase keywords matched case-insensitively as whole words.
    std::vector<std::string> keywords = {"wait", "alternatively", "emm", "hmm"};
};

// Whole-word, case-insensitive occurrence count over all keywords. Word
// boundaries are transitions between word characters (letters/digits) and
// anything else, so "Wait," and "hmm..." count while "waiting" does not.
int64_t count_reflections(std::string_view text, const ReflectionConfig& cfg);

struct LengthStats {
    std::optional<double> avg_len;        // absent over an empty corpus
    std::optional<double> avg_valid_len;  // absent without flags or valid texts
    int64_t count = 0;
    int64_t valid_count = 0;
    LenUnit unit = LenUnit::words;
};

// Average lengths; the valid average is restricted to flagged-correct texts.
// Throws StructuralError when flags are present but misaligned.
LengthStats length_stats(const std::vector<std::string>& texts,
                         const std::optional<std::vector<bool>>& correct_flags, LenUnit unit);

// ----------------------------------------------------------------------------
// Token-level coherence
// ----------------------------------------------------------------------------

struct CoherenceItem {
    std::string sample_id;
    std::string context;
    std::string text;
};

struct CoherenceEntry {
    std::string sample_id;
    double mean_loss = 0.0;
    int64_t token_count = 0;
    std::vector<double> token_losses;
};

struct CoherenceReport {
    std::vector<CoherenceEntry> per_text;
    // Unweighted mean over per-text means (not token-weighted); absent when
    // nothing scored.
    std::optional<double> corpus_mean;
    std::vector<std::pair<std::string, std::string>> skipped;  // (sample_id, error)
};

CoherenceReport coherence_eval(const std::vector<CoherenceItem>& items, Scorer& scorer);

// Long-format CSV: sample_id,position,loss — one row per continuation token.
void write_loss_curves_csv(const CoherenceReport& report, const std::filesystem::path& out);

// ----------------------------------------------------------------------------
// Before/after compression report
// ----------------------------------------------------------------------------

struct SampleCompressionDelta {
    std::string sample_id;
    double ratio = 0.0;
    int64_t reflections_before = 0;
    int64_t reflections_after = 0;
};

struct CompressionReport {
    std::vector<SampleCompressionDelta> per_sample;  // ordered by sample_id
    double mean_ratio = 0.0;
    double mean_reflections_before = 0.0;
    double mean_reflections_after = 0.0;
};

// Pairs original and compressed texts by sample_id (key sets must match;
// mismatch is a StructuralError).
CompressionReport compression_report(const std::map<std::string, std::string>& original_by_id,
                                     const std::map<std::string, std::string>& compressed_by_id,
                                     LenUnit unit, const ReflectionConfig& reflection);

}  // namespace cotpress
