#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cotpress/backend.hpp"
#include "cotpress/chunker.hpp"
#include "cotpress/util.hpp"

namespace cotpress {

// ============================================================================
// Inner-chunk compression: M sampled candidates per chunk
// ============================================================================

struct GeneratorConfig {
    std::string endpoint;
    std::string model_name;
    int num_candidates = 8;     // M
    double temperature = 0.75;
    int max_retries = 2;        // extra attempts per candidate slot
    int request_concurrency = 4;
    std::chrono::milliseconds timeout{60000};
    int max_tokens = 0;              // 0 = auto: 2x the chunk's token estimate (chars/3)
    LenUnit len_unit = LenUnit::words;  // candidate lengths use the segmentation unit
};

struct Candidate {
    int chunk_index = 0;
    int candidate_index = 0;          // j in [0, M)
    std::string text;                 // extracted compressed content
    std::string raw;                  // full backend response
    int64_t length = 0;               // in cfg.len_unit
    enum class Origin { generated, fallback_original };
    Origin origin = Origin::generated;
};

using CandidateSet = std::vector<Candidate>;

// The compression prompt with {step} replaced by the chunk text. The
// substitution happens once, at the template's own slot, even if the chunk
// itself contains "{step}". Throws std::invalid_argument on empty chunk text.
std::string build_compression_prompt(std::string_view chunk_text);

// Recovers the {step} payload from a prompt built by build_compression_prompt.
// Used by the mock backend; throws StructuralError if the prompt does not
// match the template.
std::string extract_prompt_payload(std::string_view prompt);

// Text strictly between the first "<start>" and the first subsequent "<end>",
// trimmed. nullopt = format error (caller retries, then falls back).
std::optional<std::string> extract_candidate(std::string_view raw);

// One candidate slot: a sampled call retried on transport or format failure
// with exponential backoff, then a fallback copy of the source chunk once
// retries are exhausted. `failure` reports why the fallback was taken.
struct SlotResult {
    Candidate candidate;
    enum class Failure { none, transport, format };
    Failure failure = Failure::none;
};

SlotResult generate_candidate_slot(const Chunk& chunk, int slot, const GeneratorConfig& cfg,
                                   ChatBackend& backend, const SleepFn& sleep = {});

// Exactly M candidates for one chunk, slots generated independently up to
// cfg.request_concurrency in flight. Throws GenerationError only when every
// slot failed at transport level (backend unreachable); the caller marks the
// sample failed and continues.
CandidateSet generate_candidates(const Chunk& chunk, const GeneratorConfig& cfg,
                                 ChatBackend& backend, const SleepFn& sleep = {});

}  // namespace cotpress
