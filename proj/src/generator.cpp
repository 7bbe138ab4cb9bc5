#include "cotpress/generator.hpp"

#include <atomic>

namespace cotpress {

namespace {

// Verbatim compression prompt; {step} marks the single substitution slot.
constexpr std::string_view kPromptTemplate =
    "Here is an reasoning piece excerpt from some math problem solving process "
    "(it is incomplete, but this doesn't matter.): {step}\n\n"
    "Instructions:\n"
    "You need to simplify the wording of given reasoning piece to get a concise reasoning piece.\n"
    "Notice:\n"
    "1. Avoid omitting any reasoning steps. You should keep all the reflection, analysing, "
    "checking steps and even steps making mistakes. (Especially steps contains word "
    "“wait”, “hmm”)\n"
    "2. Directly give me the simplified content without any additional words.\n"
    "3. Do not add additional steps or continue the reasoning process.\n"
    "4. Follow the format of given reasoning piece.\n"
    "Output format: <start> (simplified content) <end>";

constexpr std::string_view kSlot = "{step}";
constexpr std::string_view kStartTag = "<start>";
constexpr std::string_view kEndTag = "<end>";

// Everything in the template after the slot; anchors payload recovery.
std::string_view template_suffix() {
    size_t slot = kPromptTemplate.find(kSlot);
    return kPromptTemplate.substr(slot + kSlot.size());
}

int auto_max_tokens(std::string_view chunk_text) {
    int64_t chars = count_codepoints(chunk_text);
    int64_t est_tokens = (chars + 2) / 3;
    return static_cast<int>(std::max<int64_t>(1, 2 * est_tokens));
}

Candidate fallback_candidate(const Chunk& chunk, int slot, const GeneratorConfig& cfg,
                             std::string raw) {
    Candidate c;
    c.chunk_index = chunk.index;
    c.candidate_index = slot;
    c.text = std::string(chunk.core_text());
    c.raw = std::move(raw);
    c.length = unit_length(c.text, cfg.len_unit);
    c.origin = Candidate::Origin::fallback_original;
    return c;
}

}  // namespace

std::string build_compression_prompt(std::string_view chunk_text) {
    if (chunk_text.empty()) {
        throw std::invalid_argument("build_compression_prompt: chunk text must be non-empty");
    }
    size_t slot = kPromptTemplate.find(kSlot);
    std::string prompt;
    prompt.reserve(kPromptTemplate.size() + chunk_text.size());
    prompt.append(kPromptTemplate.substr(0, slot));
    prompt.append(chunk_text);
    prompt.append(kPromptTemplate.substr(slot + kSlot.size()));
    return prompt;
}

std::string extract_prompt_payload(std::string_view prompt) {
    size_t slot = kPromptTemplate.find(kSlot);
    std::string_view prefix = kPromptTemplate.substr(0, slot);
    std::string_view suffix = template_suffix();
    if (prompt.substr(0, prefix.size()) != prefix || prompt.size() < prefix.size() + suffix.size() ||
        prompt.substr(prompt.size() - suffix.size()) != suffix) {
        throw StructuralError("prompt does not match the compression template");
    }
    return std::string(prompt.substr(prefix.size(), prompt.size() - prefix.size() - suffix.size()));
}

std::optional<std::string> extract_candidate(std::string_view raw) {
    size_t start = raw.find(kStartTag);
    if (start == std::string_view::npos) return std::nullopt;
    size_t content_begin = start + kStartTag.size();
    size_t end = raw.find(kEndTag, content_begin);
    if (end == std::string_view::npos) return std::nullopt;
    return trim(raw.substr(content_begin, end - content_begin));
}

SlotResult generate_candidate_slot(const Chunk& chunk, int slot, const GeneratorConfig& cfg,
                                   ChatBackend& backend, const SleepFn& sleep) {
    const SleepFn& do_sleep = sleep ? sleep : SleepFn(default_sleep);
    std::string core(chunk.core_text());

    // A chunk with no usable core text cannot be prompted; the slot is a
    // fallback (possibly empty) and the search stage carries it through.
    if (trim_view(core).empty()) {
        return {fallback_candidate(chunk, slot, cfg, ""), SlotResult::Failure::none};
    }

    std::string prompt = build_compression_prompt(core);
    int max_tokens = cfg.max_tokens > 0 ? cfg.max_tokens : auto_max_tokens(core);

    std::string last_raw;
    auto failure = SlotResult::Failure::none;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) do_sleep(backoff_delay(attempt - 1));
        try {
            last_raw = backend.complete(prompt, cfg.temperature, max_tokens);
        } catch (const TransportError&) {
            failure = SlotResult::Failure::transport;
            continue;
        }
        // An empty extraction counts as a format failure: generated candidates
        // must carry text.
        if (auto text = extract_candidate(last_raw); text && !text->empty()) {
            Candidate c;
            c.chunk_index = chunk.index;
            c.candidate_index = slot;
            c.text = std::move(*text);
            c.raw = std::move(last_raw);
            c.length = unit_length(c.text, cfg.len_unit);
            c.origin = Candidate::Origin::generated;
            return {std::move(c), SlotResult::Failure::none};
        }
        failure = SlotResult::Failure::format;
    }
    return {fallback_candidate(chunk, slot, cfg, std::move(last_raw)), failure};
}

CandidateSet generate_candidates(const Chunk& chunk, const GeneratorConfig& cfg,
                                 ChatBackend& backend, const SleepFn& sleep) {
    if (cfg.num_candidates < 1) throw ConfigError("generator.num_candidates must be >= 1");
    const int m = cfg.num_candidates;
    CandidateSet out(m);
    std::vector<SlotResult::Failure> failures(m, SlotResult::Failure::none);
    parallel_for(static_cast<size_t>(m), cfg.request_concurrency, [&](size_t j) {
        SlotResult r = generate_candidate_slot(chunk, static_cast<int>(j), cfg, backend, sleep);
        failures[j] = r.failure;
        out[j] = std::move(r.candidate);
    });
    bool all_transport = m > 0;
    for (int j = 0; j < m; ++j) {
        if (failures[j] != SlotResult::Failure::transport) all_transport = false;
    }
    if (all_transport) {
        throw GenerationError("backend unreachable for all " + std::to_string(m) +
                              " candidate slots of chunk " + std::to_string(chunk.index));
    }
    return out;
}

}  // namespace cotpress
