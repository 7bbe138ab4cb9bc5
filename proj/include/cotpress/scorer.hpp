#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cotpress/util.hpp"

namespace cotpress {

// ============================================================================
// Continuation scoring under the reference model
// ============================================================================
// Used for both the inter-chunk greedy search and the token-level coherence
// metric. The chunk score is the SUM of token log-probs (the probability of
// the token sequence in log space); a length-normalized mean variant exists
// as a flag but length preference is already the alpha filter's job.

struct ScorerConfig {
    enum class Mode { remote, mock };
    Mode mode = Mode::mock;
    std::string endpoint;  // remote only
    std::string model_name;
    std::chrono::milliseconds timeout{60000};
    int max_retries = 2;
    int request_concurrency = 4;
    bool length_normalized = false;
};

struct ScoreResult {
    double total_logprob = 0.0;         // == -sum(token_losses)
    std::vector<double> token_losses;   // per-token negative log-likelihood
    int64_t token_count = 0;            // == token_losses.size()

    // Canonical constructor: derives the sum so the consistency invariant
    // holds by construction.
    static ScoreResult from_losses(std::vector<double> losses);
};

double mean_token_loss(const ScoreResult& r);

class Scorer {
public:
    virtual ~Scorer() = default;

    // Per-token losses of continuation given context. Throws
    // std::invalid_argument on empty continuation, ScoringError on backend
    // failure after retries.
    virtual ScoreResult score(const std::string& context, const std::string& continuation) = 0;
};

// ----------------------------------------------------------------------------
// Mock scorer (shipped, used by all search tests and --mock-backends runs).
//
// Tokenization: one token per unicode scalar value.
// Per-token loss: 1 + (fnv1a64(context) mod 7) / 100.
//
// Total logprob is strictly decreasing in continuation length, with
// context-sensitive tie-breaking tests can precompute by hand.
// ----------------------------------------------------------------------------
class MockScorer final : public Scorer {
public:
    ScoreResult score(const std::string& context, const std::string& continuation) override;

    static double token_loss_for_context(std::string_view context) {
        return 1.0 + static_cast<double>(fnv1a64(context) % 7) / 100.0;
    }
};

// ----------------------------------------------------------------------------
// Remote scorer: echo-style completion with per-token logprobs.
//
// POST {model, prompt: context+continuation, max_tokens: 0, echo: true,
// logprobs: true}; continuation tokens are those whose byte span extends past
// the end of the context, so a token straddling the junction counts as a
// continuation token.
// ----------------------------------------------------------------------------
class RemoteScorer final : public Scorer {
public:
    using SleepFn = std::function<void(std::chrono::milliseconds)>;

    explicit RemoteScorer(ScorerConfig cfg, SleepFn sleep = {});

    ScoreResult score(const std::string& context, const std::string& continuation) override;

private:
    ScorerConfig cfg_;
    SleepFn sleep_;
    std::string api_key_;
};

// ----------------------------------------------------------------------------
// Record/replay fixture: JSONL of {context_hash, continuation_hash,
// token_losses}, keyed by fnv1a64 of the exact strings. Lets CI exercise the
// remote code path with no live backend.
// ----------------------------------------------------------------------------
class ReplayFile {
public:
    struct Entry {
        uint64_t context_hash = 0;
        uint64_t continuation_hash = 0;
        std::vector<double> token_losses;
    };

    static ReplayFile load(const std::filesystem::path& p);
    void save(const std::filesystem::path& p) const;

    void add(std::string_view context, std::string_view continuation,
             std::vector<double> losses);
    const std::vector<double>* find(std::string_view context, std::string_view continuation) const;

private:
    std::vector<Entry> entries_;
};

class ReplayScorer final : public Scorer {
public:
    explicit ReplayScorer(ReplayFile file) : file_(std::move(file)) {}

    ScoreResult score(const std::string& context, const std::string& continuation) override;

private:
    ReplayFile file_;
};

// Wraps another scorer and tees every scoring into a ReplayFile.
class RecordingScorer final : public Scorer {
public:
    explicit RecordingScorer(Scorer& inner) : inner_(inner) {}

    ScoreResult score(const std::string& context, const std::string& continuation) override;

    const ReplayFile& recorded() const { return file_; }

private:
    Scorer& inner_;
    ReplayFile file_;
};

std::unique_ptr<Scorer> make_scorer(const ScorerConfig& cfg);

}  // namespace cotpress
