#pragma once

#include <chrono>
#include <functional>
#include <string>

#include <json.hpp>

namespace cotpress {

// ============================================================================
// HTTP backend plumbing shared by the generator and the remote scorer
// ============================================================================

struct HttpEndpoint {
    std::string base;  // scheme://host[:port]
    std::string path;  // /v1/...
};

// Splits "http://host:8000/v1/x" into base and path. Throws ConfigError on
// anything that is not an http(s) URL with a non-empty host.
HttpEndpoint parse_endpoint(const std::string& url);

// Exponential backoff schedule: 1s, 2s, 4s, ... capped at 30s.
std::chrono::milliseconds backoff_delay(int attempt);

// Injectable sleep so tests can record the schedule instead of waiting.
using SleepFn = std::function<void(std::chrono::milliseconds)>;
void default_sleep(std::chrono::milliseconds d);

// Backends read the bearer token from this environment variable, never from
// config files. Empty/unset means no Authorization header.
constexpr const char* kApiKeyEnvVar = "OPENAI_API_KEY";
std::string api_key_from_env();

// One-shot POST of a JSON body; returns the parsed JSON response. Throws
// TransportError on connect/timeout, non-2xx status, or non-JSON body.
nlohmann::json post_json(const HttpEndpoint& ep, const nlohmann::json& body,
                         std::chrono::milliseconds timeout, const std::string& api_key);

// ----------------------------------------------------------------------------
// Chat-completion backend (the candidate generator's pi_phi handle)
// ----------------------------------------------------------------------------

class ChatBackend {
public:
    virtual ~ChatBackend() = default;

    // Single sampled completion for a user prompt. No internal retry; the
    // caller owns the retry/fallback policy. Throws TransportError.
    virtual std::string complete(const std::string& prompt, double temperature,
                                 int max_tokens) = 0;
};

// POST {model, messages:[{role:"user", content: prompt}], temperature,
// max_tokens}; reads the first choice's message content.
class HttpChatBackend final : public ChatBackend {
public:
    HttpChatBackend(const std::string& endpoint_url, std::string model,
                    std::chrono::milliseconds timeout);

    std::string complete(const std::string& prompt, double temperature, int max_tokens) override;

private:
    HttpEndpoint ep_;
    std::string model_;
    std::chrono::milliseconds timeout_;
    std::string api_key_;
};

// Deterministic in-process stand-in for CI runs (--mock-backends). Recovers
// the chunk payload from the compression prompt and "compresses" it by a
// fixed rule: parenthesized asides are removed and leftover space runs are
// squeezed. Identical input yields identical output on every call. A payload
// containing "[[backend-down]]" raises a TransportError instead, for
// deterministic fault injection.
class MockChatBackend final : public ChatBackend {
public:
    std::string complete(const std::string& prompt, double temperature, int max_tokens) override;

    // The compression rule itself, exposed so tests can compute expectations.
    static std::string mock_compress(const std::string& chunk_text);

    static constexpr const char* kFaultMarker = "[[backend-down]]";
};

// Runs fn(0..n-1) on up to max_concurrency worker threads. The first thrown
// exception is rethrown on the caller thread after all workers finish.
void parallel_for(size_t n, int max_concurrency, const std::function<void(size_t)>& fn);

}  // namespace cotpress
