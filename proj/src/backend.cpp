#include "cotpress/backend.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <httplib.h>

#include "cotpress/generator.hpp"
#include "cotpress/util.hpp"

namespace cotpress {

HttpEndpoint parse_endpoint(const std::string& url) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint must be an http(s) URL: '" + url + "'");
    }
    std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ConfigError("endpoint scheme must be http or https: '" + url + "'");
    }
    size_t host_start = scheme_end + 3;
    size_t path_start = url.find('/', host_start);
    HttpEndpoint ep;
    if (path_start == std::string::npos) {
        ep.base = url;
        ep.path = "/";
    } else {
        ep.base = url.substr(0, path_start);
        ep.path = url.substr(path_start);
    }
    if (ep.base.size() <= host_start) {
        throw ConfigError("endpoint has no host: '" + url + "'");
    }
    return ep;
}

std::chrono::milliseconds backoff_delay(int attempt) {
    constexpr int64_t base_ms = 1000;
    constexpr int64_t cap_ms = 30000;
    int64_t ms = attempt >= 6 ? cap_ms : base_ms << attempt;
    return std::chrono::milliseconds(std::min(ms, cap_ms));
}

void default_sleep(std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
}

std::string api_key_from_env() {
    const char* v = std::getenv(kApiKeyEnvVar);
    return v ? std::string(v) : std::string();
}

nlohmann::json post_json(const HttpEndpoint& ep, const nlohmann::json& body,
                         std::chrono::milliseconds timeout, const std::string& api_key) {
    httplib::Client cli(ep.base);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    cli.set_connection_timeout(secs.count() > 0 ? secs.count() : 1, 0);
    cli.set_read_timeout(secs.count() > 0 ? secs.count() : 1, 0);
    cli.set_write_timeout(secs.count() > 0 ? secs.count() : 1, 0);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    auto res = cli.Post(ep.path, headers, body.dump(), "application/json");
    if (!res) {
        throw TransportError("request to " + ep.base + ep.path +
                             " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("request to " + ep.base + ep.path + " returned HTTP " +
                             std::to_string(res->status));
    }
    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
        throw TransportError("response from " + ep.base + ep.path + " is not valid JSON");
    }
    return parsed;
}

// ----------------------------------------------------------------------------
// HttpChatBackend
// ----------------------------------------------------------------------------

HttpChatBackend::HttpChatBackend(const std::string& endpoint_url, std::string model,
                                 std::chrono::milliseconds timeout)
    : ep_(parse_endpoint(endpoint_url)),
      model_(std::move(model)),
      timeout_(timeout),
      api_key_(api_key_from_env()) {}

std::string HttpChatBackend::complete(const std::string& prompt, double temperature,
                                      int max_tokens) {
    nlohmann::json body = {
        {"model", model_},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", temperature},
        {"max_tokens", max_tokens},
    };
    nlohmann::json res = post_json(ep_, body, timeout_, api_key_);
    if (!res.contains("choices") || !res["choices"].is_array() || res["choices"].empty()) {
        throw TransportError("chat response has no choices");
    }
    const auto& msg = res["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") ||
        !msg["message"]["content"].is_string()) {
        throw TransportError("chat response choice has no message content");
    }
    return msg["message"]["content"].get<std::string>();
}

// ----------------------------------------------------------------------------
// MockChatBackend
// ----------------------------------------------------------------------------

std::string MockChatBackend::mock_compress(const std::string& chunk_text) {
    std::string out;
    out.reserve(chunk_text.size());
    int depth = 0;
    for (char c : chunk_text) {
        if (c == '(') {
            ++depth;
        } else if (c == ')' && depth > 0) {
            --depth;
        } else if (depth == 0) {
            out += c;
        }
    }
    // Squeeze the double spaces left where an aside was cut out.
    std::string squeezed;
    squeezed.reserve(out.size());
    for (char c : out) {
        if (c == ' ' && !squeezed.empty() && squeezed.back() == ' ') continue;
        squeezed += c;
    }
    return trim(squeezed);
}

std::string MockChatBackend::complete(const std::string& prompt, double, int) {
    std::string payload = extract_prompt_payload(prompt);
    if (payload.find(kFaultMarker) != std::string::npos) {
        throw TransportError("mock backend down for this chunk");
    }
    return "<start> " + mock_compress(payload) + " <end>";
}

// ----------------------------------------------------------------------------
// parallel_for
// ----------------------------------------------------------------------------

void parallel_for(size_t n, int max_concurrency, const std::function<void(size_t)>& fn) {
    if (n == 0) return;
    size_t workers = std::min<size_t>(n, std::max(1, max_concurrency));
    if (workers == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cotpress
