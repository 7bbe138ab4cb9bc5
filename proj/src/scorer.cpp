#include "cotpress/scorer.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "cotpress/backend.hpp"

namespace cotpress {

ScoreResult ScoreResult::from_losses(std::vector<double> losses) {
    ScoreResult r;
    double sum = 0.0;
    for (double l : losses) sum += l;
    r.total_logprob = -sum;
    r.token_count = static_cast<int64_t>(losses.size());
    r.token_losses = std::move(losses);
    return r;
}

double mean_token_loss(const ScoreResult& r) {
    if (r.token_count <= 0) throw StructuralError("mean_token_loss: empty ScoreResult");
    double sum = 0.0;
    for (double l : r.token_losses) sum += l;
    return sum / static_cast<double>(r.token_count);
}

// ----------------------------------------------------------------------------
// MockScorer
// ----------------------------------------------------------------------------

ScoreResult MockScorer::score(const std::string& context, const std::string& continuation) {
    if (continuation.empty()) {
        throw std::invalid_argument("score: continuation must be non-empty");
    }
    double loss = token_loss_for_context(context);
    int64_t tokens = count_codepoints(continuation);
    return ScoreResult::from_losses(std::vector<double>(static_cast<size_t>(tokens), loss));
}

// ----------------------------------------------------------------------------
// RemoteScorer
// ----------------------------------------------------------------------------

RemoteScorer::RemoteScorer(ScorerConfig cfg, SleepFn sleep)
    : cfg_(std::move(cfg)),
      sleep_(sleep ? std::move(sleep) : SleepFn(default_sleep)),
      api_key_(api_key_from_env()) {
    if (cfg_.endpoint.empty()) throw ConfigError("scorer.endpoint required in remote mode");
}

ScoreResult RemoteScorer::score(const std::string& context, const std::string& continuation) {
    if (continuation.empty()) {
        throw std::invalid_argument("score: continuation must be non-empty");
    }
    HttpEndpoint ep = parse_endpoint(cfg_.endpoint);
    nlohmann::json body = {
        {"model", cfg_.model_name},
        {"prompt", context + continuation},
        {"max_tokens", 0},
        {"echo", true},
        {"logprobs", true},
    };

    nlohmann::json res;
    std::string last_error;
    bool ok = false;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) sleep_(backoff_delay(attempt - 1));
        try {
            res = post_json(ep, body, cfg_.timeout, api_key_);
            ok = true;
            break;
        } catch (const TransportError& e) {
            last_error = e.what();
        }
    }
    if (!ok) throw ScoringError("scoring backend failed after retries: " + last_error);

    try {
        const auto& lp = res.at("choices").at(0).at("logprobs");
        const auto& tokens = lp.at("tokens");
        const auto& logprobs = lp.at("token_logprobs");
        const auto& offsets = lp.at("text_offset");
        size_t n = tokens.size();
        if (logprobs.size() != n || offsets.size() != n) {
            throw ScoringError("scoring response arrays disagree in length");
        }
        size_t context_len = context.size();
        std::vector<double> losses;
        for (size_t i = 0; i < n; ++i) {
            size_t begin = offsets.at(i).get<size_t>();
            size_t end = i + 1 < n ? offsets.at(i + 1).get<size_t>()
                                   : begin + tokens.at(i).get<std::string>().size();
            // A token straddling the junction counts as a continuation token.
            if (end <= context_len) continue;
            double lp_i = 0.0;  // null logprob (context-less first token)
            if (!logprobs.at(i).is_null()) lp_i = logprobs.at(i).get<double>();
            losses.push_back(std::max(0.0, -lp_i));
        }
        if (losses.empty()) {
            throw ScoringError("scoring response has no continuation tokens");
        }
        return ScoreResult::from_losses(std::move(losses));
    } catch (const nlohmann::json::exception& e) {
        throw ScoringError(std::string("malformed scoring response: ") + e.what());
    }
}

// ----------------------------------------------------------------------------
// Replay fixture
// ----------------------------------------------------------------------------

ReplayFile ReplayFile::load(const std::filesystem::path& p) {
    ReplayFile f;
    auto lines = read_complete_lines(p);
    size_t line_no = 0;
    for (const auto& line : lines) {
        ++line_no;
        if (trim_view(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("context_hash") || !j.contains("continuation_hash") ||
            !j.contains("token_losses")) {
            throw ParseError("replay fixture " + p.string() + ": malformed line " +
                             std::to_string(line_no));
        }
        Entry e;
        e.context_hash = j["context_hash"].get<uint64_t>();
        e.continuation_hash = j["continuation_hash"].get<uint64_t>();
        e.token_losses = j["token_losses"].get<std::vector<double>>();
        f.entries_.push_back(std::move(e));
    }
    return f;
}

void ReplayFile::save(const std::filesystem::path& p) const {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw StructuralError("cannot write replay fixture: " + p.string());
    for (const auto& e : entries_) {
        nlohmann::json j = {
            {"context_hash", e.context_hash},
            {"continuation_hash", e.continuation_hash},
            {"token_losses", e.token_losses},
        };
        out << j.dump() << '\n';
    }
}

void ReplayFile::add(std::string_view context, std::string_view continuation,
                     std::vector<double> losses) {
    entries_.push_back(Entry{fnv1a64(context), fnv1a64(continuation), std::move(losses)});
}

const std::vector<double>* ReplayFile::find(std::string_view context,
                                            std::string_view continuation) const {
    uint64_t ch = fnv1a64(context);
    uint64_t nh = fnv1a64(continuation);
    for (const auto& e : entries_) {
        if (e.context_hash == ch && e.continuation_hash == nh) return &e.token_losses;
    }
    return nullptr;
}

ScoreResult ReplayScorer::score(const std::string& context, const std::string& continuation) {
    if (continuation.empty()) {
        throw std::invalid_argument("score: continuation must be non-empty");
    }
    const auto* losses = file_.find(context, continuation);
    if (!losses) throw ScoringError("replay fixture has no entry for this (context, continuation)");
    return ScoreResult::from_losses(*losses);
}

ScoreResult RecordingScorer::score(const std::string& context, const std::string& continuation) {
    ScoreResult r = inner_.score(context, continuation);
    file_.add(context, continuation, r.token_losses);
    return r;
}

std::unique_ptr<Scorer> make_scorer(const ScorerConfig& cfg) {
    if (cfg.mode == ScorerConfig::Mode::mock) return std::make_unique<MockScorer>();
    return std::make_unique<RemoteScorer>(cfg);
}

}  // namespace cotpress
