#include "cotpress/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cotpress {

size_t filter_keep_count(size_t m, double alpha) {
    if (m == 0) throw StructuralError("length_filter: candidate set is empty");
    if (alpha < 0.0 || alpha >= 1.0) throw ConfigError("search.alpha must be in [0, 1)");
    // The 1e-9 nudge keeps exact-rational products like 0.75*4 from landing an
    // ulp above their true value and ceiling one too high.
    double exact = (1.0 - alpha) * static_cast<double>(m);
    auto k = static_cast<size_t>(std::ceil(exact - 1e-9));
    return std::max<size_t>(1, std::min(k, m));
}

CandidateSet length_filter(const CandidateSet& candidates, double alpha) {
    size_t keep = filter_keep_count(candidates.size(), alpha);
    std::vector<size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (candidates[a].length != candidates[b].length)
            return candidates[a].length < candidates[b].length;
        return candidates[a].candidate_index < candidates[b].candidate_index;
    });
    order.resize(keep);
    std::sort(order.begin(), order.end());
    CandidateSet out;
    out.reserve(keep);
    for (size_t i : order) out.push_back(candidates[i]);
    return out;
}

std::string selection_context(const std::string& problem,
                              const std::vector<std::string>& selected_texts) {
    std::string ctx = problem;
    for (const auto& t : selected_texts) {
        ctx += "\n\n";
        ctx += t;
    }
    return ctx;
}

std::pair<const Candidate*, ScoreResult> select_chunk(const std::string& problem,
                                                      const std::vector<std::string>& prefix,
                                                      const CandidateSet& filtered, Scorer& scorer,
                                                      bool length_normalized,
                                                      int scoring_concurrency) {
    if (filtered.empty()) throw StructuralError("select_chunk: filtered set is empty");
    std::string context = selection_context(problem, prefix);
    auto objective = [&](const ScoreResult& r) {
        return length_normalized ? r.total_logprob / static_cast<double>(r.token_count)
                                 : r.total_logprob;
    };
    // Score all siblings (concurrently when allowed), then argmax in index
    // order so ties land on the lowest candidate_index.
    std::vector<std::optional<ScoreResult>> scores(filtered.size());
    parallel_for(filtered.size(), scoring_concurrency, [&](size_t i) {
        // Empty candidate text cannot be scored; it can only come from a
        // fallback of an empty-core chunk, which any sibling beats.
        if (filtered[i].text.empty()) return;
        scores[i] = scorer.score(context, filtered[i].text);
    });
    const Candidate* best = nullptr;
    ScoreResult best_score;
    for (size_t i = 0; i < filtered.size(); ++i) {
        if (!scores[i]) continue;
        if (!best || objective(*scores[i]) > objective(best_score)) {
            best = &filtered[i];
            best_score = std::move(*scores[i]);
        }
    }
    if (!best) {
        // Every candidate was empty: keep position count by selecting the
        // first with a zero-token stand-in score.
        best = &filtered.front();
        best_score = ScoreResult{};
    }
    return {best, std::move(best_score)};
}

CompressedSample compress_sample(const std::string& sample_id, const std::string& problem,
                                 const std::string& original_solution,
                                 const std::vector<CandidateSet>& candidate_sets,
                                 const SearchConfig& cfg, Scorer& scorer, LenUnit len_unit) {
    CompressedSample out;
    out.sample_id = sample_id;
    out.problem = problem;

    // Per-sample stream so the draw sequence is independent of which other
    // samples ran before this one.
    SplitMix64 rng(cfg.random_seed ^ fnv1a64(sample_id));

    std::vector<std::string> prefix;
    prefix.reserve(candidate_sets.size());
    for (const auto& cands : candidate_sets) {
        CandidateSet filtered = length_filter(cands, cfg.alpha);
        const Candidate* picked = nullptr;
        std::optional<ScoreResult> score;
        if (cfg.strategy == SearchConfig::Strategy::greedy_likelihood) {
            auto [best, s] = select_chunk(problem, prefix, filtered, scorer,
                                          cfg.length_normalized, cfg.scoring_concurrency);
            picked = best;
            if (!best->text.empty()) score = std::move(s);
        } else {
            picked = &filtered[rng.uniform_below(filtered.size())];
        }
        Selection sel;
        sel.chunk_index = picked->chunk_index;
        sel.candidate_index = picked->candidate_index;
        sel.text = picked->text;
        sel.score = std::move(score);
        prefix.push_back(trim(sel.text));
        out.selected.push_back(std::move(sel));
    }

    // y* assembly: trimmed texts joined with the segmentation boundary marker.
    std::string y_star;
    for (size_t i = 0; i < prefix.size(); ++i) {
        if (i > 0) y_star += "\n\n";
        y_star += prefix[i];
    }
    out.compressed_cot = std::move(y_star);
    out.original_len = unit_length(original_solution, len_unit);
    out.compressed_len = unit_length(out.compressed_cot, len_unit);
    if (out.original_len <= 0) {
        throw StructuralError("compress_sample: original solution has zero length in " +
                              to_string(len_unit));
    }
    out.compression_ratio =
        static_cast<double>(out.compressed_len) / static_cast<double>(out.original_len);
    return out;
}

}  // namespace cotpress
