#pragma once

// Test-side oracle for the inter-chunk search, kept independent of the search
// module: its own integer filter arithmetic, its own context assembly, and a
// brute-force per-step argmax. Only the Candidate record type and the Scorer
// interface are shared.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "cotpress/generator.hpp"
#include "cotpress/scorer.hpp"

namespace cotpress::testing {

// max(1, ceil((1 - p/q) * m)) in exact integer arithmetic; alpha = p/q.
inline size_t oracle_keep_count(size_t m, int64_t p, int64_t q) {
    int64_t numer = (q - p) * static_cast<int64_t>(m);
    int64_t k = (numer + q - 1) / q;  // ceil
    if (k < 1) k = 1;
    return static_cast<size_t>(k);
}

inline std::vector<Candidate> oracle_filter(const std::vector<Candidate>& cands, int64_t p,
                                            int64_t q) {
    size_t keep = oracle_keep_count(cands.size(), p, q);
    std::vector<size_t> idx(cands.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (cands[a].length != cands[b].length) return cands[a].length < cands[b].length;
        return cands[a].candidate_index < cands[b].candidate_index;
    });
    idx.resize(std::min(keep, idx.size()));
    std::sort(idx.begin(), idx.end());
    std::vector<Candidate> out;
    for (size_t i : idx) out.push_back(cands[i]);
    return out;
}

struct OracleStep {
    int candidate_index = 0;
    std::string text;
    double total_logprob = 0.0;
};

// Exhaustive per-step argmax: scores every filtered candidate at every
// position and picks the maximum, ties to the lowest candidate index.
inline std::vector<OracleStep> oracle_greedy(const std::string& problem,
                                             const std::vector<std::vector<Candidate>>& sets,
                                             int64_t p, int64_t q, Scorer& scorer) {
    std::vector<OracleStep> steps;
    std::string context = problem;
    for (const auto& set : sets) {
        std::vector<Candidate> filtered = oracle_filter(set, p, q);
        bool have_best = false;
        OracleStep best;
        for (const auto& cand : filtered) {
            if (cand.text.empty()) continue;
            double score = scorer.score(context, cand.text).total_logprob;
            if (!have_best || score > best.total_logprob) {
                have_best = true;
                best = {cand.candidate_index, cand.text, score};
            }
        }
        if (!have_best) best = {filtered.front().candidate_index, filtered.front().text, 0.0};
        context += "\n\n";
        std::string_view t = best.text;
        size_t b = 0, e = t.size();
        while (b < e && (t[b] == ' ' || t[b] == '\t' || t[b] == '\n' || t[b] == '\r' ||
                         t[b] == '\f' || t[b] == '\v'))
            ++b;
        while (e > b && (t[e - 1] == ' ' || t[e - 1] == '\t' || t[e - 1] == '\n' ||
                         t[e - 1] == '\r' || t[e - 1] == '\f' || t[e - 1] == '\v'))
            --e;
        context += std::string(t.substr(b, e - b));
        steps.push_back(std::move(best));
    }
    return steps;
}

// Candidate-set builder for scripted instances.
inline std::vector<Candidate> make_candidate_set(int chunk_index,
                                                 const std::vector<std::string>& texts,
                                                 LenUnit unit = LenUnit::words) {
    std::vector<Candidate> out;
    for (size_t j = 0; j < texts.size(); ++j) {
        Candidate c;
        c.chunk_index = chunk_index;
        c.candidate_index = static_cast<int>(j);
        c.text = texts[j];
        c.length = unit_length(texts[j], unit);
        c.origin = Candidate::Origin::generated;
        out.push_back(std::move(c));
    }
    return out;
}

// Random scripted instance: m chunk positions, m_cands candidates each, texts
// drawn word-by-word so lengths and contents vary.
inline std::vector<std::vector<Candidate>> random_instance(SplitMix64& rng, int m, int m_cands,
                                                           LenUnit unit = LenUnit::words) {
    static const std::vector<std::string> vocab = {"wait", "check", "x", "sum", "therefore",
                                                   "δ",    "hmm",   "42", "verify"};
    std::vector<std::vector<Candidate>> sets;
    for (int i = 0; i < m; ++i) {
        std::vector<std::string> texts;
        for (int j = 0; j < m_cands; ++j) {
            int words = 1 + static_cast<int>(rng.uniform_below(6));
            std::string t;
            for (int w = 0; w < words; ++w) {
                if (w > 0) t += ' ';
                t += vocab[rng.uniform_below(vocab.size())];
            }
            texts.push_back(std::move(t));
        }
        sets.push_back(make_candidate_set(i, texts, unit));
    }
    return sets;
}

}  // namespace cotpress::testing
