#pragma once

// Synthetic corpus builder for pipeline-level tests. The mock chat backend
// compresses by removing parenthesized asides, so fixtures steer each
// sample's fate through its text:
//   - clean samples carry parenthetical filler (compressible, in-bounds ratio)
//     and a boxed answer outside any parentheses;
//   - a "ratio" plant has no parentheses at all (ratio 1.0, above max_ratio);
//   - a "drop answer" plant hides its boxed answer inside parentheses;
//   - an "oversized" plant simply has more paragraphs than the chunk cap.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cotpress/config.hpp"

namespace cotpress::testing {

inline std::string fixture_paragraph(const std::string& tag, int keep_words, int drop_words) {
    std::string out;
    for (int w = 0; w < keep_words / 2; ++w) out += tag + "k" + std::to_string(w) + " ";
    if (drop_words > 0) {
        out += "(";
        for (int w = 0; w < drop_words; ++w) {
            if (w > 0) out += ' ';
            out += tag + "d" + std::to_string(w);
        }
        out += ") ";
    }
    for (int w = keep_words / 2; w < keep_words; ++w) out += tag + "k" + std::to_string(w) + " ";
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

struct FixtureSample {
    std::string id;
    std::string problem;
    std::string solution;
};

// A solvable sample: `chunks` paragraphs of `keep` visible words plus `drop`
// parenthesized filler words each, with the boxed answer on the last line.
inline FixtureSample clean_sample(const std::string& id, int chunks, const std::string& answer,
                                  bool box_in_parens = false, int drop = 5) {
    FixtureSample s;
    s.id = id;
    s.problem = "Problem " + id + ": compute the value.";
    for (int c = 0; c < chunks; ++c) {
        if (c > 0) s.solution += "\n\n";
        s.solution += fixture_paragraph(id + "c" + std::to_string(c), 10, drop);
    }
    if (box_in_parens) {
        s.solution += " (final answer \\boxed{" + answer + "})";
    } else {
        s.solution += " Final answer \\boxed{" + answer + "}";
    }
    return s;
}

inline FixtureSample oversized_sample(const std::string& id, int chunks) {
    FixtureSample s = clean_sample(id, chunks, "7");
    return s;
}

inline FixtureSample ratio_violation_sample(const std::string& id, int chunks) {
    // No parentheses anywhere: the mock compression is the identity, so the
    // ratio lands at 1.0, above any max_ratio < 1.
    FixtureSample s;
    s.id = id;
    s.problem = "Problem " + id + ": compute the value.";
    for (int c = 0; c < chunks; ++c) {
        if (c > 0) s.solution += "\n\n";
        s.solution += fixture_paragraph(id + "c" + std::to_string(c), 10, 0);
    }
    s.solution += " Final answer \\boxed{9}";
    return s;
}

inline void write_corpus(const std::filesystem::path& path,
                         const std::vector<FixtureSample>& samples) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (const auto& s : samples) {
        out << nlohmann::json{{"id", s.id}, {"problem", s.problem}, {"solution", s.solution}}.dump()
            << '\n';
    }
}

// 20 samples: 17 clean, one oversized, one answer-dropping, one
// ratio-violating. min_len 8 words keeps fixtures small.
inline std::vector<FixtureSample> standard_corpus() {
    std::vector<FixtureSample> samples;
    for (int i = 0; i < 17; ++i) {
        char id[8];
        std::snprintf(id, sizeof(id), "s%02d", i);
        samples.push_back(clean_sample(id, 2 + i % 3, std::to_string(10 + i)));
    }
    samples.push_back(oversized_sample("x_oversized", 31));
    samples.push_back(clean_sample("x_dropans", 2, "42", /*box_in_parens=*/true));
    samples.push_back(ratio_violation_sample("x_ratio", 2));
    return samples;
}

inline PipelineConfig fixture_config(const std::filesystem::path& dir) {
    PipelineConfig cfg;
    cfg.segmentation.min_len = 8;
    cfg.segmentation.len_unit = LenUnit::words;
    cfg.generator.num_candidates = 3;
    cfg.generator.max_retries = 0;
    cfg.generator.request_concurrency = 2;
    cfg.scorer.mode = ScorerConfig::Mode::mock;
    cfg.search.alpha = 0.5;
    cfg.search.strategy = SearchConfig::Strategy::greedy_likelihood;
    cfg.search.random_seed = 7;
    cfg.ratio_bounds = {0.2, 0.95};
    cfg.max_chunks = 30;
    cfg.paths.input = dir / "corpus.jsonl";
    cfg.paths.workdir = dir / "work";
    cfg.paths.output = dir / "dataset.jsonl";
    cfg.max_inflight_requests = 4;
    return cfg;
}

}  // namespace cotpress::testing
