#include "cotpress/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "cotpress/answers.hpp"

namespace cotpress {

namespace {

constexpr std::string_view kMathSuffix =
    " Let's think step by step and output the final answer within boxed{}.";
constexpr std::string_view kGpqaSuffix =
    " Answer the following multiple choice question. The last line of your response should be "
    "of the following format: 'Answer: $LETTER' (without quotes) where LETTER is one of ABCD. "
    "Let's think step by step before answering.";

}  // namespace

std::string to_string(RejectReason r) {
    switch (r) {
        case RejectReason::chunk_cap: return "chunk_cap";
        case RejectReason::generation_failed: return "generation_failed";
        case RejectReason::no_valid_answer: return "no_valid_answer";
        case RejectReason::answer_mismatch: return "answer_mismatch";
        case RejectReason::ratio: return "ratio";
    }
    return "unknown";
}

std::vector<Sample> load_samples(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StructuralError("cannot open corpus: " + path.string());
    std::vector<Sample> samples;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_view(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        auto fail = [&](const std::string& what) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + what);
        };
        if (j.is_discarded() || !j.is_object()) fail("line is not a JSON object");
        for (const char* field : {"id", "problem", "solution"}) {
            if (!j.contains(field) || !j[field].is_string()) {
                fail(std::string("missing or non-string field '") + field + "'");
            }
            if (j[field].get<std::string>().empty()) {
                fail(std::string("field '") + field + "' must be non-empty");
            }
        }
        Sample s;
        s.sample_id = j["id"].get<std::string>();
        s.problem = j["problem"].get<std::string>();
        s.solution = j["solution"].get<std::string>();
        if (j.contains("meta") && j["meta"].is_object()) {
            for (auto& [k, v] : j["meta"].items()) {
                if (v.is_string()) s.source_meta[k] = v.get<std::string>();
            }
        }
        if (!seen_ids.insert(s.sample_id).second) {
            fail("duplicate sample id '" + s.sample_id + "'");
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

ChunkCapResult filter_chunk_cap(const std::vector<Sample>& samples, const SegmentationConfig& cfg,
                                int64_t max_chunks) {
    ChunkCapResult res;
    for (const auto& s : samples) {
        int64_t m = chunk_count(s.solution, cfg);
        if (m <= max_chunks) {
            res.kept.push_back(s);
        } else {
            res.rejected.emplace_back(s, m);
        }
    }
    return res;
}

AnswerFilterResult filter_answers(
    const std::vector<CompressedSample>& compressed,
    const std::unordered_map<std::string, std::string>& original_solution_by_id) {
    AnswerFilterResult res;
    for (const auto& cs : compressed) {
        auto it = original_solution_by_id.find(cs.sample_id);
        if (it == original_solution_by_id.end()) {
            throw StructuralError("filter_answers: no original solution for sample '" +
                                  cs.sample_id + "'");
        }
        auto original = extract_boxed(it->second);
        auto after = extract_boxed(cs.compressed_cot);
        if (!original || !after) {
            res.rejected.emplace_back(cs, RejectReason::no_valid_answer);
        } else if (!answers_match(*original, *after)) {
            res.rejected.emplace_back(cs, RejectReason::answer_mismatch);
        } else {
            res.kept.push_back(cs);
        }
    }
    return res;
}

RatioFilterResult filter_ratio(const std::vector<CompressedSample>& compressed,
                               const RatioBounds& bounds) {
    if (!(bounds.min_ratio > 0.0) || !(bounds.min_ratio < bounds.max_ratio)) {
        throw ConfigError("ratio_bounds require 0 < min_ratio < max_ratio");
    }
    RatioFilterResult res;
    for (const auto& cs : compressed) {
        if (cs.compression_ratio >= bounds.min_ratio && cs.compression_ratio <= bounds.max_ratio) {
            res.kept.push_back(cs);
        } else {
            res.rejected.push_back(cs);
        }
    }
    return res;
}

int64_t emit_sft(const std::vector<CompressedSample>& kept, const std::filesystem::path& out_path,
                 const std::unordered_map<std::string, std::string>& template_by_id) {
    std::vector<const CompressedSample*> ordered;
    ordered.reserve(kept.size());
    for (const auto& cs : kept) ordered.push_back(&cs);
    std::sort(ordered.begin(), ordered.end(),
              [](const CompressedSample* a, const CompressedSample* b) {
                  return a->sample_id < b->sample_id;
              });

    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw StructuralError("cannot write dataset: " + out_path.string());
    int64_t written = 0;
    for (const CompressedSample* cs : ordered) {
        std::string_view suffix = kMathSuffix;
        auto it = template_by_id.find(cs->sample_id);
        if (it != template_by_id.end() && it->second == "gpqa") suffix = kGpqaSuffix;
        nlohmann::json line = {
            {"instruction", cs->problem + std::string(suffix)},
            {"output", cs->compressed_cot},
            {"meta",
             {{"sample_id", cs->sample_id},
              {"ratio", cs->compression_ratio},
              {"m", static_cast<int64_t>(cs->selected.size())}}},
        };
        out << line.dump() << '\n';
        ++written;
    }
    if (!out) throw StructuralError("write failed: " + out_path.string());
    return written;
}

FilterOutcome run_filter_pipeline(
    const std::vector<Sample>& samples, const SegmentationConfig& seg_cfg, int64_t max_chunks,
    const std::unordered_map<std::string, CompressedSample>& compressed_by_id,
    const std::unordered_map<std::string, std::string>& failed_by_id, const RatioBounds& bounds) {
    FilterOutcome outcome;
    FilterReport& rep = outcome.report;
    rep.loaded = static_cast<int64_t>(samples.size());

    ChunkCapResult cap = filter_chunk_cap(samples, seg_cfg, max_chunks);
    rep.after_chunk_cap = static_cast<int64_t>(cap.kept.size());
    for (const auto& [s, m] : cap.rejected) {
        rep.verdicts.push_back({s.sample_id, RejectReason::chunk_cap,
                                std::to_string(m) + " chunks > cap " + std::to_string(max_chunks)});
    }

    std::vector<CompressedSample> survivors;
    std::unordered_map<std::string, std::string> original_by_id;
    for (const auto& s : cap.kept) {
        auto failed = failed_by_id.find(s.sample_id);
        if (failed != failed_by_id.end()) {
            ++rep.generation_failed;
            rep.verdicts.push_back({s.sample_id, RejectReason::generation_failed, failed->second});
            continue;
        }
        auto it = compressed_by_id.find(s.sample_id);
        if (it == compressed_by_id.end()) {
            throw StructuralError("filter pipeline: sample '" + s.sample_id +
                                  "' has neither a compressed record nor a failure record");
        }
        survivors.push_back(it->second);
        original_by_id[s.sample_id] = s.solution;
    }
    rep.after_generation = static_cast<int64_t>(survivors.size());

    AnswerFilterResult ans = filter_answers(survivors, original_by_id);
    for (const auto& [cs, reason] : ans.rejected) {
        rep.verdicts.push_back({cs.sample_id, reason, ""});
    }
    int64_t mismatches = 0;
    for (const auto& [_, reason] : ans.rejected) {
        if (reason == RejectReason::answer_mismatch) ++mismatches;
    }
    rep.after_valid_answer = rep.after_generation -
                             (static_cast<int64_t>(ans.rejected.size()) - mismatches);
    rep.after_same_answer = static_cast<int64_t>(ans.kept.size());

    RatioFilterResult rat = filter_ratio(ans.kept, bounds);
    for (const auto& cs : rat.rejected) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "ratio %.4f outside [%g, %g]", cs.compression_ratio,
                      bounds.min_ratio, bounds.max_ratio);
        rep.verdicts.push_back({cs.sample_id, RejectReason::ratio, buf});
    }
    rep.after_ratio = static_cast<int64_t>(rat.kept.size());
    rep.emitted = rep.after_ratio;

    for (const auto& cs : rat.kept) {
        rep.verdicts.push_back({cs.sample_id, std::nullopt, ""});
    }
    std::sort(rep.verdicts.begin(), rep.verdicts.end(),
              [](const Verdict& a, const Verdict& b) { return a.sample_id < b.sample_id; });

    outcome.kept = std::move(rat.kept);
    std::sort(outcome.kept.begin(), outcome.kept.end(),
              [](const CompressedSample& a, const CompressedSample& b) {
                  return a.sample_id < b.sample_id;
              });
    return outcome;
}

}  // namespace cotpress
