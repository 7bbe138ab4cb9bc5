#include "cotpress/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "cotpress/metrics.hpp"

namespace cotpress {

using nlohmann::json;

namespace {

// ----------------------------------------------------------------------------
// Checkpointed stage file
// ----------------------------------------------------------------------------
// Completed lines from a previous run are harvested (from the file and its
// .prev shadow) and replayed byte-for-byte instead of recomputed; new lines
// are appended in canonical order. The merged cache is parked in .prev before
// the main file is rewritten, so a kill at any point leaves the union of both
// files covering all completed work.

class StageFile {
public:
    using KeyFn = std::function<std::string(const json&)>;

    StageFile(std::filesystem::path path, bool resume, KeyFn key_of)
        : path_(std::move(path)), prev_path_(path_.string() + ".prev") {
        if (resume) {
            harvest(path_, key_of);
            harvest(prev_path_, key_of);
            if (!cache_.empty()) {
                std::ofstream shadow(prev_path_, std::ios::binary | std::ios::trunc);
                for (const auto& [_, line] : cache_) shadow << line << '\n';
            }
        } else {
            std::filesystem::remove(prev_path_);
        }
        out_.open(path_, std::ios::binary | std::ios::trunc);
        if (!out_) throw StructuralError("cannot write stage file: " + path_.string());
    }

    bool has(const std::string& key) const { return cache_.count(key) > 0; }

    // Writes the cached line for key, or builds a fresh one.
    void emit(const std::string& key, const std::function<json()>& build) {
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            out_ << it->second << '\n';
        } else {
            out_ << build().dump() << '\n';
        }
        out_.flush();
    }

    void finish() {
        out_.close();
        std::filesystem::remove(prev_path_);
    }

private:
    void harvest(const std::filesystem::path& p, const KeyFn& key_of) {
        for (const auto& line : read_complete_lines(p)) {
            if (trim_view(line).empty()) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded()) continue;  // foreign or torn line: recompute
            cache_.emplace(key_of(j), line);
        }
    }

    std::filesystem::path path_;
    std::filesystem::path prev_path_;
    std::map<std::string, std::string> cache_;
    std::ofstream out_;
};

std::string sample_key(const json& j) {
    return j.value("sample_id", std::string());
}

// Zero-padded so lexicographic key order matches numeric order.
std::string pad_index(int64_t v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06lld", static_cast<long long>(v));
    return buf;
}

std::string candidate_key(const std::string& sample_id, int64_t chunk, int64_t cand) {
    return sample_id + "\x1f" + pad_index(chunk) + "\x1f" + pad_index(cand);
}

std::string candidate_key(const json& j) {
    return candidate_key(j.value("sample_id", std::string()), j.value("chunk_index", int64_t{0}),
                         j.value("candidate_index", int64_t{0}));
}

json chunk_to_json(const Chunk& c) {
    return json{
        {"index", c.index},
        {"text", c.text},
        {"core_len", c.core_len},
        {"start", c.start},
        {"end", c.end},
        {"sep_len", c.sep_len},
    };
}

Chunk chunk_from_json(const json& j) {
    Chunk c;
    c.index = j.at("index").get<int>();
    c.text = j.at("text").get<std::string>();
    c.core_len = j.at("core_len").get<int64_t>();
    c.start = j.at("start").get<size_t>();
    c.end = j.at("end").get<size_t>();
    c.sep_len = j.at("sep_len").get<size_t>();
    return c;
}

json candidate_to_json(const std::string& sample_id, const Candidate& c) {
    return json{
        {"sample_id", sample_id},
        {"chunk_index", c.chunk_index},
        {"candidate_index", c.candidate_index},
        {"text", c.text},
        {"raw", c.raw},
        {"length", c.length},
        {"origin", c.origin == Candidate::Origin::generated ? "generated" : "fallback_original"},
    };
}

Candidate candidate_from_json(const json& j) {
    Candidate c;
    c.chunk_index = j.at("chunk_index").get<int>();
    c.candidate_index = j.at("candidate_index").get<int>();
    c.text = j.at("text").get<std::string>();
    c.raw = j.value("raw", std::string());
    c.length = j.at("length").get<int64_t>();
    c.origin = j.value("origin", std::string()) == "fallback_original"
                   ? Candidate::Origin::fallback_original
                   : Candidate::Origin::generated;
    return c;
}

json compressed_to_json(const CompressedSample& cs) {
    json selected = json::array();
    for (const auto& sel : cs.selected) {
        json score = nullptr;
        if (sel.score) {
            score = json{{"total_logprob", sel.score->total_logprob},
                         {"token_count", sel.score->token_count}};
        }
        selected.push_back(json{
            {"chunk_index", sel.chunk_index},
            {"candidate_index", sel.candidate_index},
            {"text", sel.text},
            {"score", score},
        });
    }
    return json{
        {"sample_id", cs.sample_id},
        {"problem", cs.problem},
        {"selected", selected},
        {"y_star", cs.compressed_cot},
        {"original_len", cs.original_len},
        {"compressed_len", cs.compressed_len},
        {"compression_ratio", cs.compression_ratio},
        {"m", static_cast<int64_t>(cs.selected.size())},
    };
}

CompressedSample compressed_from_json(const json& j) {
    CompressedSample cs;
    cs.sample_id = j.at("sample_id").get<std::string>();
    cs.problem = j.at("problem").get<std::string>();
    cs.compressed_cot = j.at("y_star").get<std::string>();
    cs.original_len = j.at("original_len").get<int64_t>();
    cs.compressed_len = j.at("compressed_len").get<int64_t>();
    cs.compression_ratio = j.at("compression_ratio").get<double>();
    for (const auto& s : j.at("selected")) {
        Selection sel;
        sel.chunk_index = s.at("chunk_index").get<int>();
        sel.candidate_index = s.at("candidate_index").get<int>();
        sel.text = s.at("text").get<std::string>();
        if (s.contains("score") && !s.at("score").is_null()) {
            ScoreResult r;
            r.total_logprob = s.at("score").at("total_logprob").get<double>();
            r.token_count = s.at("score").at("token_count").get<int64_t>();
            sel.score = std::move(r);
        }
        cs.selected.push_back(std::move(sel));
    }
    return cs;
}

std::unordered_map<std::string, std::string> load_failures(const std::filesystem::path& p) {
    std::unordered_map<std::string, std::string> failures;
    for (const auto& line : read_complete_lines(p)) {
        if (trim_view(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        failures[j.value("sample_id", std::string())] = j.value("error", std::string());
    }
    return failures;
}

}  // namespace

// ----------------------------------------------------------------------------
// Pipeline
// ----------------------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig cfg, PipelineOptions opts)
    : cfg_(std::move(cfg)), opts_(std::move(opts)) {
    validate_config(cfg_);
    std::filesystem::create_directories(cfg_.paths.workdir);
}

std::filesystem::path Pipeline::chunks_path() const { return cfg_.paths.workdir / "chunks.jsonl"; }
std::filesystem::path Pipeline::candidates_path() const {
    return cfg_.paths.workdir / "candidates.jsonl";
}
std::filesystem::path Pipeline::gen_failed_path() const {
    return cfg_.paths.workdir / "gen_failed.jsonl";
}
std::filesystem::path Pipeline::compressed_path() const {
    return cfg_.paths.workdir / "compressed.jsonl";
}
std::filesystem::path Pipeline::search_failed_path() const {
    return cfg_.paths.workdir / "search_failed.jsonl";
}
std::filesystem::path Pipeline::filter_report_path() const {
    return cfg_.paths.workdir / "filter_report.json";
}
std::filesystem::path Pipeline::dataset_path() const { return cfg_.paths.output; }
std::filesystem::path Pipeline::eval_report_path() const {
    return cfg_.paths.workdir / "eval_report.json";
}
std::filesystem::path Pipeline::eval_samples_csv_path() const {
    return cfg_.paths.workdir / "eval_samples.csv";
}
std::filesystem::path Pipeline::loss_curves_csv_path() const {
    return cfg_.paths.workdir / "loss_curves.csv";
}

void Pipeline::log_line(const std::string& s) const {
    if (opts_.log) *opts_.log << s << '\n';
}

ChatBackend& Pipeline::chat_backend() {
    if (opts_.chat_override) return *opts_.chat_override;
    if (!owned_chat_) {
        if (opts_.mock_backends) {
            owned_chat_ = std::make_unique<MockChatBackend>();
        } else {
            if (cfg_.generator.endpoint.empty()) {
                throw ConfigError("generator.endpoint: required unless --mock-backends");
            }
            owned_chat_ = std::make_unique<HttpChatBackend>(
                cfg_.generator.endpoint, cfg_.generator.model_name, cfg_.generator.timeout);
        }
    }
    return *owned_chat_;
}

Scorer& Pipeline::scorer() {
    if (opts_.scorer_override) return *opts_.scorer_override;
    if (!owned_scorer_) {
        if (opts_.mock_backends) {
            owned_scorer_ = std::make_unique<MockScorer>();
        } else {
            owned_scorer_ = make_scorer(cfg_.scorer);
        }
    }
    return *owned_scorer_;
}

std::vector<Sample> Pipeline::load_input_sorted() const {
    std::vector<Sample> samples = load_samples(cfg_.paths.input);
    std::sort(samples.begin(), samples.end(),
              [](const Sample& a, const Sample& b) { return a.sample_id < b.sample_id; });
    return samples;
}

StageCounts Pipeline::segment() {
    auto samples = load_input_sorted();
    StageFile manifest(chunks_path(), opts_.resume, sample_key);
    std::map<int64_t, int64_t> histogram;
    int64_t oversized = 0;
    // The histogram tail marker follows the reporting hint when configured,
    // the operative cap otherwise.
    int64_t flag_at = cfg_.segmentation.max_chunks_hint.value_or(cfg_.max_chunks);
    for (const auto& s : samples) {
        int64_t m = chunk_count(s.solution, cfg_.segmentation);
        histogram[m] += 1;
        if (m > flag_at) ++oversized;
        manifest.emit(s.sample_id, [&] {
            json chunks = json::array();
            for (const auto& c : cotpress::segment(s.solution, cfg_.segmentation)) {
                chunks.push_back(chunk_to_json(c));
            }
            return json{{"sample_id", s.sample_id}, {"m", m}, {"chunks", chunks}};
        });
    }
    manifest.finish();
    log_line("segment: " + std::to_string(samples.size()) + " samples");
    for (const auto& [m, n] : histogram) {
        log_line("  chunks=" + std::to_string(m) + ": " + std::to_string(n) + " samples" +
                 (m > flag_at ? "  [over cap]" : ""));
    }
    if (oversized > 0) {
        log_line("  " + std::to_string(oversized) + " samples exceed " +
                 std::to_string(flag_at) + " chunks");
    }
    return {static_cast<int64_t>(samples.size()), 0};
}

StageCounts Pipeline::compress() {
    if (!std::filesystem::exists(chunks_path())) {
        throw StructuralError("chunks manifest not found; run segment first: " +
                              chunks_path().string());
    }
    auto samples = load_input_sorted();
    std::unordered_map<std::string, std::vector<Chunk>> chunks_by_id;
    std::unordered_map<std::string, int64_t> m_by_id;
    for (const auto& line : read_complete_lines(chunks_path())) {
        json j = json::parse(line);
        std::vector<Chunk> chunks;
        for (const auto& cj : j.at("chunks")) chunks.push_back(chunk_from_json(cj));
        chunks_by_id[j.at("sample_id").get<std::string>()] = std::move(chunks);
        m_by_id[j.at("sample_id").get<std::string>()] = j.at("m").get<int64_t>();
    }

    StageFile cand_file(candidates_path(), opts_.resume,
                        [](const json& j) { return candidate_key(j); });
    StageFile failed_file(gen_failed_path(), opts_.resume, sample_key);

    const int m_cands = cfg_.generator.num_candidates;
    GeneratorConfig gen_cfg = cfg_.generator;
    gen_cfg.request_concurrency =
        std::min(gen_cfg.request_concurrency, cfg_.max_inflight_requests);
    gen_cfg.len_unit = cfg_.segmentation.len_unit;

    StageCounts counts;
    for (const auto& s : samples) {
        auto chunks_it = chunks_by_id.find(s.sample_id);
        if (chunks_it == chunks_by_id.end()) {
            throw StructuralError("sample '" + s.sample_id + "' missing from chunks manifest");
        }
        const auto& chunks = chunks_it->second;
        if (m_by_id[s.sample_id] > cfg_.max_chunks) continue;  // capped pre-compression

        if (failed_file.has(s.sample_id)) {
            // Previous run already marked this sample failed; keep the verdict.
            failed_file.emit(s.sample_id, [] { return json(); });
            ++counts.failed;
            continue;
        }

        // Buffered per sample so a failure at any chunk leaves no orphan
        // candidate lines behind; only uncached slots hit the backend.
        std::vector<std::map<int, Candidate>> fresh(chunks.size());
        bool failed = false;
        std::string error;
        for (size_t ci = 0; ci < chunks.size() && !failed; ++ci) {
            const Chunk& chunk = chunks[ci];
            std::vector<int> missing;
            for (int j = 0; j < m_cands; ++j) {
                if (!cand_file.has(candidate_key(s.sample_id, chunk.index, j))) {
                    missing.push_back(j);
                }
            }
            if (missing.empty()) continue;
            std::vector<SlotResult> results(missing.size());
            parallel_for(missing.size(), gen_cfg.request_concurrency, [&](size_t k) {
                results[k] =
                    generate_candidate_slot(chunk, missing[k], gen_cfg, chat_backend(), opts_.sleep);
            });
            bool all_transport = missing.size() == static_cast<size_t>(m_cands);
            for (const auto& r : results) {
                if (r.failure != SlotResult::Failure::transport) all_transport = false;
            }
            if (all_transport) {
                failed = true;
                error = "backend unreachable for all " + std::to_string(m_cands) +
                        " candidate slots of chunk " + std::to_string(chunk.index);
                break;
            }
            for (size_t k = 0; k < missing.size(); ++k) {
                fresh[ci][missing[k]] = std::move(results[k].candidate);
            }
        }
        if (failed) {
            failed_file.emit(s.sample_id,
                             [&] { return json{{"sample_id", s.sample_id}, {"error", error}}; });
            ++counts.failed;
            continue;
        }
        for (size_t ci = 0; ci < chunks.size(); ++ci) {
            for (int j = 0; j < m_cands; ++j) {
                std::string key = candidate_key(s.sample_id, chunks[ci].index, j);
                cand_file.emit(key, [&] { return candidate_to_json(s.sample_id, fresh[ci].at(j)); });
            }
        }
        ++counts.ok;
    }
    cand_file.finish();
    failed_file.finish();
    log_line("compress: " + std::to_string(counts.ok) + " samples ok, " +
             std::to_string(counts.failed) + " failed");
    return counts;
}

StageCounts Pipeline::search() {
    if (!std::filesystem::exists(candidates_path())) {
        throw StructuralError("candidates not found; run compress first: " +
                              candidates_path().string());
    }
    if (!std::filesystem::exists(chunks_path())) {
        throw StructuralError("chunks manifest not found; run segment first: " +
                              chunks_path().string());
    }
    auto samples = load_input_sorted();
    std::unordered_map<std::string, const Sample*> sample_by_id;
    for (const auto& s : samples) sample_by_id[s.sample_id] = &s;

    std::unordered_map<std::string, int64_t> m_by_id;
    for (const auto& line : read_complete_lines(chunks_path())) {
        json j = json::parse(line);
        m_by_id[j.at("sample_id").get<std::string>()] = j.at("m").get<int64_t>();
    }

    // Group candidate records by sample, then chunk.
    std::map<std::string, std::map<int, CandidateSet>> cands_by_sample;
    for (const auto& line : read_complete_lines(candidates_path())) {
        json j = json::parse(line);
        Candidate c = candidate_from_json(j);
        cands_by_sample[j.at("sample_id").get<std::string>()][c.chunk_index].push_back(c);
    }
    auto gen_failed = load_failures(gen_failed_path());

    StageFile out_file(compressed_path(), opts_.resume, sample_key);
    StageFile failed_file(search_failed_path(), opts_.resume, sample_key);

    StageCounts counts;
    for (auto& [sample_id, by_chunk] : cands_by_sample) {
        if (gen_failed.count(sample_id)) continue;
        auto sit = sample_by_id.find(sample_id);
        if (sit == sample_by_id.end()) {
            throw StructuralError("candidates reference unknown sample '" + sample_id + "'");
        }
        if (failed_file.has(sample_id)) {
            failed_file.emit(sample_id, [] { return json(); });
            ++counts.failed;
            continue;
        }
        if (out_file.has(sample_id)) {
            out_file.emit(sample_id, [] { return json(); });
            ++counts.ok;
            continue;
        }
        std::vector<CandidateSet> sets;
        sets.reserve(by_chunk.size());
        for (auto& [chunk_index, set] : by_chunk) {
            std::sort(set.begin(), set.end(), [](const Candidate& a, const Candidate& b) {
                return a.candidate_index < b.candidate_index;
            });
            sets.push_back(std::move(set));
        }
        auto mit = m_by_id.find(sample_id);
        if (mit == m_by_id.end() || mit->second != static_cast<int64_t>(sets.size())) {
            throw StructuralError("sample '" + sample_id + "' has " +
                                  std::to_string(sets.size()) +
                                  " candidate chunks but the manifest disagrees");
        }
        try {
            SearchConfig search_cfg = cfg_.search;
            search_cfg.length_normalized = cfg_.scorer.length_normalized;
            search_cfg.scoring_concurrency =
                std::min(cfg_.scorer.request_concurrency, cfg_.max_inflight_requests);
            CompressedSample cs =
                compress_sample(sample_id, sit->second->problem, sit->second->solution, sets,
                                search_cfg, scorer(), cfg_.segmentation.len_unit);
            out_file.emit(sample_id, [&] { return compressed_to_json(cs); });
            ++counts.ok;
        } catch (const std::exception& e) {
            std::string error = e.what();
            failed_file.emit(sample_id,
                             [&] { return json{{"sample_id", sample_id}, {"error", error}}; });
            ++counts.failed;
        }
    }
    out_file.finish();
    failed_file.finish();
    log_line("search: " + std::to_string(counts.ok) + " samples ok, " +
             std::to_string(counts.failed) + " failed");
    return counts;
}

StageCounts Pipeline::filter_emit() {
    if (!std::filesystem::exists(compressed_path())) {
        throw StructuralError("compressed samples not found; run search first: " +
                              compressed_path().string());
    }
    auto samples = load_input_sorted();
    std::unordered_map<std::string, CompressedSample> compressed_by_id;
    for (const auto& line : read_complete_lines(compressed_path())) {
        CompressedSample cs = compressed_from_json(json::parse(line));
        compressed_by_id[cs.sample_id] = std::move(cs);
    }
    std::unordered_map<std::string, std::string> failures = load_failures(gen_failed_path());
    for (auto& [id, err] : load_failures(search_failed_path())) {
        failures.emplace(id, "search: " + err);
    }

    FilterOutcome outcome = run_filter_pipeline(samples, cfg_.segmentation, cfg_.max_chunks,
                                                compressed_by_id, failures, cfg_.ratio_bounds);

    std::unordered_map<std::string, std::string> template_by_id;
    for (const auto& s : samples) {
        auto it = s.source_meta.find("template");
        if (it != s.source_meta.end()) template_by_id[s.sample_id] = it->second;
    }
    int64_t written = emit_sft(outcome.kept, dataset_path(), template_by_id);

    json verdicts = json::array();
    for (const auto& v : outcome.report.verdicts) {
        verdicts.push_back(json{
            {"sample_id", v.sample_id},
            {"reason", v.reject ? to_string(*v.reject) : "kept"},
            {"detail", v.detail},
        });
    }
    json report = {
        {"counts",
         {{"loaded", outcome.report.loaded},
          {"after_chunk_cap", outcome.report.after_chunk_cap},
          {"generation_failed", outcome.report.generation_failed},
          {"after_generation", outcome.report.after_generation},
          {"after_valid_answer", outcome.report.after_valid_answer},
          {"after_same_answer", outcome.report.after_same_answer},
          {"after_ratio", outcome.report.after_ratio},
          {"emitted", written}}},
        {"verdicts", verdicts},
    };
    write_file(filter_report_path(), report.dump(2) + "\n");

    log_line("filter: loaded=" + std::to_string(outcome.report.loaded) +
             " chunk_cap=" + std::to_string(outcome.report.loaded - outcome.report.after_chunk_cap) +
             " generation_failed=" + std::to_string(outcome.report.generation_failed) +
             " answer_rejects=" +
             std::to_string(outcome.report.after_generation - outcome.report.after_same_answer) +
             " ratio_rejects=" +
             std::to_string(outcome.report.after_same_answer - outcome.report.after_ratio) +
             " emitted=" + std::to_string(written));
    // Filter rejects are normal operation; only upstream per-sample failures
    // count as failed here.
    return {written, outcome.report.generation_failed};
}

StageCounts Pipeline::eval() {
    if (!std::filesystem::exists(compressed_path())) {
        throw StructuralError("compressed samples not found; run search first: " +
                              compressed_path().string());
    }
    auto samples = load_input_sorted();
    std::unordered_map<std::string, const Sample*> sample_by_id;
    for (const auto& s : samples) sample_by_id[s.sample_id] = &s;

    std::vector<CompressedSample> compressed;
    for (const auto& line : read_complete_lines(compressed_path())) {
        compressed.push_back(compressed_from_json(json::parse(line)));
    }

    std::vector<CoherenceItem> items;
    std::map<std::string, std::string> original_by_id;
    std::map<std::string, std::string> compressed_text_by_id;
    std::vector<std::string> compressed_texts;
    for (const auto& cs : compressed) {
        auto sit = sample_by_id.find(cs.sample_id);
        if (sit == sample_by_id.end()) {
            throw StructuralError("compressed sample '" + cs.sample_id + "' not in input corpus");
        }
        items.push_back({cs.sample_id, sit->second->problem, cs.compressed_cot});
        original_by_id[cs.sample_id] = sit->second->solution;
        compressed_text_by_id[cs.sample_id] = cs.compressed_cot;
        compressed_texts.push_back(cs.compressed_cot);
    }

    CoherenceReport coherence = coherence_eval(items, scorer());
    write_loss_curves_csv(coherence, loss_curves_csv_path());

    CompressionReport comp = compression_report(original_by_id, compressed_text_by_id,
                                                cfg_.segmentation.len_unit, cfg_.reflection);
    LengthStats lengths =
        length_stats(compressed_texts, std::nullopt, cfg_.segmentation.len_unit);

    std::map<std::string, double> mean_loss_by_id;
    for (const auto& e : coherence.per_text) mean_loss_by_id[e.sample_id] = e.mean_loss;

    {
        std::ofstream csv(eval_samples_csv_path(), std::ios::binary | std::ios::trunc);
        if (!csv) throw StructuralError("cannot write " + eval_samples_csv_path().string());
        csv << "sample_id,ratio,reflections_before,reflections_after,mean_token_loss\n";
        for (const auto& d : comp.per_sample) {
            csv << d.sample_id << ',' << d.ratio << ',' << d.reflections_before << ','
                << d.reflections_after << ',';
            auto it = mean_loss_by_id.find(d.sample_id);
            if (it != mean_loss_by_id.end()) csv << it->second;
            csv << '\n';
        }
    }

    json report = {
        {"coherence",
         {{"corpus_mean_token_loss",
           coherence.corpus_mean ? json(*coherence.corpus_mean) : json(nullptr)},
          {"texts_scored", coherence.per_text.size()},
          {"texts_skipped", coherence.skipped.size()}}},
        {"reflection",
         {{"mean_before", comp.mean_reflections_before},
          {"mean_after", comp.mean_reflections_after},
          {"keywords", cfg_.reflection.keywords}}},
        {"length",
         {{"unit", to_string(cfg_.segmentation.len_unit)},
          {"count", lengths.count},
          {"avg_len", lengths.avg_len ? json(*lengths.avg_len) : json(nullptr)}}},
        {"compression",
         {{"samples", comp.per_sample.size()}, {"mean_ratio", comp.mean_ratio}}},
    };
    write_file(eval_report_path(), report.dump(2) + "\n");

    log_line("eval: " + std::to_string(coherence.per_text.size()) + " texts scored, " +
             std::to_string(coherence.skipped.size()) + " skipped");
    return {static_cast<int64_t>(coherence.per_text.size()),
            static_cast<int64_t>(coherence.skipped.size())};
}

StageCounts Pipeline::run_all() {
    StageCounts filter_counts;
    struct Stage {
        const char* name;
        std::function<StageCounts()> fn;
    };
    const Stage stages[] = {
        {"segment", [&] { return segment(); }},
        {"compress", [&] { return compress(); }},
        {"search", [&] { return search(); }},
        {"filter-emit", [&] { return filter_emit(); }},
        {"eval", [&] { return eval(); }},
    };
    for (const auto& stage : stages) {
        try {
            StageCounts c = stage.fn();
            if (std::string_view(stage.name) == "filter-emit") filter_counts = c;
        } catch (const std::exception& e) {
            throw StructuralError("stage " + std::string(stage.name) + " failed: " + e.what());
        }
    }
    // The filter stage's view is authoritative: emitted count plus every
    // upstream per-sample failure it accounted for.
    return filter_counts;
}

}  // namespace cotpress
