#include "cotpress/config.hpp"

#include <set>

#include <json.hpp>

namespace cotpress {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& get_object(const json& j, const std::string& path) {
    if (!j.is_object()) bad(path, "must be an object");
    return j;
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& known) {
    for (auto& [k, _] : obj.items()) {
        if (!known.count(k)) bad(path.empty() ? k : path + "." + k, "unknown key");
    }
}

template <typename T>
T require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) bad(path + "." + key, "required field missing");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        bad(path + "." + key, "has the wrong type");
    }
}

template <typename T>
T optional_field(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        bad(path + "." + key, "has the wrong type");
    }
}

SegmentationConfig parse_segmentation(const json& j) {
    const std::string path = "segmentation";
    get_object(j, path);
    reject_unknown_keys(j, path, {"min_len", "len_unit", "max_chunks_hint"});
    SegmentationConfig cfg;
    cfg.min_len = optional_field<int64_t>(j, path, "min_len", 50);
    if (cfg.min_len < 1) bad(path + ".min_len", "must be >= 1");
    if (j.contains("len_unit")) {
        try {
            cfg.len_unit = len_unit_from_string(j.at("len_unit").get<std::string>());
        } catch (const json::exception&) {
            bad(path + ".len_unit", "must be a string");
        }
    }
    if (j.contains("max_chunks_hint")) {
        auto v = require<int64_t>(j, path, "max_chunks_hint");
        if (v < 1) bad(path + ".max_chunks_hint", "must be >= 1");
        cfg.max_chunks_hint = v;
    }
    return cfg;
}

GeneratorConfig parse_generator(const json& j, LenUnit unit) {
    const std::string path = "generator";
    get_object(j, path);
    reject_unknown_keys(j, path,
                        {"endpoint", "model_name", "num_candidates", "temperature", "max_retries",
                         "request_concurrency", "timeout_ms", "max_tokens"});
    GeneratorConfig cfg;
    cfg.endpoint = optional_field<std::string>(j, path, "endpoint", "");
    cfg.model_name = optional_field<std::string>(j, path, "model_name", "");
    cfg.num_candidates = optional_field<int>(j, path, "num_candidates", 8);
    if (cfg.num_candidates < 1) bad(path + ".num_candidates", "must be >= 1");
    cfg.temperature = optional_field<double>(j, path, "temperature", 0.75);
    if (cfg.temperature < 0.0) bad(path + ".temperature", "must be >= 0");
    cfg.max_retries = optional_field<int>(j, path, "max_retries", 2);
    if (cfg.max_retries < 0) bad(path + ".max_retries", "must be >= 0");
    cfg.request_concurrency = optional_field<int>(j, path, "request_concurrency", 4);
    if (cfg.request_concurrency < 1) bad(path + ".request_concurrency", "must be >= 1");
    cfg.timeout = std::chrono::milliseconds(optional_field<int64_t>(j, path, "timeout_ms", 60000));
    if (cfg.timeout.count() < 1) bad(path + ".timeout_ms", "must be >= 1");
    cfg.max_tokens = optional_field<int>(j, path, "max_tokens", 0);
    if (cfg.max_tokens < 0) bad(path + ".max_tokens", "must be >= 0 (0 = auto)");
    cfg.len_unit = unit;
    return cfg;
}

ScorerConfig parse_scorer(const json& j) {
    const std::string path = "scorer";
    get_object(j, path);
    reject_unknown_keys(j, path,
                        {"mode", "endpoint", "model_name", "timeout_ms", "max_retries",
                         "request_concurrency", "length_normalized"});
    ScorerConfig cfg;
    std::string mode = optional_field<std::string>(j, path, "mode", "mock");
    if (mode == "mock") {
        cfg.mode = ScorerConfig::Mode::mock;
    } else if (mode == "remote") {
        cfg.mode = ScorerConfig::Mode::remote;
    } else {
        bad(path + ".mode", "must be remote|mock");
    }
    cfg.endpoint = optional_field<std::string>(j, path, "endpoint", "");
    if (cfg.mode == ScorerConfig::Mode::remote && cfg.endpoint.empty()) {
        bad(path + ".endpoint", "required when mode is remote");
    }
    cfg.model_name = optional_field<std::string>(j, path, "model_name", "");
    cfg.timeout = std::chrono::milliseconds(optional_field<int64_t>(j, path, "timeout_ms", 60000));
    if (cfg.timeout.count() < 1) bad(path + ".timeout_ms", "must be >= 1");
    cfg.max_retries = optional_field<int>(j, path, "max_retries", 2);
    if (cfg.max_retries < 0) bad(path + ".max_retries", "must be >= 0");
    cfg.request_concurrency = optional_field<int>(j, path, "request_concurrency", 4);
    if (cfg.request_concurrency < 1) bad(path + ".request_concurrency", "must be >= 1");
    cfg.length_normalized = optional_field<bool>(j, path, "length_normalized", false);
    return cfg;
}

SearchConfig parse_search(const json& j) {
    const std::string path = "search";
    get_object(j, path);
    reject_unknown_keys(j, path, {"alpha", "strategy", "random_seed"});
    SearchConfig cfg;
    cfg.alpha = optional_field<double>(j, path, "alpha", 0.5);
    if (cfg.alpha < 0.0 || cfg.alpha >= 1.0) bad(path + ".alpha", "must be in [0, 1)");
    std::string strategy = optional_field<std::string>(j, path, "strategy", "greedy_likelihood");
    if (strategy == "greedy_likelihood" || strategy == "greedy") {
        cfg.strategy = SearchConfig::Strategy::greedy_likelihood;
    } else if (strategy == "random") {
        cfg.strategy = SearchConfig::Strategy::random;
    } else {
        bad(path + ".strategy", "must be greedy_likelihood|random");
    }
    cfg.random_seed = optional_field<uint64_t>(j, path, "random_seed", 0);
    return cfg;
}

RatioBounds parse_ratio_bounds(const json& j) {
    const std::string path = "ratio_bounds";
    get_object(j, path);
    reject_unknown_keys(j, path, {"min_ratio", "max_ratio"});
    RatioBounds b;
    b.min_ratio = optional_field<double>(j, path, "min_ratio", 0.2);
    b.max_ratio = optional_field<double>(j, path, "max_ratio", 0.95);
    if (!(b.min_ratio > 0.0)) bad(path + ".min_ratio", "must be > 0");
    if (!(b.min_ratio < b.max_ratio)) bad(path + ".max_ratio", "must exceed min_ratio");
    return b;
}

ReflectionConfig parse_reflection(const json& j) {
    const std::string path = "reflection";
    get_object(j, path);
    reject_unknown_keys(j, path, {"keywords"});
    ReflectionConfig cfg;
    if (j.contains("keywords")) {
        auto kws = require<std::vector<std::string>>(j, path, "keywords");
        if (kws.empty()) bad(path + ".keywords", "must be non-empty");
        for (auto& k : kws) {
            if (k.empty()) bad(path + ".keywords", "keywords must be non-empty strings");
            for (char c : k) {
                if (c >= 'A' && c <= 'Z') bad(path + ".keywords", "keywords must be lowercase");
            }
        }
        cfg.keywords = std::move(kws);
    }
    return cfg;
}

PipelinePaths parse_paths(const json& j) {
    const std::string path = "paths";
    get_object(j, path);
    reject_unknown_keys(j, path, {"input", "workdir", "output"});
    PipelinePaths p;
    p.input = require<std::string>(j, path, "input");
    p.workdir = require<std::string>(j, path, "workdir");
    p.output = require<std::string>(j, path, "output");
    return p;
}

}  // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(root, "",
                        {"segmentation", "generator", "scorer", "search", "ratio_bounds",
                         "reflection", "dataset", "paths", "concurrency"});

    PipelineConfig cfg;
    if (root.contains("segmentation")) cfg.segmentation = parse_segmentation(root["segmentation"]);
    cfg.generator = parse_generator(root.contains("generator") ? root["generator"] : json::object(),
                                    cfg.segmentation.len_unit);
    if (root.contains("scorer")) cfg.scorer = parse_scorer(root["scorer"]);
    if (root.contains("search")) cfg.search = parse_search(root["search"]);
    if (root.contains("ratio_bounds")) cfg.ratio_bounds = parse_ratio_bounds(root["ratio_bounds"]);
    if (root.contains("reflection")) cfg.reflection = parse_reflection(root["reflection"]);
    if (root.contains("dataset")) {
        const json& d = get_object(root["dataset"], "dataset");
        reject_unknown_keys(d, "dataset", {"max_chunks"});
        cfg.max_chunks = optional_field<int64_t>(d, "dataset", "max_chunks", 30);
        if (cfg.max_chunks < 1) bad("dataset.max_chunks", "must be >= 1");
    }
    if (!root.contains("paths")) throw ConfigError("paths: required section missing");
    cfg.paths = parse_paths(root["paths"]);
    if (root.contains("concurrency")) {
        const json& c = get_object(root["concurrency"], "concurrency");
        reject_unknown_keys(c, "concurrency", {"max_inflight_requests"});
        cfg.max_inflight_requests = optional_field<int>(c, "concurrency", "max_inflight_requests", 8);
        if (cfg.max_inflight_requests < 1) bad("concurrency.max_inflight_requests", "must be >= 1");
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(const PipelineConfig& cfg) {
    if (cfg.segmentation.min_len < 1) throw ConfigError("segmentation.min_len: must be >= 1");
    if (cfg.generator.num_candidates < 1) {
        throw ConfigError("generator.num_candidates: must be >= 1");
    }
    if (cfg.generator.temperature < 0.0) throw ConfigError("generator.temperature: must be >= 0");
    if (cfg.search.alpha < 0.0 || cfg.search.alpha >= 1.0) {
        throw ConfigError("search.alpha: must be in [0, 1)");
    }
    if (!(cfg.ratio_bounds.min_ratio > 0.0) ||
        !(cfg.ratio_bounds.min_ratio < cfg.ratio_bounds.max_ratio)) {
        throw ConfigError("ratio_bounds: require 0 < min_ratio < max_ratio");
    }
    if (cfg.reflection.keywords.empty()) throw ConfigError("reflection.keywords: must be non-empty");
    if (cfg.paths.input.empty()) throw ConfigError("paths.input: must be non-empty");
    if (cfg.paths.workdir.empty()) throw ConfigError("paths.workdir: must be non-empty");
    if (cfg.paths.output.empty()) throw ConfigError("paths.output: must be non-empty");
}

}  // namespace cotpress
