#include "cotpress/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace cotpress {

namespace {

// Word characters: ASCII letters/digits, plus any non-ASCII byte so that
// keywords embedded in multibyte words do not count.
bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

int64_t count_reflections(std::string_view text, const ReflectionConfig& cfg) {
    if (cfg.keywords.empty()) throw ConfigError("reflection.keywords must be non-empty");
    std::string lower = ascii_lower(text);
    int64_t total = 0;
    for (const auto& kw : cfg.keywords) {
        if (kw.empty()) throw ConfigError("reflection keywords must be non-empty strings");
        size_t pos = 0;
        while ((pos = lower.find(kw, pos)) != std::string::npos) {
            bool left_ok = pos == 0 || !is_word_char(static_cast<unsigned char>(lower[pos - 1]));
            size_t end = pos + kw.size();
            bool right_ok =
                end >= lower.size() || !is_word_char(static_cast<unsigned char>(lower[end]));
            if (left_ok && right_ok) ++total;
            ++pos;
        }
    }
    return total;
}

LengthStats length_stats(const std::vector<std::string>& texts,
                         const std::optional<std::vector<bool>>& correct_flags, LenUnit unit) {
    if (correct_flags && correct_flags->size() != texts.size()) {
        throw StructuralError("length_stats: flags size " + std::to_string(correct_flags->size()) +
                              " does not match texts size " + std::to_string(texts.size()));
    }
    LengthStats st;
    st.unit = unit;
    st.count = static_cast<int64_t>(texts.size());
    int64_t sum = 0;
    int64_t valid_sum = 0;
    for (size_t i = 0; i < texts.size(); ++i) {
        int64_t len = unit_length(texts[i], unit);
        sum += len;
        if (correct_flags && (*correct_flags)[i]) {
            valid_sum += len;
            ++st.valid_count;
        }
    }
    if (st.count > 0) st.avg_len = static_cast<double>(sum) / static_cast<double>(st.count);
    if (correct_flags && st.valid_count > 0) {
        st.avg_valid_len = static_cast<double>(valid_sum) / static_cast<double>(st.valid_count);
    }
    return st;
}

CoherenceReport coherence_eval(const std::vector<CoherenceItem>& items, Scorer& scorer) {
    CoherenceReport report;
    double mean_sum = 0.0;
    for (const auto& item : items) {
        try {
            ScoreResult r = scorer.score(item.context, item.text);
            CoherenceEntry e;
            e.sample_id = item.sample_id;
            e.mean_loss = mean_token_loss(r);
            e.token_count = r.token_count;
            e.token_losses = std::move(r.token_losses);
            mean_sum += e.mean_loss;
            report.per_text.push_back(std::move(e));
        } catch (const std::exception& ex) {
            report.skipped.emplace_back(item.sample_id, ex.what());
        }
    }
    if (!report.per_text.empty()) {
        report.corpus_mean = mean_sum / static_cast<double>(report.per_text.size());
    }
    return report;
}

void write_loss_curves_csv(const CoherenceReport& report, const std::filesystem::path& out) {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw StructuralError("cannot write loss curves: " + out.string());
    f << "sample_id,position,loss\n";
    for (const auto& e : report.per_text) {
        for (size_t i = 0; i < e.token_losses.size(); ++i) {
            f << e.sample_id << ',' << i << ',' << e.token_losses[i] << '\n';
        }
    }
}

CompressionReport compression_report(const std::map<std::string, std::string>& original_by_id,
                                     const std::map<std::string, std::string>& compressed_by_id,
                                     LenUnit unit, const ReflectionConfig& reflection) {
    for (const auto& [id, _] : compressed_by_id) {
        if (!original_by_id.count(id)) {
            throw StructuralError("compression_report: compressed sample '" + id +
                                  "' has no original");
        }
    }
    for (const auto& [id, _] : original_by_id) {
        if (!compressed_by_id.count(id)) {
            throw StructuralError("compression_report: original sample '" + id +
                                  "' has no compressed counterpart");
        }
    }
    CompressionReport report;
    double ratio_sum = 0.0;
    double before_sum = 0.0;
    double after_sum = 0.0;
    for (const auto& [id, original] : original_by_id) {
        const std::string& compressed = compressed_by_id.at(id);
        int64_t orig_len = unit_length(original, unit);
        if (orig_len <= 0) {
            throw StructuralError("compression_report: original '" + id + "' has zero length");
        }
        SampleCompressionDelta d;
        d.sample_id = id;
        d.ratio = static_cast<double>(unit_length(compressed, unit)) /
                  static_cast<double>(orig_len);
        d.reflections_before = count_reflections(original, reflection);
        d.reflections_after = count_reflections(compressed, reflection);
        ratio_sum += d.ratio;
        before_sum += static_cast<double>(d.reflections_before);
        after_sum += static_cast<double>(d.reflections_after);
        report.per_sample.push_back(std::move(d));
    }
    auto n = static_cast<double>(report.per_sample.size());
    if (n > 0) {
        report.mean_ratio = ratio_sum / n;
        report.mean_reflections_before = before_sum / n;
        report.mean_reflections_after = after_sum / n;
    }
    return report;
}

}  // namespace cotpress
