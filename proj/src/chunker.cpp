#include "cotpress/chunker.hpp"

namespace cotpress {

namespace {

// Length in bytes of a newline unit ("\n" or "\r\n") at pos, else 0.
size_t newline_unit_len(std::string_view text, size_t pos) {
    if (pos >= text.size()) return 0;
    if (text[pos] == '\n') return 1;
    if (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') return 2;
    return 0;
}

// Byte length of a double-newline boundary starting at pos, else 0.
size_t boundary_len(std::string_view text, size_t pos) {
    size_t a = newline_unit_len(text, pos);
    if (a == 0) return 0;
    size_t b = newline_unit_len(text, pos + a);
    if (b == 0) return 0;
    return a + b;
}

// Single forward pass over text; emit(start, end, core_len, sep_len) is
// called once per chunk.
template <typename Emit>
void scan(std::string_view text, const SegmentationConfig& cfg, Emit&& emit) {
    if (text.empty()) return;
    size_t chunk_start = 0;
    size_t pos = 0;
    int64_t units = 0;  // unit count of [chunk_start, pos)
    bool in_word = false;
    while (pos < text.size()) {
        size_t sep = boundary_len(text, pos);
        if (sep > 0 && units >= cfg.min_len) {
            emit(chunk_start, pos + sep, units, sep);
            chunk_start = pos + sep;
            pos = chunk_start;
            units = 0;
            in_word = false;
            continue;
        }
        char c = text[pos];
        if (cfg.len_unit == LenUnit::characters) {
            if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++units;
        } else {
            bool ws = is_ascii_space(c);
            if (!ws && !in_word) ++units;
            in_word = !ws;
        }
        ++pos;
    }
    if (chunk_start < text.size()) {
        emit(chunk_start, text.size(), units, 0);
    }
}

}  // namespace

std::vector<Chunk> segment(std::string_view text, const SegmentationConfig& cfg) {
    if (cfg.min_len < 1) throw ConfigError("segmentation.min_len must be >= 1");
    std::vector<Chunk> chunks;
    scan(text, cfg, [&](size_t start, size_t end, int64_t core_len, size_t sep_len) {
        Chunk c;
        c.index = static_cast<int>(chunks.size());
        c.text = std::string(text.substr(start, end - start));
        c.core_len = core_len;
        c.start = start;
        c.end = end;
        c.sep_len = sep_len;
        chunks.push_back(std::move(c));
    });
    return chunks;
}

std::string reassemble(const std::vector<Chunk>& chunks) {
    std::string out;
    size_t total = 0;
    for (const auto& c : chunks) total += c.text.size();
    out.reserve(total);
    for (size_t i = 0; i < chunks.size(); ++i) {
        if (chunks[i].index != static_cast<int>(i)) {
            throw StructuralError("reassemble: chunk indices must be consecutive from 0, got " +
                                  std::to_string(chunks[i].index) + " at position " +
                                  std::to_string(i));
        }
        out += chunks[i].text;
    }
    return out;
}

int64_t chunk_count(std::string_view text, const SegmentationConfig& cfg) {
    if (cfg.min_len < 1) throw ConfigError("segmentation.min_len must be >= 1");
    int64_t n = 0;
    scan(text, cfg, [&](size_t, size_t, int64_t, size_t) { ++n; });
    return n;
}

}  // namespace cotpress
