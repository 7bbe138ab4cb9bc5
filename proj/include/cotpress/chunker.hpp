#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cotpress/util.hpp"

namespace cotpress {

// ============================================================================
// Chunk segmentation
// ============================================================================
// A chunk closes at the first double-newline boundary reached once the
// running chunk holds at least min_len units; everything after the last
// qualifying boundary becomes the final chunk regardless of its length.
// The separator bytes belong to the END of the chunk they close, so
// concatenating chunk texts reproduces the source byte-for-byte.
//
// For boundary detection a "newline unit" is "\n" or "\r\n"; a boundary is
// two consecutive newline units. Stored text keeps the original bytes
// untouched ("\r\n\r\n" stays "\r\n\r\n").

struct SegmentationConfig {
    int64_t min_len = 50;
    LenUnit len_unit = LenUnit::words;
    std::optional<int64_t> max_chunks_hint;  // reporting only
};

struct Chunk {
    int index = 0;         // 0-based position within the source
    std::string text;      // exact source substring, trailing separator included
    int64_t core_len = 0;  // length of text minus trailing separator, in len_unit
    size_t start = 0;      // byte offsets into the source: [start, end)
    size_t end = 0;
    size_t sep_len = 0;    // bytes of trailing separator (0 for the final chunk)

    // Text with the trailing boundary separator stripped.
    std::string_view core_text() const {
        return std::string_view(text).substr(0, text.size() - sep_len);
    }
};

// Segment text into chunks. Pure; empty text yields an empty list.
std::vector<Chunk> segment(std::string_view text, const SegmentationConfig& cfg);

// Concatenate chunk texts. Throws StructuralError unless indices are
// consecutive starting at 0.
std::string reassemble(const std::vector<Chunk>& chunks);

// Number of chunks segment() would produce, without materializing bodies.
int64_t chunk_count(std::string_view text, const SegmentationConfig& cfg);

}  // namespace cotpress
