#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cotpress {

// ============================================================================
// Error types
// ============================================================================
// Structural/config/IO problems are exceptions; "absence" results (no boxed
// answer, no <start>/<end> pair) are optionals at the call site instead.

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Transport-level backend failure (connect/timeout/HTTP status/bad body).
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A whole chunk failed generation (all candidate slots unreachable).
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ScoringError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ============================================================================
// Length units
// ============================================================================

// "words" = maximal runs of non-whitespace bytes; "characters" = unicode
// scalar values (UTF-8 codepoints).
enum class LenUnit { words, characters };

std::string to_string(LenUnit u);
LenUnit len_unit_from_string(std::string_view s);

// Number of UTF-8 codepoints in s (continuation bytes are not counted).
int64_t count_codepoints(std::string_view s);

// Length of s in the given unit.
int64_t unit_length(std::string_view s, LenUnit unit);

bool is_ascii_space(char c);

// Strip ASCII whitespace from both ends.
std::string_view trim_view(std::string_view s);
std::string trim(std::string_view s);

// ============================================================================
// Hashing and seeded randomness
// ============================================================================

// FNV-1a 64-bit. This is the stable string hash used by the mock scorer and
// the replay fixture keys; tests freeze values computed from it.
constexpr uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 14695981039346656037ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

// SplitMix64. Self-contained so seeded runs are byte-identical across
// platforms and standard libraries (std distributions are not portable).
struct SplitMix64 {
    uint64_t state = 0;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n) via rejection sampling; n must be > 0.
    uint64_t uniform_below(uint64_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v = next();
        while (v >= limit) v = next();
        return v % n;
    }
};

// ============================================================================
// Small file helpers
// ============================================================================

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

// Splits a file into complete lines (terminated by '\n'). A trailing fragment
// with no newline is dropped and its start offset reported via clean_bytes,
// so a killed writer's partial last line never poisons a resume.
std::vector<std::string> read_complete_lines(const std::filesystem::path& p,
                                             uint64_t* clean_bytes = nullptr);

}  // namespace cotpress
