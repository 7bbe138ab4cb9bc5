#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cotpress {

// ============================================================================
// Final-answer extraction and comparison
// ============================================================================

// Exact rational with canonical sign/gcd normalization. Parsing that would
// overflow int64 simply yields "not numeric" rather than an approximation.
struct Rational {
    int64_t num = 0;
    int64_t den = 1;

    friend bool operator==(const Rational&, const Rational&) = default;
};

struct ExtractedAnswer {
    std::string raw;         // inner boxed content, brace-balanced
    std::string normalized;  // whitespace-collapsed canonical string
    std::optional<Rational> numeric;
};

// Finds the LAST "\boxed{" and returns its brace-balanced content. CoT traces
// often box intermediate results; the final answer is conventionally last.
// When no boxed expression exists, falls back to the last "Answer: <LETTER>"
// match (multiple-choice style). Unbalanced braces yield nullopt.
std::optional<ExtractedAnswer> extract_boxed(std::string_view text);

// Trims, collapses internal whitespace, strips one layer of \text{...} and
// \left/\right, drops trailing punctuation, lowercases single-letter answers.
std::string normalize_answer(std::string_view raw);

// Exact rational when the normalized form is an integer, decimal, "a/b" or
// "\frac{a}{b}".
std::optional<Rational> parse_rational(std::string_view normalized);

// Builds the full answer value (normalized + numeric) from raw content.
ExtractedAnswer make_answer(std::string_view raw);

// Numeric equality when both sides parse, else normalized string equality.
bool answers_match(const ExtractedAnswer& a, const ExtractedAnswer& b);

}  // namespace cotpress
