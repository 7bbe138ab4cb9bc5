#include "cotpress/answers.hpp"

#include <cctype>
#include <cstdlib>
#include <numeric>

#include "cotpress/util.hpp"

namespace cotpress {

namespace {

constexpr std::string_view kBoxed = "\\boxed{";

// Content between the brace opened at open_pos and its balanced closer.
std::optional<std::string> balanced_content(std::string_view text, size_t open_pos) {
    int depth = 1;
    for (size_t i = open_pos + 1; i < text.size(); ++i) {
        if (text[i] == '{') {
            ++depth;
        } else if (text[i] == '}') {
            --depth;
            if (depth == 0) return std::string(text.substr(open_pos + 1, i - open_pos - 1));
        }
    }
    return std::nullopt;  // ran out of text before balancing
}

// Last "Answer: <LETTER>" match where the letter is a whole word.
std::optional<std::string> last_letter_answer(std::string_view text) {
    constexpr std::string_view kTag = "Answer:";
    std::optional<std::string> found;
    size_t pos = 0;
    while ((pos = text.find(kTag, pos)) != std::string_view::npos) {
        size_t i = pos + kTag.size();
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        if (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) {
            bool bounded = i + 1 >= text.size() ||
                           !std::isalnum(static_cast<unsigned char>(text[i + 1]));
            if (bounded) found = std::string(1, text[i]);
        }
        pos += kTag.size();
    }
    return found;
}

// Removes every "\left" / "\right" token.
std::string strip_left_right(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        if (s.compare(i, 5, "\\left") == 0) {
            i += 5;
        } else if (s.compare(i, 6, "\\right") == 0) {
            i += 6;
        } else {
            out += s[i++];
        }
    }
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool prev_space = false;
    for (char c : s) {
        if (is_ascii_space(c)) {
            prev_space = true;
        } else {
            if (prev_space && !out.empty()) out += ' ';
            out += c;
            prev_space = false;
        }
    }
    return out;
}

bool parse_int64(std::string_view s, int64_t* out) {
    if (s.empty()) return false;
    errno = 0;
    std::string buf(s);
    char* end = nullptr;
    long long v = std::strtoll(buf.c_str(), &end, 10);
    if (errno == ERANGE || end != buf.c_str() + buf.size()) return false;
    *out = v;
    return true;
}

std::optional<Rational> make_rational(int64_t num, int64_t den) {
    if (den == 0) return std::nullopt;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

// "123", "-4.25", ".5" to exact rational; rejects anything else.
std::optional<Rational> parse_decimal(std::string_view s) {
    if (s.find('.') == std::string_view::npos) {
        int64_t v;
        if (!parse_int64(s, &v)) return std::nullopt;
        return make_rational(v, 1);
    }
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s = s.substr(1);
    }
    size_t dot = s.find('.');
    std::string_view int_digits = s.substr(0, dot);
    std::string_view frac_digits = s.substr(dot + 1);
    if (frac_digits.empty() || frac_digits.size() > 18) return std::nullopt;
    if (int_digits.empty() && frac_digits.empty()) return std::nullopt;
    for (char c : int_digits)
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    for (char c : frac_digits)
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    int64_t whole = 0;
    if (!int_digits.empty() && !parse_int64(int_digits, &whole)) return std::nullopt;
    int64_t frac = 0;
    if (!parse_int64(frac_digits, &frac)) return std::nullopt;
    int64_t den = 1;
    for (size_t i = 0; i < frac_digits.size(); ++i) {
        if (den > INT64_MAX / 10) return std::nullopt;
        den *= 10;
    }
    if (whole > (INT64_MAX - frac) / den) return std::nullopt;
    int64_t num = whole * den + frac;
    return make_rational(neg ? -num : num, den);
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view s) {
    if (s.empty()) return std::nullopt;
    // \frac{a}{b}
    if (s.compare(0, 6, "\\frac{") == 0) {
        auto a = balanced_content(s, 5);
        if (!a) return std::nullopt;
        size_t after = 5 + 1 + a->size() + 1;
        if (after >= s.size() || s[after] != '{') return std::nullopt;
        auto b = balanced_content(s, after);
        if (!b) return std::nullopt;
        if (after + 1 + b->size() + 1 != s.size()) return std::nullopt;
        auto ra = parse_decimal(*a);
        auto rb = parse_decimal(*b);
        if (!ra || !rb || rb->num == 0) return std::nullopt;
        // (a.num/a.den) / (b.num/b.den)
        return make_rational(ra->num * rb->den, ra->den * rb->num);
    }
    // a/b
    size_t slash = s.find('/');
    if (slash != std::string_view::npos) {
        auto ra = parse_decimal(s.substr(0, slash));
        auto rb = parse_decimal(s.substr(slash + 1));
        if (!ra || !rb || rb->num == 0) return std::nullopt;
        return make_rational(ra->num * rb->den, ra->den * rb->num);
    }
    return parse_decimal(s);
}

std::string normalize_answer(std::string_view raw) {
    std::string s = trim(raw);
    s = strip_left_right(s);
    // One layer of \text{...} wrapping the whole answer.
    if (s.rfind("\\text{", 0) == 0) {
        auto inner = balanced_content(s, 5);
        if (inner && 5 + 1 + inner->size() + 1 == s.size()) s = trim(*inner);
    }
    s = collapse_whitespace(s);
    while (!s.empty()) {
        char c = s.back();
        if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?') {
            s.pop_back();
            while (!s.empty() && is_ascii_space(s.back())) s.pop_back();
        } else {
            break;
        }
    }
    if (s.size() == 1 && std::isalpha(static_cast<unsigned char>(s[0]))) {
        s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    }
    return s;
}

ExtractedAnswer make_answer(std::string_view raw) {
    ExtractedAnswer a;
    a.raw = std::string(raw);
    a.normalized = normalize_answer(raw);
    a.numeric = parse_rational(a.normalized);
    return a;
}

std::optional<ExtractedAnswer> extract_boxed(std::string_view text) {
    size_t pos = text.rfind(kBoxed);
    if (pos != std::string_view::npos) {
        auto content = balanced_content(text, pos + kBoxed.size() - 1);
        if (!content) return std::nullopt;  // unbalanced: no valid answer
        return make_answer(*content);
    }
    if (auto letter = last_letter_answer(text)) return make_answer(*letter);
    return std::nullopt;
}

bool answers_match(const ExtractedAnswer& a, const ExtractedAnswer& b) {
    if (a.numeric && b.numeric) return *a.numeric == *b.numeric;
    return a.normalized == b.normalized;
}

}  // namespace cotpress
