#include "cotpress/util.hpp"

#include <fstream>
#include <sstream>

namespace cotpress {

std::string to_string(LenUnit u) {
    return u == LenUnit::words ? "words" : "characters";
}

LenUnit len_unit_from_string(std::string_view s) {
    if (s == "words") return LenUnit::words;
    if (s == "characters") return LenUnit::characters;
    throw ConfigError("unknown len_unit: '" + std::string(s) + "' (expected words|characters)");
}

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

int64_t count_codepoints(std::string_view s) {
    int64_t n = 0;
    for (char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

int64_t unit_length(std::string_view s, LenUnit unit) {
    if (unit == LenUnit::characters) return count_codepoints(s);
    int64_t words = 0;
    bool in_word = false;
    for (char c : s) {
        bool ws = is_ascii_space(c);
        if (!ws && !in_word) ++words;
        in_word = !ws;
    }
    return words;
}

std::string_view trim_view(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && is_ascii_space(s[b])) ++b;
    while (e > b && is_ascii_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

std::string trim(std::string_view s) {
    return std::string(trim_view(s));
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw StructuralError("cannot open file for reading: " + p.string());
    std::ostringstream out;
    out << in.rdbuf();
    return std::move(out).str();
}

void write_file(const std::filesystem::path& p, std::string_view content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw StructuralError("cannot open file for writing: " + p.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw StructuralError("write failed: " + p.string());
}

std::vector<std::string> read_complete_lines(const std::filesystem::path& p, uint64_t* clean_bytes) {
    std::vector<std::string> lines;
    if (clean_bytes) *clean_bytes = 0;
    if (!std::filesystem::exists(p)) return lines;
    std::string data = read_file(p);
    size_t start = 0;
    while (true) {
        size_t nl = data.find('\n', start);
        if (nl == std::string::npos) break;
        lines.emplace_back(data.substr(start, nl - start));
        start = nl + 1;
    }
    if (clean_bytes) *clean_bytes = start;
    return lines;
}

}  // namespace cotpress
