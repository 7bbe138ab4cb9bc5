#include <doctest.h>

#include <string>

#include "cotpress/answers.hpp"
#include "cotpress/util.hpp"

using namespace cotpress;

TEST_SUITE("answers") {

TEST_CASE("boxed extraction basics") {
    auto a = extract_boxed("**Final Answer**\n\\boxed{D}");
    REQUIRE(a);
    CHECK(a->raw == "D");
    CHECK(a->normalized == "d");

    auto frac = extract_boxed("\\boxed{\\frac{1}{2}}");
    REQUIRE(frac);
    CHECK(frac->raw == "\\frac{1}{2}");
    REQUIRE(frac->numeric);
    CHECK(*frac->numeric == Rational{1, 2});

    CHECK_FALSE(extract_boxed("no answer here"));
}

TEST_CASE("last boxed expression wins") {
    auto a = extract_boxed("first \\boxed{1} then later \\boxed{42}");
    REQUIRE(a);
    CHECK(a->raw == "42");
}

TEST_CASE("unbalanced braces yield nothing") {
    CHECK_FALSE(extract_boxed("\\boxed{\\frac{1}{2}"));
    CHECK_FALSE(extract_boxed("\\boxed{unclosed"));
}

TEST_CASE("letter answers are a fallback only when no box exists") {
    auto letter = extract_boxed("thinking...\nAnswer: D");
    REQUIRE(letter);
    CHECK(letter->normalized == "d");

    // Boxed beats the letter pattern even when the letter comes later.
    auto boxed = extract_boxed("\\boxed{7}\nAnswer: C");
    REQUIRE(boxed);
    CHECK(boxed->raw == "7");

    // Whole-word letters only.
    CHECK_FALSE(extract_boxed("Answer: Dog walked in"));
    auto last = extract_boxed("Answer: A wait no. Answer: B");
    REQUIRE(last);
    CHECK(last->normalized == "b");
}

TEST_CASE("normalization rules") {
    CHECK(normalize_answer(" D. ") == "d");
    CHECK(normalize_answer("x+1") == "x+1");
    CHECK(normalize_answer("  x  +   1 ") == "x + 1");
    CHECK(normalize_answer("\\text{even}") == "even");
    CHECK(normalize_answer("\\left(0, 1\\right)") == "(0, 1)");
    CHECK(normalize_answer("42.") == "42");
    CHECK(normalize_answer("E!") == "e");
}

TEST_CASE("rational parsing is exact") {
    CHECK(parse_rational("10") == Rational{10, 1});
    CHECK(parse_rational("10.0") == Rational{10, 1});
    CHECK(parse_rational("0.5") == Rational{1, 2});
    CHECK(parse_rational("-3/4") == Rational{-3, 4});
    CHECK(parse_rational("\\frac{2}{4}") == Rational{1, 2});
    CHECK(parse_rational("\\frac{-1}{3}") == Rational{-1, 3});
    CHECK_FALSE(parse_rational("x+1"));
    CHECK_FALSE(parse_rational("1/0"));
    CHECK_FALSE(parse_rational("1.2.3"));
    CHECK_FALSE(parse_rational(""));
    // Overflow degrades to non-numeric, never to a wrong value.
    CHECK_FALSE(parse_rational("99999999999999999999999999"));
}

TEST_CASE("answers_match semantics") {
    CHECK(answers_match(make_answer("10"), make_answer("10.0")));
    CHECK(answers_match(make_answer("d"), make_answer("D.")));
    CHECK(answers_match(make_answer("0.5"), make_answer("\\frac{1}{2}")));
    CHECK_FALSE(answers_match(make_answer("20"), make_answer("10")));
    CHECK_FALSE(answers_match(make_answer("x+1"), make_answer("x+2")));
    CHECK(answers_match(make_answer("x + 1"), make_answer("  x +  1")));
}

TEST_CASE("answers_match is reflexive and symmetric") {
    const char* values[] = {"10", "0.5", "d", "x+1", "\\frac{3}{7}", "-2"};
    for (const char* v : values) {
        auto a = make_answer(v);
        CHECK(answers_match(a, a));
        for (const char* w : values) {
            CHECK(answers_match(make_answer(v), make_answer(w)) ==
                  answers_match(make_answer(w), make_answer(v)));
        }
    }
}

TEST_CASE("fuzz: extraction never returns unbalanced content") {
    SplitMix64 rng(0xb0cced);
    const char alphabet[] = "{}\\boxed{ab12";
    for (int i = 0; i < 2000; ++i) {
        std::string text = "\\boxed{";
        size_t len = rng.uniform_below(24);
        for (size_t k = 0; k < len; ++k) {
            text += alphabet[rng.uniform_below(sizeof(alphabet) - 1)];
        }
        auto a = extract_boxed(text);
        if (!a) continue;
        int depth = 0;
        for (char c : a->raw) {
            if (c == '{') ++depth;
            if (c == '}') --depth;
            CHECK(depth >= 0);
        }
        CHECK(depth == 0);
    }
}

}  // TEST_SUITE
