#include <doctest.h>

#include <string>
#include <vector>

#include "cotpress/search.hpp"
#include "search_oracle.hpp"

using namespace cotpress;
using namespace cotpress::testing;

namespace {

SearchConfig greedy_cfg(double alpha) {
    SearchConfig cfg;
    cfg.alpha = alpha;
    cfg.strategy = SearchConfig::Strategy::greedy_likelihood;
    return cfg;
}

std::vector<Candidate> lengths_to_set(const std::vector<int64_t>& lengths) {
    std::vector<Candidate> out;
    for (size_t j = 0; j < lengths.size(); ++j) {
        Candidate c;
        c.chunk_index = 0;
        c.candidate_index = static_cast<int>(j);
        c.text = std::string(static_cast<size_t>(lengths[j]), 'x');
        c.length = lengths[j];
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("length filter keeps the four shortest of eight at alpha 0.5") {
    auto set = lengths_to_set({9, 3, 7, 5, 8, 2, 6, 4});
    auto kept = length_filter(set, 0.5);
    REQUIRE(kept.size() == 4);
    // Shortest lengths {2,3,4,5} live at indices {5,1,7,3}; output preserves
    // candidate_index order.
    CHECK(kept[0].candidate_index == 1);
    CHECK(kept[1].candidate_index == 3);
    CHECK(kept[2].candidate_index == 5);
    CHECK(kept[3].candidate_index == 7);
}

TEST_CASE("alpha zero keeps everything in order") {
    auto set = lengths_to_set({5, 1, 4});
    auto kept = length_filter(set, 0.0);
    REQUIRE(kept.size() == 3);
    for (int j = 0; j < 3; ++j) CHECK(kept[j].candidate_index == j);
}

TEST_CASE("floor guard keeps one candidate even at aggressive alpha") {
    auto set = lengths_to_set({7, 2, 9});
    CHECK(filter_keep_count(3, 0.9) == 1);
    auto kept = length_filter(set, 0.9);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].candidate_index == 1);  // the shortest
}

TEST_CASE("length ties break toward the lowest candidate index") {
    auto set = lengths_to_set({4, 4, 4, 4});
    auto kept = length_filter(set, 0.5);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].candidate_index == 0);
    CHECK(kept[1].candidate_index == 1);
}

TEST_CASE("filter cardinality matches exact integer arithmetic") {
    SplitMix64 rng(0xa1fa);
    const std::pair<double, std::pair<int64_t, int64_t>> alphas[] = {
        {0.0, {0, 4}}, {0.25, {1, 4}}, {0.5, {2, 4}}, {0.9, {9, 10}}};
    for (auto [alpha, frac] : alphas) {
        for (size_t m = 1; m <= 8; ++m) {
            std::vector<int64_t> lengths;
            for (size_t j = 0; j < m; ++j) lengths.push_back(1 + rng.uniform_below(50));
            auto kept = length_filter(lengths_to_set(lengths), alpha);
            CHECK(kept.size() == oracle_keep_count(m, frac.first, frac.second));
        }
    }
}

TEST_CASE("select_chunk picks the shortest under the length-monotone mock") {
    MockScorer scorer;
    auto set = make_candidate_set(0, {"ab", "abc", "a"}, LenUnit::characters);
    auto [best, score] = select_chunk("problem", {}, set, scorer);
    CHECK(best->text == "a");
    // One codepoint at the context-determined loss.
    CHECK(score.token_count == 1);
    CHECK(score.total_logprob ==
          doctest::Approx(-MockScorer::token_loss_for_context("problem")).epsilon(1e-12));
}

TEST_CASE("score ties go to the lowest candidate index") {
    MockScorer scorer;
    auto set = make_candidate_set(0, {"dup", "dup", "dup"});
    auto [best, score] = select_chunk("p", {}, set, scorer);
    CHECK(best->candidate_index == 0);
}

TEST_CASE("singleton filtered set is selected and scored") {
    MockScorer scorer;
    auto set = make_candidate_set(0, {"only"});
    auto [best, score] = select_chunk("p", {}, set, scorer);
    CHECK(best->candidate_index == 0);
    CHECK(score.token_count == 4);
}

TEST_CASE("first position conditions on the problem alone") {
    CHECK(selection_context("prob", {}) == "prob");
    CHECK(selection_context("prob", {"a", "b"}) == "prob\n\na\n\nb");
}

TEST_CASE("greedy equals the exhaustive per-step oracle on a scripted 2x2 grid") {
    MockScorer scorer;
    std::vector<std::vector<Candidate>> sets = {
        make_candidate_set(0, {"alpha beta", "solo"}),
        make_candidate_set(1, {"gamma", "delta epsilon"}),
    };
    auto cs = compress_sample("s1", "problem text", "orig one\n\norig two", sets, greedy_cfg(0.0),
                              scorer, LenUnit::words);
    auto oracle = oracle_greedy("problem text", sets, 0, 4, scorer);
    REQUIRE(cs.selected.size() == oracle.size());
    for (size_t i = 0; i < oracle.size(); ++i) {
        CHECK(cs.selected[i].candidate_index == oracle[i].candidate_index);
        REQUIRE(cs.selected[i].score);
        CHECK(cs.selected[i].score->total_logprob ==
              doctest::Approx(oracle[i].total_logprob).epsilon(1e-12));
    }
    CHECK(cs.compressed_cot == "solo\n\ngamma");
}

TEST_CASE("greedy equals the oracle across randomized small instances") {
    SplitMix64 rng(0x9eed);
    MockScorer scorer;
    for (int trial = 0; trial < 60; ++trial) {
        int m = 1 + static_cast<int>(rng.uniform_below(4));
        int m_cands = 1 + static_cast<int>(rng.uniform_below(4));
        auto sets = random_instance(rng, m, m_cands);
        const std::pair<double, std::pair<int64_t, int64_t>> alphas[] = {{0.0, {0, 4}},
                                                                         {0.5, {2, 4}}};
        for (auto [alpha, frac] : alphas) {
            auto cs = compress_sample("t", "the problem", "orig", sets, greedy_cfg(alpha), scorer,
                                      LenUnit::words);
            auto oracle = oracle_greedy("the problem", sets, frac.first, frac.second, scorer);
            REQUIRE(cs.selected.size() == oracle.size());
            for (size_t i = 0; i < oracle.size(); ++i) {
                CHECK(cs.selected[i].candidate_index == oracle[i].candidate_index);
            }
        }
    }
}

TEST_CASE("per-step dominance holds exactly") {
    SplitMix64 rng(0xd011);
    MockScorer scorer;
    for (int trial = 0; trial < 20; ++trial) {
        auto sets = random_instance(rng, 3, 4);
        auto cs = compress_sample("t", "p", "orig", sets, greedy_cfg(0.25), scorer, LenUnit::words);
        // Rebuild each step's context independently and compare against every
        // filtered sibling.
        std::string context = "p";
        for (size_t i = 0; i < cs.selected.size(); ++i) {
            auto filtered = oracle_filter(sets[i], 1, 4);
            double selected_score = scorer.score(context, cs.selected[i].text).total_logprob;
            for (const auto& cand : filtered) {
                CHECK(selected_score >= scorer.score(context, cand.text).total_logprob);
            }
            context += "\n\n" + trim(cs.selected[i].text);
        }
    }
}

TEST_CASE("position count is preserved") {
    SplitMix64 rng(0xc0de);
    MockScorer scorer;
    for (int m : {1, 2, 5, 9}) {
        auto sets = random_instance(rng, m, 3);
        auto cs = compress_sample("t", "p", "orig", sets, greedy_cfg(0.5), scorer, LenUnit::words);
        CHECK(cs.selected.size() == static_cast<size_t>(m));
    }
}

TEST_CASE("random strategy is deterministic per seed and samples the filtered set") {
    SplitMix64 rng(0xfeed);
    auto sets = random_instance(rng, 4, 8);
    MockScorer scorer;
    SearchConfig cfg;
    cfg.strategy = SearchConfig::Strategy::random;
    cfg.alpha = 0.5;
    cfg.random_seed = 1234;
    auto a = compress_sample("sid", "p", "orig", sets, cfg, scorer, LenUnit::words);
    auto b = compress_sample("sid", "p", "orig", sets, cfg, scorer, LenUnit::words);
    CHECK(a.compressed_cot == b.compressed_cot);
    REQUIRE(a.selected.size() == b.selected.size());
    for (size_t i = 0; i < a.selected.size(); ++i) {
        CHECK(a.selected[i].candidate_index == b.selected[i].candidate_index);
        CHECK_FALSE(a.selected[i].score);  // random never scores
        // Draws come from the filtered subset only.
        auto filtered = oracle_filter(sets[i], 2, 4);
        bool in_filtered = false;
        for (const auto& cand : filtered) {
            if (cand.candidate_index == a.selected[i].candidate_index) in_filtered = true;
        }
        CHECK(in_filtered);
    }

    cfg.random_seed = 1235;
    auto c = compress_sample("sid", "p", "orig", sets, cfg, scorer, LenUnit::words);
    bool any_diff = false;
    for (size_t i = 0; i < a.selected.size(); ++i) {
        if (c.selected[i].candidate_index != a.selected[i].candidate_index) any_diff = true;
    }
    CHECK(any_diff);  // different seed, different draws (8 candidates x 4 positions)
}

TEST_CASE("all-fallback candidates reproduce the original") {
    // Clean source: paragraphs separated by exactly one boundary, no stray
    // whitespace, so the canonical join reproduces it byte for byte.
    std::string p1 = "first paragraph with several words here";
    std::string p2 = "second paragraph again with words";
    std::string original = p1 + "\n\n" + p2;

    std::vector<std::vector<Candidate>> sets;
    for (int i = 0; i < 2; ++i) {
        Candidate c;
        c.chunk_index = i;
        c.candidate_index = 0;
        c.text = i == 0 ? p1 : p2;
        c.length = unit_length(c.text, LenUnit::words);
        c.origin = Candidate::Origin::fallback_original;
        sets.push_back({c});
    }
    MockScorer scorer;
    auto cs = compress_sample("s", "p", original, sets, greedy_cfg(0.0), scorer, LenUnit::words);
    CHECK(cs.compressed_cot == original);
    CHECK(cs.compression_ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("with alpha zero and the mock scorer greedy picks the per-position shortest") {
    SplitMix64 rng(0x51de);
    MockScorer scorer;
    for (int trial = 0; trial < 20; ++trial) {
        auto sets = random_instance(rng, 3, 4, LenUnit::characters);
        auto cs = compress_sample("t", "p", "orig", sets, greedy_cfg(0.0), scorer,
                                  LenUnit::characters);
        for (size_t i = 0; i < sets.size(); ++i) {
            int64_t min_cp = INT64_MAX;
            for (const auto& cand : sets[i]) {
                min_cp = std::min(min_cp, count_codepoints(cand.text));
            }
            CHECK(count_codepoints(cs.selected[i].text) == min_cp);
        }
    }
}

TEST_CASE("concurrent candidate scoring selects exactly what serial does") {
    SplitMix64 rng(0xcc0c);
    MockScorer scorer;
    for (int trial = 0; trial < 10; ++trial) {
        auto sets = random_instance(rng, 3, 6);
        SearchConfig serial = greedy_cfg(0.25);
        SearchConfig parallel = greedy_cfg(0.25);
        parallel.scoring_concurrency = 6;
        auto a = compress_sample("t", "p", "orig", sets, serial, scorer, LenUnit::words);
        auto b = compress_sample("t", "p", "orig", sets, parallel, scorer, LenUnit::words);
        REQUIRE(a.selected.size() == b.selected.size());
        for (size_t i = 0; i < a.selected.size(); ++i) {
            CHECK(a.selected[i].candidate_index == b.selected[i].candidate_index);
        }
        CHECK(a.compressed_cot == b.compressed_cot);
    }
}

TEST_CASE("length-normalized selection compares mean instead of sum") {
    MockScorer scorer;
    // Same context for every sibling means identical per-token loss, so the
    // mean ties while the sum favors the shortest.
    auto set = make_candidate_set(0, {"aaa", "z"}, LenUnit::characters);
    auto [by_sum, s1] = select_chunk("p", {}, set, scorer, /*length_normalized=*/false);
    CHECK(by_sum->candidate_index == 1);
    auto [by_mean, s2] = select_chunk("p", {}, set, scorer, /*length_normalized=*/true);
    CHECK(by_mean->candidate_index == 0);  // tie resolves to the lowest index
}

TEST_CASE("candidate set count must match chunk count upstream") {
    MockScorer scorer;
    std::vector<std::vector<Candidate>> sets;  // m == 0
    auto cs = compress_sample("s", "p", "nonempty original", sets, greedy_cfg(0.0), scorer,
                              LenUnit::words);
    CHECK(cs.selected.empty());
    CHECK(cs.compressed_cot.empty());
}

}  // TEST_SUITE
