#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "mqrank/text_features.hpp"

using namespace mqrank;

namespace {

using Tokens = std::vector<std::string>;
using oracle::oracle_bm25;
using oracle::oracle_lmir;
using oracle::oracle_rbo;

Tokens random_doc(gen::Rng& rng, int vocab, int max_len) {
    Tokens out;
    const int len = gen::uniform(rng, 1, max_len);
    for (int i = 0; i < len; ++i) out.push_back("w" + std::to_string(gen::uniform(rng, 0, vocab - 1)));
    return out;
}

TokenizedDocument as_doc(const Tokens& t) {
    std::string text;
    for (const auto& x : t) text += x + " ";
    return tokenize(text);
}

}  // namespace

TEST_CASE("tokenize") {
    CHECK(tokenize("Dog dogs, DOG!").tokens == Tokens{"dog", "dogs", "dog"});
    CHECK(tokenize("").tokens.empty());
    CHECK(tokenize("a-b c").tokens == Tokens{"a", "b", "c"});
    CHECK(tokenize("Caf\xc3\xa9 ol\xc3\xa9").tokens == Tokens{"caf\xc3\xa9", "ol\xc3\xa9"});
    CHECK(tokenize("x1 2y").tokens == Tokens{"x1", "2y"});
    CHECK(tokenize("dog dog cat").count("dog") == 2);
    CHECK(unique_terms(tokenize("b a b c a")) == Tokens{"b", "a", "c"});
}

TEST_CASE("stopword files") {
    const auto s = load_stopwords(std::string(MQRANK_FIXTURES) + "/stopwords.txt");
    CHECK(s == Stopwords{"the", "of", "and", "a"});
    CHECK_THROWS_AS(load_stopwords(std::string(MQRANK_FIXTURES) + "/missing.txt"), InputError);
    CHECK(default_stopwords().count("the"));
}

TEST_CASE("feature examples") {
    const auto doc = tokenize("cat cat dog");
    const CorpusStats stats({doc});
    const auto f = compute_features(doc, {"cat"}, stats, default_stopwords());
    CHECK(f.tf == 2);
    CHECK(f.normtf == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(f.len == 3);

    CHECK(compute_features(tokenize("x x x x"), {"x"}, stats, default_stopwords()).ent == 0);
    CHECK(compute_features(tokenize("a1 b1 c1 d1"), {"x"}, stats, default_stopwords()).ent ==
          doctest::Approx(2.0).epsilon(1e-12));

    const Stopwords stop{"the", "of", "and", "a"};
    const auto g = compute_features(tokenize("the cat of the hat"), {"cat"}, stats, stop);
    CHECK(g.fracstop == doctest::Approx(0.6));
    CHECK(g.stopcover == doctest::Approx(0.5));

    const auto empty = compute_features(tokenize(""), {"cat"}, stats, stop);
    CHECK(empty.normtf == 0);
    CHECK(empty.fracstop == 0);
    CHECK(empty.ent == 0);
    CHECK_THROWS_AS(compute_features(doc, {"cat"}, stats, Stopwords{}), DomainError);
}

TEST_CASE("duplicate query terms count once") {
    const auto doc = tokenize("cat cat dog");
    const CorpusStats stats({doc, tokenize("dog bird")});
    const auto a = compute_features(doc, {"cat", "cat"}, stats, default_stopwords());
    const auto b = compute_features(doc, {"cat"}, stats, default_stopwords());
    CHECK(a.tf == b.tf);
    CHECK(a.bm25 == b.bm25);
    CHECK(a.lmir == b.lmir);
}

TEST_CASE("bm25 and lmir match direct computation") {
    gen::Rng rng(51);
    for (int it = 0; it < 300; ++it) {
        std::vector<Tokens> corpus;
        const int docs = gen::uniform(rng, 1, 8);
        for (int i = 0; i < docs; ++i) corpus.push_back(random_doc(rng, 12, 20));
        std::vector<TokenizedDocument> tokenized;
        for (const auto& d : corpus) tokenized.push_back(as_doc(d));
        const CorpusStats stats(tokenized);
        const auto query = random_doc(rng, 15, 4);
        const std::size_t k = static_cast<std::size_t>(gen::uniform(rng, 0, docs - 1));
        const auto f = compute_features(tokenized[k], query, stats, default_stopwords());
        CHECK(f.bm25 == doctest::Approx(oracle_bm25(corpus[k], query, corpus)).epsilon(1e-9));
        CHECK(f.lmir == doctest::Approx(oracle_lmir(corpus[k], query, corpus)).epsilon(1e-9));
    }
}

TEST_CASE("property: scores rise with query term counts") {
    gen::Rng rng(52);
    for (int it = 0; it < 200; ++it) {
        auto base = random_doc(rng, 10, 15);
        const std::string q = "w" + std::to_string(gen::uniform(rng, 0, 9));
        auto more = base;
        for (auto& t : more) {
            if (t != q) {
                t = q;
                break;
            }
        }
        if (more == base) continue;
        const std::vector<Tokens> corpus{base, random_doc(rng, 10, 15), random_doc(rng, 10, 15)};
        std::vector<TokenizedDocument> tokenized;
        for (const auto& d : corpus) tokenized.push_back(as_doc(d));
        const CorpusStats stats(tokenized);
        const auto a = compute_features(as_doc(base), {q}, stats, default_stopwords());
        const auto b = compute_features(as_doc(more), {q}, stats, default_stopwords());
        CHECK(b.bm25 > a.bm25);
        CHECK(b.lmir > a.lmir);
    }
}

TEST_CASE("property: entropy ignores token order") {
    gen::Rng rng(53);
    for (int it = 0; it < 100; ++it) {
        auto d = random_doc(rng, 8, 30);
        const auto e1 = compute_features(as_doc(d), {"w0"}, CorpusStats({as_doc(d)}), default_stopwords()).ent;
        std::shuffle(d.begin(), d.end(), rng);
        const auto e2 = compute_features(as_doc(d), {"w0"}, CorpusStats({as_doc(d)}), default_stopwords()).ent;
        CHECK(e1 == doctest::Approx(e2).epsilon(1e-12));
    }
}

TEST_CASE("tfidf cosine") {
    const auto a = tokenize("red green blue");
    const auto b = tokenize("cyan magenta");
    const auto aa = tokenize("red green blue red green blue");
    const CorpusStats stats({a, b, aa});
    CHECK(tfidf_cosine(a, a, stats) == doctest::Approx(1.0));
    CHECK(tfidf_cosine(a, b, stats) == 0.0);
    CHECK(tfidf_cosine(a, aa, stats) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tfidf_cosine(a, tokenize(""), stats) == 0.0);

    const auto v = tfidf_vector(tokenize("red red"), stats);
    CHECK(v.at("red") == doctest::Approx(2 * (std::log(4.0 / 3.0) + 1)));
    const auto c = centroid({SparseVector{{"x", 1}}, SparseVector{{"x", 3}, {"y", 2}}});
    CHECK(c.at("x") == 2);
    CHECK(c.at("y") == 1);
    CHECK(centroid({}).empty());
}

TEST_CASE("property: tfidf cosine bounds, symmetry and scale") {
    gen::Rng rng(54);
    for (int it = 0; it < 200; ++it) {
        const auto x = random_doc(rng, 10, 12);
        const auto y = random_doc(rng, 10, 12);
        auto xx = x;
        xx.insert(xx.end(), x.begin(), x.end());
        const CorpusStats stats({as_doc(x), as_doc(y), as_doc(random_doc(rng, 10, 12))});
        const double s = tfidf_cosine(as_doc(x), as_doc(y), stats);
        CHECK(s >= 0);
        CHECK(s <= 1 + 1e-12);
        CHECK(s == doctest::Approx(tfidf_cosine(as_doc(y), as_doc(x), stats)).epsilon(1e-12));
        CHECK(tfidf_cosine(as_doc(xx), as_doc(y), stats) == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("rbo examples") {
    const std::vector<int> a{1, 2, 3, 4};
    CHECK(rbo(a, a, 0.9) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rbo(a, std::vector<int>{5, 6, 7}, 0.9) == 0.0);
    CHECK(rbo(std::vector<int>{1, 2}, std::vector<int>{2, 1}, 0.9) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(rbo(std::vector<int>{}, std::vector<int>{}, 0.9) == 1.0);
    CHECK(rbo(std::vector<int>{}, a, 0.9) == 0.0);
    CHECK_THROWS_AS(rbo(std::vector<int>{1, 1}, a, 0.9), InputError);
    CHECK_THROWS_AS(rbo(a, a, 1.0), DomainError);
    CHECK(rbo(Tokens{"x", "y"}, Tokens{"x", "y"}, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("rbo matches the summation oracle") {
    gen::Rng rng(55);
    for (int it = 0; it < 200; ++it) {
        const int universe = gen::uniform(rng, 1, 12);
        const auto a = gen::ranking(rng, gen::uniform(rng, 0, universe), universe);
        const auto b = gen::ranking(rng, gen::uniform(rng, 0, universe), universe);
        const double p = it % 2 == 0 ? 0.9 : 0.5 + 0.45 * gen::unit(rng);
        const double got = rbo(a, b, p);
        CHECK(got == doctest::Approx(oracle_rbo(a, b, p)).epsilon(1e-12));
        CHECK(got == doctest::Approx(rbo(b, a, p)).epsilon(1e-12));
        CHECK(got >= -1e-12);
        CHECK(got <= 1 + 1e-12);
    }
}

TEST_CASE("property: moving an agreeing item up never lowers rbo") {
    gen::Rng rng(56);
    for (int it = 0; it < 200; ++it) {
        const int k = gen::uniform(rng, 3, 10);
        const auto a = gen::permutation(rng, k);
        auto b = gen::permutation(rng, k);
        // Put a[i] at position i of b for the first mismatch; agreement grows.
        for (int i = 0; i < k; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (b[ui] != a[ui]) {
                const auto pos = std::find(b.begin(), b.end(), a[ui]);
                auto c = b;
                std::iter_swap(c.begin() + i, c.begin() + (pos - b.begin()));
                CHECK(rbo(a, c, 0.9) >= rbo(a, b, 0.9) - 1e-12);
                break;
            }
        }
    }
}

TEST_CASE("jaccard and rrf") {
    CHECK(jaccard({"a", "b"}, {"b", "c"}) == doctest::Approx(1.0 / 3.0));
    CHECK(jaccard({}, {}) == 1.0);
    const auto fused = rrf_fuse({{"x", "y"}, {"x", "z"}});
    REQUIRE(fused.size() == 3);
    CHECK(fused[0].first == "x");
    CHECK(fused[0].second == doctest::Approx(2.0 / 61.0).epsilon(1e-15));
    CHECK(fused[1].first == "y");
    CHECK(fused[1].second == doctest::Approx(1.0 / 62.0));
    CHECK(fused[2].first == "z");
}

TEST_CASE("diverse query selection") {
    const std::vector<std::vector<double>> sim{{0, 0.9, 0.1}, {0.9, 0, 0.9}, {0.1, 0.9, 0}};
    CHECK(select_diverse_queries(sim, 0, 2) == std::vector<int>{0, 2});
    CHECK(select_diverse_queries(sim, 1, 1) == std::vector<int>{1});
    CHECK(select_diverse_queries(sim, 1, 3).size() == 3);
}

TEST_CASE("fused query similarity") {
    const std::vector<std::set<std::string>> terms{{"a", "b"}, {"a", "b"}, {"z"}};
    const std::vector<Tokens> results{{"d1", "d2"}, {"d1", "d2"}, {"d9"}};
    const auto m = fused_query_similarity(terms, results);
    REQUIRE(m.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(m[i][i] == 0);
        for (std::size_t j = 0; j < 3; ++j) CHECK(m[i][j] == m[j][i]);
    }
    CHECK(m[0][1] == doctest::Approx(2.0 / 61.0));
    CHECK(m[0][2] == doctest::Approx(2.0 / 62.0));
    CHECK(m[0][2] == m[1][2]);
    CHECK(select_diverse_queries(m, 0, 2) == std::vector<int>{0, 2});
}
