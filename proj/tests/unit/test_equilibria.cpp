#include "doctest.h"
#include "generators.hpp"
#include "mqrank/equilibria.hpp"
#include "mqrank/errors.hpp"

using namespace mqrank;

namespace {

Rational r(const char* s) { return parse_rational(s); }

EmphasisVector v(std::initializer_list<const char*> xs) {
    EmphasisVector out;
    for (const char* x : xs) out.emphases.push_back(r(x));
    return out;
}

// 1 / max(ceil(2m/n - 1), 1), with the single-player exception.
Rational oracle_threshold(int n, int m) {
    if (n == 1) return 1;
    const int k = std::max((2 * m + n - 1) / n - 1, 1);
    return Rational(1, static_cast<unsigned long>(k));
}

}  // namespace

TEST_CASE("existence verdicts") {
    auto a = exists_equilibrium(2, 3, r("0.5"));
    CHECK(a.exists);
    CHECK(a.threshold == r("1/2"));
    CHECK(a.regime == Regime::two_player_band);

    auto b = exists_equilibrium(2, 3, r("0.51"));
    CHECK_FALSE(b.exists);
    CHECK(b.regime == Regime::none);

    for (int n = 2; n <= 6; ++n) {
        for (int m = 1; m <= n; ++m) {
            auto c = exists_equilibrium(n, m, r("0.99"));
            CHECK(c.exists);
            CHECK(c.threshold == 1);
        }
    }
    CHECK(exists_equilibrium(3, 3, r("0.9")).regime == Regime::n_ge_m);
    CHECK(exists_equilibrium(3, 5, r("0.2")).regime == Regime::small_p);
    CHECK(exists_equilibrium(3, 5, r("1/3")).regime == Regime::alg1_band);
    CHECK(exists_equilibrium(1, 4, r("0.9")).regime == Regime::single_player);
}

TEST_CASE("threshold formula on a sweep") {
    for (int n = 1; n <= 8; ++n) {
        for (int m = 1; m <= 10; ++m) {
            const auto t = oracle_threshold(n, m);
            CHECK(exists_equilibrium(n, m, 1).threshold == t);
            CHECK(exists_equilibrium(n, m, t).exists);
            if (t < 1) CHECK_FALSE(exists_equilibrium(n, m, t + Rational(1, 1000)).exists);
        }
    }
}

TEST_CASE("constructions") {
    const RankingGame g45(2, 3, r("0.45"));
    const auto s45 = construct_equilibrium(g45);
    CHECK(s45 == StrategyProfile{v({"0.45", "0.45", "0.1"}), v({"0.45", "0.45", "0.1"})});
    CHECK(verify_nash(g45, s45).is_nash);

    const RankingGame third(2, 3, r("1/3"));
    const auto e = v({"1/3", "1/3", "1/3"});
    CHECK(construct_equilibrium(third) == StrategyProfile{e, e});

    const RankingGame many(3, 2, r("0.9"));
    const auto s = construct_equilibrium(many);
    CHECK(s == StrategyProfile{v({"0.9", "0.1"}), v({"0.9", "0"}), v({"0", "0.9"})});
    CHECK(verify_nash(many, s).is_nash);

    CHECK_THROWS_AS(construct_equilibrium(RankingGame(2, 3, r("0.51"))), DomainError);
}

TEST_CASE("verify_nash examples") {
    const RankingGame small(3, 4, r("1/4"));
    const auto q = v({"1/4", "1/4", "1/4", "1/4"});
    CHECK(verify_nash(small, {q, q, q}).is_nash);

    const RankingGame half(2, 3, r("0.5"));
    const auto h = v({"0.5", "0.5", "0"});
    const auto rep = verify_nash(half, {h, h});
    CHECK(rep.is_nash);
    CHECK(rep.players[0].current == r("3/2"));
    CHECK(rep.players[0].best_attained == r("3/2"));

    // The dominated grouping (0.9,0),(0,0.9),(0.9,0) lets player 1 take 4/3.
    const RankingGame many(3, 2, r("0.9"));
    const auto bad = verify_nash(many, {v({"0.9", "0"}), v({"0", "0.9"}), v({"0.9", "0"})});
    CHECK_FALSE(bad.is_nash);
    CHECK(bad.players[1].best_attained == r("4/3"));
    REQUIRE(bad.players[1].improving_witness.has_value());
    const auto improved = StrategyProfile{v({"0.9", "0"}), *bad.players[1].improving_witness, v({"0.9", "0"})};
    CHECK(utilities(many, improved)[1] == r("4/3"));

    const RankingGame off(2, 3, r("0.5"));
    const auto rep2 = verify_nash(off, {v({"0.3", "0.4", "0"}), v({"0.2", "0.3", "0.5"})});
    CHECK_FALSE(rep2.is_nash);
}

TEST_CASE("construction passes verification across the existence region") {
    int cells = 0;
    for (int n = 1; n <= 6; ++n) {
        for (int m = 1; m <= 8; ++m) {
            for (int q = 2; q <= 10; ++q) {
                for (int a = 1; a <= q; ++a) {
                    const auto peak = gen::fraction(a, q);
                    const RankingGame game(n, m, peak);
                    const bool exists = exists_equilibrium(n, m, peak).exists;
                    const auto candidate = candidate_profile(game);
                    CHECK(validate(candidate, game).empty());
                    const bool nash = verify_nash(game, candidate, BestResponseMethod::greedy, false).is_nash;
                    CHECK_MESSAGE(nash == exists, "n=", n, " m=", m, " peak=", display(peak));
                    if (exists) CHECK(construct_equilibrium(game) == candidate);
                    ++cells;
                }
            }
        }
    }
    CHECK(cells > 2500);
}

TEST_CASE("candidates stop working just above the threshold") {
    for (int n = 2; n <= 5; ++n) {
        for (int m = n + 1; m <= 8; ++m) {
            const auto t = exists_equilibrium(n, m, 0).threshold;
            if (t >= 1) continue;
            const RankingGame game(n, m, t + Rational(1, 1000));
            CHECK_FALSE(verify_nash(game, candidate_profile(game)).is_nash);
        }
    }
}

TEST_CASE("peak coordinates of the construction") {
    for (int n = 2; n <= 5; ++n) {
        for (int m = n + 1; m <= 8; ++m) {
            for (int q = 2; q <= 12; ++q) {
                for (int a = 1; a < q; ++a) {
                    const auto peak = gen::fraction(a, q);
                    if (!exists_equilibrium(n, m, peak).exists || peak <= Rational(1, static_cast<unsigned long>(m))) continue;
                    const RankingGame game(n, m, peak);
                    const auto k = floor_div(Rational(1) / peak);
                    const Rational leftover = 1 - k * peak;
                    for (const auto& s : construct_equilibrium(game).strategies) {
                        int at_peak = 0;
                        for (const auto& x : s.emphases) {
                            if (x == peak) {
                                ++at_peak;
                            } else if (x != 0) {
                                CHECK(x == leftover);
                            }
                        }
                        if (n == 2 && peak <= Rational(1, static_cast<unsigned long>(m - 1))) continue;
                        CHECK(at_peak == k);
                        CHECK(s.total() <= 1);
                    }
                }
            }
        }
    }
}

TEST_CASE("property: no witness improves on a verified equilibrium") {
    gen::Rng rng(31);
    for (int it = 0; it < 200; ++it) {
        const int n = gen::uniform(rng, 2, 5);
        const int m = gen::uniform(rng, 1, 6);
        const auto t = exists_equilibrium(n, m, 0).threshold;
        auto peak = gen::peak(rng, 12);
        if (peak > t) peak = t;
        const RankingGame game(n, m, peak);
        const auto s = construct_equilibrium(game);
        REQUIRE(verify_nash(game, s).is_nash);
        const auto base = utilities(game, s);
        for (int i = 0; i < n; ++i) {
            const auto w = best_response_witness(game, s, i);
            CHECK(utilities(game, s.with(static_cast<std::size_t>(i), w.strategy))[static_cast<std::size_t>(i)] <=
                  base[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("verify_nash falls back to greedy above the enumeration cap") {
    const RankingGame game(2, 20, Rational(1, 20));
    const auto s = construct_equilibrium(game);
    CHECK(verify_nash(game, s, BestResponseMethod::enumerate).is_nash);
}

TEST_CASE("nash report json") {
    const RankingGame game(2, 3, r("0.45"));
    const auto j = to_json(verify_nash(game, construct_equilibrium(game)));
    CHECK(j.at("is_nash") == true);
    CHECK(j.at("per_player").size() == 2);
    CHECK(j.at("per_player")[0].at("improving_witness").is_null());
}
