#include "mqrank/equilibria.hpp"

#include <algorithm>

#include "mqrank/errors.hpp"

namespace mqrank {

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::small_p: return "small_p";
        case Regime::single_player: return "single_player";
        case Regime::two_player_band: return "two_player_band";
        case Regime::alg1_band: return "alg1_band";
        case Regime::n_ge_m: return "n_ge_m";
        case Regime::none: return "none";
    }
    return "none";
}

ExistenceVerdict exists_equilibrium(int n, int m, const Rational& peak) {
    if (n < 1 || m < 1) throw InputError("n and m must be >= 1");
    if (peak < 0 || peak > 1) throw InputError("peak must lie in [0,1]");
    ExistenceVerdict out;
    if (n == 1) {
        out.threshold = 1;
    } else {
        // ceil(2m/n - 1) = ceil((2m - n)/n), in integers.
        const long a = 2L * m - n;
        const long c = a <= 0 ? 0 : (a + n - 1) / n;
        out.threshold = Rational(1, static_cast<unsigned long>(std::max(c, 1L)));
    }
    out.exists = peak <= out.threshold;
    if (!out.exists) {
        out.regime = Regime::none;
    } else if (peak * m <= 1) {
        out.regime = Regime::small_p;
    } else if (n == 1) {
        out.regime = Regime::single_player;
    } else if (n == 2 && m > 2) {
        out.regime = Regime::two_player_band;
    } else if (n < m) {
        out.regime = Regime::alg1_band;
    } else {
        out.regime = Regime::n_ge_m;
    }
    return out;
}

namespace {

StrategyProfile uniform_profile(int n, int m, const Rational& x) {
    return StrategyProfile(std::vector<EmphasisVector>(
        static_cast<std::size_t>(n), EmphasisVector(std::vector<Rational>(static_cast<std::size_t>(m), x))));
}

// Each player takes k = floor(1/p) consecutive queries (cyclically) at the
// peak, player i starting at floor(i*m/n). The evenly spread starts keep the
// number of peak holders per query balanced and give every player at most one
// query it holds alone. The leftover 1 - kp is spent by the next player on
// each such solo query, so its owner cannot keep it with a tiny margin and
// move the rest of the budget elsewhere.
StrategyProfile balanced_assignment(int n, int m, const Rational& p) {
    const auto nn = static_cast<std::size_t>(n);
    const auto mm = static_cast<std::size_t>(m);
    StrategyProfile out(std::vector<EmphasisVector>(nn, EmphasisVector::zeros(mm)));
    if (p == 0) return out;

    long k = floor_div(Rational(1) / p).get_num().get_si();
    k = std::min<long>(k, m);
    std::vector<int> holders(mm, 0);
    std::vector<int> owner(mm, -1);
    for (std::size_t i = 0; i < nn; ++i) {
        const long start = static_cast<long>(i) * m / n;
        for (long t = 0; t < k; ++t) {
            const auto j = static_cast<std::size_t>((start + t) % m);
            out[i][j] = p;
            ++holders[j];
            owner[j] = static_cast<int>(i);
        }
    }

    const Rational leftover = 1 - p * k;
    if (leftover == 0 || n == 1) return out;
    std::vector<char> blocking(nn, 0);
    for (std::size_t j = 0; j < mm; ++j) {
        if (holders[j] != 1) continue;
        for (int step = 1; step < n; ++step) {
            const auto b = static_cast<std::size_t>((owner[j] + step) % n);
            if (blocking[b] || out[b][j] != 0) continue;
            out[b][j] = leftover;
            blocking[b] = 1;
            break;
        }
    }
    return out;
}

StrategyProfile build(const RankingGame& game, Regime regime) {
    const int n = game.players();
    const int m = game.queries();
    const Rational& p = game.peak();
    switch (regime) {
        case Regime::small_p:
            return uniform_profile(n, m, p);
        case Regime::two_player_band: {
            auto out = uniform_profile(n, m, p);
            const Rational last = 1 - p * (m - 1);
            for (auto& s : out.strategies) s[static_cast<std::size_t>(m - 1)] = last;
            return out;
        }
        default:
            return balanced_assignment(n, m, p);
    }
}

}  // namespace

StrategyProfile construct_equilibrium(const RankingGame& game) {
    const auto verdict = exists_equilibrium(game.players(), game.queries(), game.peak());
    if (!verdict.exists) {
        throw DomainError("no pure Nash equilibrium: peak " + display(game.peak()) + " > threshold " +
                          display(verdict.threshold) + " for n=" + std::to_string(game.players()) +
                          ", m=" + std::to_string(game.queries()));
    }
    return build(game, verdict.regime);
}

StrategyProfile candidate_profile(const RankingGame& game) {
    const int n = game.players();
    const int m = game.queries();
    const Rational& p = game.peak();
    if (p * m <= 1) return build(game, Regime::small_p);
    if (n == 2 && m > 2 && p * (m - 1) <= 1) return build(game, Regime::two_player_band);
    return build(game, n < m ? Regime::alg1_band : Regime::n_ge_m);
}

NashReport verify_nash(const RankingGame& game, const StrategyProfile& profile,
                       BestResponseMethod method, bool with_witnesses) {
    require_valid(profile, game);
    if (game.queries() > kMaxEnumerationQueries) method = BestResponseMethod::greedy;
    const auto current = utilities(game, profile);
    NashReport out;
    for (int i = 0; i < game.players(); ++i) {
        const auto br = best_response_value(game, profile, i, method);
        PlayerReport row;
        row.current = current[static_cast<std::size_t>(i)];
        row.best_attained = br.attained_value;
        row.best_sup = br.sup_value;
        if (row.best_attained > row.current) {
            out.is_nash = false;
            if (with_witnesses) {
                row.improving_witness =
                    best_response_witness(game, profile, i, Rational(1, 1000), LeftoverPolicy::none, method)
                        .strategy;
            }
        }
        out.players.push_back(std::move(row));
    }
    return out;
}

nlohmann::json to_json(const NashReport& report) {
    nlohmann::json out;
    out["is_nash"] = report.is_nash;
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < report.players.size(); ++i) {
        const auto& r = report.players[i];
        nlohmann::json row;
        row["player"] = i;
        row["current_utility"] = to_json(r.current);
        row["best_attained_deviation"] = to_json(r.best_attained);
        row["best_sup_deviation"] = to_json(r.best_sup);
        row["improving_witness"] =
            r.improving_witness ? strategy_to_json(*r.improving_witness) : nlohmann::json(nullptr);
        rows.push_back(row);
    }
    out["per_player"] = rows;
    return out;
}

}  // namespace mqrank
