#include "mqrank/grid_oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <limits>
#include <optional>
#include <numeric>

#include "mqrank/equilibria.hpp"
#include "mqrank/errors.hpp"

namespace mqrank {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t binomial(std::uint64_t a, std::uint64_t b) {
    if (b > a) return 0;
    b = std::min(b, a - b);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= b; ++i) {
        r = r * (a - b + i) / i;
        if (r > kSaturated) return kSaturated;
    }
    return static_cast<std::uint64_t>(r);
}

void compositions(int m, int g, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == m) {
        out.push_back(cur);
        return;
    }
    const int used = std::accumulate(cur.begin(), cur.end(), 0);
    for (int c = 0; c <= g - used; ++c) {
        cur.push_back(c);
        compositions(m, g, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> grid_levels(int m, int g) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    compositions(m, g, cur, out);
    return out;
}

void check_budget(int n, int m, const GridSpec& spec) {
    if (spec.resolution < 1) throw InputError("grid resolution must be >= 1");
    const auto count = grid_profile_count(n, m, spec);
    if (count > spec.budget) {
        throw CapacityError("grid has " + (count == kSaturated ? std::string("more than 2^64") : std::to_string(count)) +
                                " profiles, budget is " + std::to_string(spec.budget),
                            count, spec.budget);
    }
}

// Visits index tuples whose first entry is `first`, in lexicographic order.
template <typename Fn>
void tuples_from(int n, std::size_t strategies, bool symmetric, int first, std::vector<int>& idx, Fn&& fn) {
    idx.assign(static_cast<std::size_t>(n), 0);
    idx[0] = first;
    if (n == 1) {
        fn(idx);
        return;
    }
    // Odometer over positions 1..n-1.
    const int lo = symmetric ? first : 0;
    for (std::size_t p = 1; p < idx.size(); ++p) idx[p] = lo;
    const int top = static_cast<int>(strategies) - 1;
    while (true) {
        fn(idx);
        std::size_t p = idx.size() - 1;
        while (p >= 1 && idx[p] == top) --p;
        if (p == 0) return;
        ++idx[p];
        for (std::size_t q = p + 1; q < idx.size(); ++q) idx[q] = symmetric ? idx[p] : 0;
    }
}

StrategyProfile profile_of(const std::vector<int>& idx, const std::vector<EmphasisVector>& strategies) {
    StrategyProfile out;
    for (int i : idx) out.strategies.push_back(strategies[static_cast<std::size_t>(i)]);
    return out;
}

// Scores, costs and shares on a fixed grid, scaled to int64 so the inner loop
// never touches GMP. Utilities are scaled by L = lcm(1..n), costs by the
// common denominator D of every cost that can occur (the budget becomes D).
struct Kernel {
    int n = 0;
    int m = 0;
    std::vector<std::vector<int>> levels;  // per strategy, per query: grid level c (emphasis c/g)
    std::vector<int> rank;                 // per level: rank of f(c/g) among distinct scores
    std::vector<std::int64_t> cost;        // per level: scaled increasing-branch inverse of f(c/g)
    std::vector<char> is_max;              // per level: f(c/g) == f(peak)
    int rank_at_zero = 0;
    std::int64_t budget = 0;
    std::int64_t unit = 0;  // L

    static std::optional<Kernel> build(const RankingGame& game, int g) {
        Kernel k;
        k.n = game.players();
        k.m = game.queries();
        k.levels = grid_levels(k.m, g);
        const auto& f = game.f();
        std::vector<Rational> scores;
        for (int c = 0; c <= g; ++c) {
            Rational x(c, g);
            x.canonicalize();
            scores.push_back(f(x));
        }
        std::vector<Rational> distinct = scores;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        auto rank_of = [&](const Rational& s) {
            return static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), s) - distinct.begin());
        };
        std::vector<Rational> costs;
        mpz_class den = 1;
        for (int c = 0; c <= g; ++c) {
            k.rank.push_back(rank_of(scores[static_cast<std::size_t>(c)]));
            k.is_max.push_back(scores[static_cast<std::size_t>(c)] == f.max_value());
            Rational cst = 0;
            if (scores[static_cast<std::size_t>(c)] >= f.value_at_zero()) {
                cst = f.inverse_increasing(scores[static_cast<std::size_t>(c)]);
            }
            costs.push_back(cst);
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), cst.get_den_mpz_t());
        }
        // Sums of up to m costs, each at most D, must fit comfortably.
        if (den > mpz_class(1) << 40) return std::nullopt;
        k.budget = den.get_si();
        for (const auto& cst : costs) {
            const mpz_class scaled = cst.get_num() * (den / cst.get_den());
            k.cost.push_back(scaled.get_si());
        }
        // f(0) need not be attained by a grid level other than 0, but level 0 is always present.
        k.rank_at_zero = k.rank[0];
        std::int64_t l = 1;
        for (int i = 2; i <= k.n; ++i) l = std::lcm(l, static_cast<std::int64_t>(i));
        k.unit = l;
        return k;
    }

    int level(int strategy, int j) const {
        return levels[static_cast<std::size_t>(strategy)][static_cast<std::size_t>(j)];
    }

    std::int64_t current_utility(const std::vector<int>& idx, int player) const {
        std::int64_t u = 0;
        for (int j = 0; j < m; ++j) {
            int top = -1;
            int h = 0;
            for (int i = 0; i < n; ++i) {
                const int r = rank[static_cast<std::size_t>(level(idx[static_cast<std::size_t>(i)], j))];
                if (r > top) {
                    top = r;
                    h = 1;
                } else if (r == top) {
                    ++h;
                }
            }
            if (rank[static_cast<std::size_t>(level(idx[static_cast<std::size_t>(player)], j))] == top) u += unit / h;
        }
        return u;
    }

    // Opponents' top rank, top level and count per query.
    void opponents(const std::vector<int>& idx, int player, std::vector<int>& top_rank, std::vector<int>& top_level,
                   std::vector<int>& count) const {
        for (int j = 0; j < m; ++j) {
            int top = -1;
            int lvl = 0;
            int h = 0;
            for (int i = 0; i < n; ++i) {
                if (i == player) continue;
                const int l = level(idx[static_cast<std::size_t>(i)], j);
                const int r = rank[static_cast<std::size_t>(l)];
                if (r > top) {
                    top = r;
                    lvl = l;
                    h = 1;
                } else if (r == top) {
                    ++h;
                }
            }
            top_rank[static_cast<std::size_t>(j)] = top;
            top_level[static_cast<std::size_t>(j)] = lvl;
            count[static_cast<std::size_t>(j)] = h;
        }
    }

    // Greedy exact best response (see best_response.cpp), scaled.
    std::int64_t best_response(const std::vector<int>& idx, int player) const {
        if (n == 1) return static_cast<std::int64_t>(m) * unit;
        std::vector<int> top_rank(static_cast<std::size_t>(m));
        std::vector<int> top_level(static_cast<std::size_t>(m));
        std::vector<int> count(static_cast<std::size_t>(m));
        opponents(idx, player, top_rank, top_level, count);
        std::int64_t free_value = 0;
        std::vector<std::int64_t> contested;
        std::vector<std::int64_t> peaked_share;
        std::int64_t peak_cost = 0;
        for (int j = 0; j < m; ++j) {
            const auto js = static_cast<std::size_t>(j);
            if (top_rank[js] < rank_at_zero) {
                free_value += unit;
            } else if (is_max[static_cast<std::size_t>(top_level[js])]) {
                peaked_share.push_back(unit / (count[js] + 1));
                peak_cost = cost[static_cast<std::size_t>(top_level[js])];
            } else {
                contested.push_back(cost[static_cast<std::size_t>(top_level[js])]);
            }
        }
        std::sort(contested.begin(), contested.end());
        std::sort(peaked_share.begin(), peaked_share.end(), std::greater<>());
        std::int64_t best = -1;
        std::int64_t pc = 0;
        std::int64_t share = 0;
        for (std::size_t b = 0; b <= peaked_share.size(); ++b) {
            if (b > 0) {
                pc += peak_cost;
                share += peaked_share[b - 1];
            }
            if (pc > budget) break;
            std::int64_t spent = pc;
            std::int64_t k = 0;
            for (auto c : contested) {
                if (spent + c >= budget) break;
                spent += c;
                ++k;
            }
            best = std::max(best, free_value + k * unit + share);
        }
        return best;
    }

    bool exact_nash(const std::vector<int>& idx) const {
        for (int i = 0; i < n; ++i) {
            if (best_response(idx, i) > current_utility(idx, i)) return false;
        }
        return true;
    }

    bool grid_nash(const std::vector<int>& idx) const {
        std::vector<int> top_rank(static_cast<std::size_t>(m));
        std::vector<int> top_level(static_cast<std::size_t>(m));
        std::vector<int> count(static_cast<std::size_t>(m));
        for (int i = 0; i < n; ++i) {
            const std::int64_t current = current_utility(idx, i);
            if (n == 1) continue;
            opponents(idx, i, top_rank, top_level, count);
            for (std::size_t s = 0; s < levels.size(); ++s) {
                std::int64_t u = 0;
                for (int j = 0; j < m; ++j) {
                    const auto js = static_cast<std::size_t>(j);
                    const int r = rank[static_cast<std::size_t>(levels[s][js])];
                    if (r > top_rank[js]) {
                        u += unit;
                    } else if (r == top_rank[js]) {
                        u += unit / (count[js] + 1);
                    }
                }
                if (u > current) return false;
            }
        }
        return true;
    }
};

}  // namespace

std::vector<EmphasisVector> grid_strategies(int m, int g) {
    if (m < 1 || g < 1) throw InputError("m and g must be >= 1");
    std::vector<EmphasisVector> out;
    for (const auto& c : grid_levels(m, g)) {
        EmphasisVector s;
        for (int v : c) s.emphases.emplace_back(v, g);
        for (auto& e : s.emphases) e.canonicalize();
        out.push_back(std::move(s));
    }
    return out;
}

std::uint64_t grid_strategy_count(int m, int g) {
    return binomial(static_cast<std::uint64_t>(g) + static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(m));
}

std::uint64_t grid_profile_count(int n, int m, const GridSpec& spec) {
    const std::uint64_t s = grid_strategy_count(m, spec.resolution);
    if (s == kSaturated) return kSaturated;
    if (spec.symmetric) return binomial(s + static_cast<std::uint64_t>(n) - 1, static_cast<std::uint64_t>(n));
    unsigned __int128 r = 1;
    for (int i = 0; i < n; ++i) {
        r *= s;
        if (r > kSaturated) return kSaturated;
    }
    return static_cast<std::uint64_t>(r);
}

void for_each_grid_profile(int n, int m, const GridSpec& spec,
                           const std::function<void(const std::vector<int>&)>& fn) {
    check_budget(n, m, spec);
    const auto s = static_cast<std::size_t>(grid_strategy_count(m, spec.resolution));
    std::vector<int> idx;
    for (int first = 0; first < static_cast<int>(s); ++first) tuples_from(n, s, spec.symmetric, first, idx, fn);
}

std::vector<StrategyProfile> grid_profiles(int n, int m, const GridSpec& spec) {
    const auto strategies = grid_strategies(m, spec.resolution);
    std::vector<StrategyProfile> out;
    for_each_grid_profile(n, m, spec, [&](const std::vector<int>& idx) { out.push_back(profile_of(idx, strategies)); });
    return out;
}

StrategyProfile canonical_profile(const StrategyProfile& profile) {
    StrategyProfile out = profile;
    std::sort(out.strategies.begin(), out.strategies.end(),
              [](const EmphasisVector& a, const EmphasisVector& b) { return a.emphases < b.emphases; });
    return out;
}

GridSearchResult grid_nash_search_serial(const RankingGame& game, const GridSpec& spec, DeviationMode mode) {
    const int n = game.players();
    const int m = game.queries();
    const auto strategies = grid_strategies(m, spec.resolution);
    GridSearchResult out;
    out.mode = mode;
    for_each_grid_profile(n, m, spec, [&](const std::vector<int>& idx) {
        ++out.examined;
        const auto profile = profile_of(idx, strategies);
        bool ok = true;
        if (mode == DeviationMode::exact) {
            ok = verify_nash(game, profile, BestResponseMethod::enumerate, false).is_nash;
        } else {
            const auto current = utilities(game, profile);
            for (int i = 0; i < n && ok; ++i) {
                for (const auto& s : strategies) {
                    if (utilities(game, profile.with(static_cast<std::size_t>(i), s))[static_cast<std::size_t>(i)] >
                        current[static_cast<std::size_t>(i)]) {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if (ok) out.profiles.push_back(profile);
    });
    return out;
}

GridSearchResult grid_nash_search(const RankingGame& game, const GridSpec& spec, DeviationMode mode) {
    const int n = game.players();
    const int m = game.queries();
    check_budget(n, m, spec);
    const auto kernel = Kernel::build(game, spec.resolution);
    if (!kernel) return grid_nash_search_serial(game, spec, mode);

    const auto strategies = grid_strategies(m, spec.resolution);
    const int s = static_cast<int>(strategies.size());
    std::vector<std::vector<std::vector<int>>> found(static_cast<std::size_t>(s));
    std::vector<std::uint64_t> examined(static_cast<std::size_t>(s), 0);

    const int threads = spec.jobs > 0 ? spec.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int first = 0; first < s; ++first) {
        std::vector<int> idx;
        auto& local = found[static_cast<std::size_t>(first)];
        auto& seen = examined[static_cast<std::size_t>(first)];
        tuples_from(n, static_cast<std::size_t>(s), spec.symmetric, first, idx, [&](const std::vector<int>& t) {
            ++seen;
            const bool ok = mode == DeviationMode::exact ? kernel->exact_nash(t) : kernel->grid_nash(t);
            if (ok) local.push_back(t);
        });
    }

    GridSearchResult out;
    out.mode = mode;
    for (int first = 0; first < s; ++first) {
        out.examined += examined[static_cast<std::size_t>(first)];
        for (const auto& t : found[static_cast<std::size_t>(first)]) out.profiles.push_back(profile_of(t, strategies));
    }
    return out;
}

}  // namespace mqrank
