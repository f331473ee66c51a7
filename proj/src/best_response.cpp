#include "mqrank/best_response.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "mqrank/errors.hpp"

namespace mqrank {

std::vector<QueryThreshold> thresholds(const RankingGame& game, const StrategyProfile& profile,
                                       int player) {
    require_valid(profile, game);
    if (player < 0 || player >= game.players()) {
        throw DomainError("player " + std::to_string(player) + " out of range");
    }
    const auto& f = game.f();
    std::vector<QueryThreshold> out(static_cast<std::size_t>(game.queries()));
    for (int j = 0; j < game.queries(); ++j) {
        auto& th = out[static_cast<std::size_t>(j)];
        th.query_index = j;
        Rational top;
        int count = 0;
        for (int k = 0; k < game.players(); ++k) {
            if (k == player) continue;
            Rational s = f(profile[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
            if (count == 0 || s > top) {
                top = std::move(s);
                count = 1;
            } else if (s == top) {
                ++count;
            }
        }
        th.tie_count = count;
        if (count == 0 || top < f.value_at_zero()) {
            // Nobody to beat, or the best opponent sits on the decreasing branch
            // below f(0): emphasis 0 already wins outright.
            th.cost = 0;
            th.free_win = true;
            continue;
        }
        th.cost = f.inverse_increasing(top);
        th.top_is_peak = top == f.max_value();
    }
    return out;
}

namespace {

bool better(const Rational& value, const Rational& cost, const Rational& best_value,
            const Rational& best_cost) {
    if (value != best_value) return value > best_value;
    return cost < best_cost;
}

BestResponse enumerate_plans(const std::vector<QueryThreshold>& th) {
    std::vector<int> free_wins;
    std::vector<const QueryThreshold*> open;
    for (const auto& t : th) {
        if (t.free_win) {
            free_wins.push_back(t.query_index);
        } else {
            open.push_back(&t);
        }
    }
    if (open.size() > static_cast<std::size_t>(kMaxEnumerationQueries)) {
        throw CapacityError("subset enumeration supports at most " +
                                std::to_string(kMaxEnumerationQueries) +
                                " contested queries; use the greedy method",
                            open.size(), kMaxEnumerationQueries);
    }
    const Rational free_value(static_cast<long>(free_wins.size()));

    BestResponse out;
    out.sup_value = -1;
    out.attained_value = -1;
    std::uint32_t best_mask = 0;
    bool best_all_tie = false;
    Rational best_cost;
    Rational sup_best_cost;

    const std::uint32_t limit = 1u << open.size();
    Rational cost;
    Rational tie_peak;
    Rational tie_open;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        cost = 0;
        tie_peak = 0;
        tie_open = 0;
        long solo_candidates = 0;
        for (std::size_t b = 0; b < open.size(); ++b) {
            if (!(mask & (1u << b))) continue;
            cost += open[b]->cost;
            if (open[b]->top_is_peak) {
                tie_peak += open[b]->tie_value();
            } else {
                ++solo_candidates;
                tie_open += open[b]->tie_value();
            }
        }
        if (cost > 1) continue;

        const Rational sup = free_value + solo_candidates + tie_peak;
        if (better(sup, cost, out.sup_value, sup_best_cost)) {
            out.sup_value = sup;
            sup_best_cost = cost;
        }

        Rational attained;
        bool all_tie;
        if (solo_candidates > 0 && cost < 1) {
            attained = free_value + solo_candidates + tie_peak;
            all_tie = false;
        } else {
            attained = free_value + tie_open + tie_peak;
            all_tie = true;
        }
        if (better(attained, cost, out.attained_value, best_cost)) {
            out.attained_value = attained;
            best_cost = cost;
            best_mask = mask;
            best_all_tie = all_tie;
        }
    }

    auto& plan = out.plan;
    plan.solo_set = free_wins;
    for (std::size_t b = 0; b < open.size(); ++b) {
        if (!(best_mask & (1u << b))) continue;
        if (open[b]->top_is_peak || best_all_tie) {
            plan.tie_set.push_back(open[b]->query_index);
        } else {
            plan.solo_set.push_back(open[b]->query_index);
        }
    }
    std::sort(plan.solo_set.begin(), plan.solo_set.end());
    plan.value = out.attained_value;
    plan.cost = best_cost;
    return out;
}

// Optimal plans take every free win, some number b of the peak-topped queries
// with the largest tie shares (each costs exactly the peak), and then as many
// of the cheapest contested queries as fit strictly under the budget. Plans
// that tie a contested query at cost sum exactly 1 are never strictly better
// than one of these: tie shares are at most 1/2, so dropping one costly
// element and turning the remaining contested ties into wins loses nothing.
BestResponse greedy_plans(const std::vector<QueryThreshold>& th) {
    std::vector<int> free_wins;
    std::vector<const QueryThreshold*> contested;
    std::vector<const QueryThreshold*> peaked;
    for (const auto& t : th) {
        if (t.free_win) {
            free_wins.push_back(t.query_index);
        } else if (t.top_is_peak) {
            peaked.push_back(&t);
        } else {
            contested.push_back(&t);
        }
    }
    std::stable_sort(contested.begin(), contested.end(),
                     [](const auto* a, const auto* b) { return a->cost < b->cost; });
    std::stable_sort(peaked.begin(), peaked.end(),
                     [](const auto* a, const auto* b) { return a->tie_count < b->tie_count; });

    std::vector<Rational> prefix(contested.size() + 1);
    for (std::size_t k = 0; k < contested.size(); ++k) prefix[k + 1] = prefix[k] + contested[k]->cost;

    const Rational free_value(static_cast<long>(free_wins.size()));
    BestResponse out;
    out.sup_value = -1;
    out.attained_value = -1;
    Rational best_cost;
    Rational sup_best_cost;
    std::size_t best_b = 0;
    std::size_t best_k = 0;

    Rational peak_cost;
    Rational peak_share;
    for (std::size_t b = 0; b <= peaked.size(); ++b) {
        if (b > 0) {
            peak_cost += peaked[b - 1]->cost;
            peak_share += peaked[b - 1]->tie_value();
        }
        if (peak_cost > 1) break;

        std::size_t k_strict = 0;
        std::size_t k_closed = 0;
        while (k_strict < contested.size() && peak_cost + prefix[k_strict + 1] < 1) ++k_strict;
        while (k_closed < contested.size() && peak_cost + prefix[k_closed + 1] <= 1) ++k_closed;

        const Rational sup = free_value + static_cast<long>(k_closed) + peak_share;
        const Rational sup_cost = peak_cost + prefix[k_closed];
        if (better(sup, sup_cost, out.sup_value, sup_best_cost)) {
            out.sup_value = sup;
            sup_best_cost = sup_cost;
        }

        for (std::size_t k : {std::size_t{0}, k_strict}) {
            const Rational value = free_value + static_cast<long>(k) + peak_share;
            const Rational cost = peak_cost + prefix[k];
            if (better(value, cost, out.attained_value, best_cost)) {
                out.attained_value = value;
                best_cost = cost;
                best_b = b;
                best_k = k;
            }
        }
    }

    auto& plan = out.plan;
    plan.solo_set = free_wins;
    for (std::size_t k = 0; k < best_k; ++k) plan.solo_set.push_back(contested[k]->query_index);
    for (std::size_t b = 0; b < best_b; ++b) plan.tie_set.push_back(peaked[b]->query_index);
    std::sort(plan.solo_set.begin(), plan.solo_set.end());
    std::sort(plan.tie_set.begin(), plan.tie_set.end());
    plan.value = out.attained_value;
    plan.cost = best_cost;
    return out;
}

}  // namespace

BestResponse best_response_from_thresholds(const std::vector<QueryThreshold>& th,
                                           BestResponseMethod method) {
    return method == BestResponseMethod::enumerate ? enumerate_plans(th) : greedy_plans(th);
}

BestResponse best_response_value(const RankingGame& game, const StrategyProfile& profile, int player,
                                 BestResponseMethod method) {
    return best_response_from_thresholds(thresholds(game, profile, player), method);
}

Witness best_response_witness(const RankingGame& game, const StrategyProfile& profile, int player,
                              const Rational& epsilon, LeftoverPolicy leftover,
                              BestResponseMethod method) {
    if (epsilon <= 0) throw DomainError("epsilon must be positive");
    const auto th = thresholds(game, profile, player);
    const auto br = best_response_from_thresholds(th, method);
    const auto& plan = br.plan;
    const Rational& peak = game.peak();
    const auto m = static_cast<std::size_t>(game.queries());

    std::vector<char> in_plan(m, 0);
    std::vector<std::size_t> strict;
    for (int j : plan.solo_set) {
        in_plan[static_cast<std::size_t>(j)] = 1;
        if (!th[static_cast<std::size_t>(j)].free_win) strict.push_back(static_cast<std::size_t>(j));
    }
    for (int j : plan.tie_set) in_plan[static_cast<std::size_t>(j)] = 1;

    Witness out;
    out.value = br.attained_value;
    out.epsilon_used = epsilon;

    auto build = [&](const Rational& eps) {
        EmphasisVector s = EmphasisVector::zeros(m);
        for (std::size_t j : strict) {
            Rational x = th[j].cost + eps;
            s[j] = x < peak ? x : peak;
        }
        for (int j : plan.tie_set) s[static_cast<std::size_t>(j)] = th[static_cast<std::size_t>(j)].cost;
        return s;
    };

    EmphasisVector s = build(epsilon);
    if (s.total() > 1) {
        const Rational slack = 1 - plan.cost;
        out.epsilon_used = slack / (2 * static_cast<long>(strict.size()));
        out.epsilon_shrunk = true;
        s = build(out.epsilon_used);
    }

    if (leftover == LeftoverPolicy::fill) {
        Rational budget = 1 - s.total();
        for (std::size_t j = 0; j < m && budget > 0; ++j) {
            if (in_plan[j] || th[j].free_win) continue;
            // Staying strictly below the threshold keeps the query conceded.
            if (budget >= th[j].cost) continue;
            s[j] = budget;
            budget = 0;
        }
    }

    const auto check = utilities(game, profile.with(static_cast<std::size_t>(player), s));
    if (check[static_cast<std::size_t>(player)] != br.attained_value) {
        throw std::logic_error("best-response witness does not realize its planned value");
    }
    out.strategy = std::move(s);
    return out;
}

}  // namespace mqrank
