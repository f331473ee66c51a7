#pragma once

// Exact best responses against fixed opponents.
//
// Against fixed opponents each query j reduces to a threshold: the top
// opposing score T_j, the least increasing-branch emphasis c_j reaching it,
// and the number h_j of opponents sharing it. A deviation then picks, per
// query, to beat (emphasis strictly above c_j, worth 1), to tie (exactly c_j,
// worth 1/(h_j+1)) or to concede. Beating needs an open margin, so any plan
// with a strict win is feasible only when its costs sum to strictly less
// than 1. Decreasing-branch emphases never help: reaching the same score
// there always costs at least as much budget as on the increasing branch.

#include <cstdint>
#include <vector>

#include "mqrank/game.hpp"

namespace mqrank {

struct QueryThreshold {
    int query_index = 0;
    Rational cost;             // least emphasis in [0, peak] matching the top opposing score
    bool top_is_peak = false;  // an opponent already scores f(peak); the query can only be tied
    int tie_count = 0;         // opponents at the top score (0 when there are none)
    bool free_win = false;     // emphasis 0 already beats everyone (no opponents, or T_j < f(0))

    /// Share earned by tying: 1/(tie_count+1).
    Rational tie_value() const { return Rational(1, static_cast<unsigned long>(tie_count + 1)); }
};

struct DeviationPlan {
    std::vector<int> solo_set;  // queries to beat strictly (includes free wins)
    std::vector<int> tie_set;   // queries to match exactly
    Rational value;
    Rational cost;              // sum of thresholds over solo_set and tie_set
};

enum class BestResponseMethod {
    enumerate,  // exact subset enumeration, m <= 15
    greedy,     // O(m^2) sweep over the number of peak ties; exact, any m
};

struct BestResponse {
    Rational sup_value;       // supremum, admitting cost sum == 1 with strict wins
    Rational attained_value;  // maximum actually reachable by some strategy
    DeviationPlan plan;       // realizes attained_value
};

enum class LeftoverPolicy {
    none,  // unplanned queries get emphasis 0
    fill,  // unspent budget is placed on conceded queries, staying below their thresholds
};

struct Witness {
    EmphasisVector strategy;
    Rational value;
    Rational epsilon_used;
    bool epsilon_shrunk = false;
};

inline constexpr int kMaxEnumerationQueries = 15;

std::vector<QueryThreshold> thresholds(const RankingGame& game, const StrategyProfile& profile,
                                       int player);

/// Exact best-response values for `player`. Throws CapacityError when
/// method == enumerate and m > kMaxEnumerationQueries.
BestResponse best_response_value(const RankingGame& game, const StrategyProfile& profile, int player,
                                 BestResponseMethod method = BestResponseMethod::enumerate);

/// Same computation from precomputed thresholds.
BestResponse best_response_from_thresholds(const std::vector<QueryThreshold>& th,
                                           BestResponseMethod method);

/// Concrete strategy achieving attained_value. Strict wins get
/// min(cost + epsilon, peak); epsilon is shrunk to half the per-win budget
/// slack when the plan would not fit otherwise.
Witness best_response_witness(const RankingGame& game, const StrategyProfile& profile, int player,
                              const Rational& epsilon = Rational(1, 1000),
                              LeftoverPolicy leftover = LeftoverPolicy::none,
                              BestResponseMethod method = BestResponseMethod::enumerate);

}  // namespace mqrank
