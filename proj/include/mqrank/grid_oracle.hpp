#pragma once

// Brute-force equilibrium search over emphasis grids.
//
// Strategies are restricted to multiples of 1/g with sum <= 1 (there are
// C(g+m, m) of them). A grid profile that passes the exact check is a genuine
// equilibrium of the continuous game, so a non-empty exact result confirms
// existence. An empty result only corroborates non-existence: equilibria may
// lie off the grid.

#include <cstdint>
#include <functional>
#include <vector>

#include "mqrank/game.hpp"

namespace mqrank {

struct GridSpec {
    int resolution = 1;  // g
    std::uint64_t budget = 100'000'000;
    bool symmetric = true;  // enumerate players' strategy indices non-decreasing
    int jobs = 0;           // 0: OpenMP default
};

enum class DeviationMode {
    exact,  // continuous deviations (verify_nash)
    grid,   // grid deviations only; may accept profiles that are not equilibria
};

/// All compositions c with sum(c) <= g, in lexicographic order, as c/g.
std::vector<EmphasisVector> grid_strategies(int m, int g);

/// C(g+m, m), saturating at UINT64_MAX.
std::uint64_t grid_strategy_count(int m, int g);

/// Number of profiles (multisets of n strategies when symmetric), saturating.
std::uint64_t grid_profile_count(int n, int m, const GridSpec& spec);

/// Calls fn with each profile's strategy indices in lexicographic order.
/// Throws CapacityError when the count exceeds spec.budget.
void for_each_grid_profile(int n, int m, const GridSpec& spec,
                           const std::function<void(const std::vector<int>&)>& fn);

std::vector<StrategyProfile> grid_profiles(int n, int m, const GridSpec& spec);

struct GridSearchResult {
    DeviationMode mode = DeviationMode::exact;
    std::uint64_t examined = 0;
    std::vector<StrategyProfile> profiles;
};

/// OpenMP kernel with exact integer-scaled arithmetic. Results are in
/// enumeration order regardless of the number of threads.
GridSearchResult grid_nash_search(const RankingGame& game, const GridSpec& spec, DeviationMode mode);

/// Straightforward single-threaded version built on verify_nash and
/// utilities(); kept as the reference the kernel is tested against.
GridSearchResult grid_nash_search_serial(const RankingGame& game, const GridSpec& spec, DeviationMode mode);

/// Profile with players sorted by strategy, the representative used by the
/// symmetric enumeration.
StrategyProfile canonical_profile(const StrategyProfile& profile);

}  // namespace mqrank
