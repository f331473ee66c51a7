#pragma once

// Existence, construction and verification of pure Nash equilibria.

#include <optional>
#include <string>
#include <vector>

#include "mqrank/best_response.hpp"
#include "mqrank/game.hpp"

namespace mqrank {

enum class Regime {
    small_p,          // peak <= 1/m: everyone plays (p,...,p)
    single_player,    // n == 1: every profile is an equilibrium
    two_player_band,  // n == 2, 1/m < peak <= 1/(m-1)
    alg1_band,        // n < m, 1/m < peak <= threshold
    n_ge_m,           // n >= m, peak > 1/m
    none,
};

std::string to_string(Regime regime);

struct ExistenceVerdict {
    bool exists = false;
    Rational threshold;
    Regime regime = Regime::none;
};

/// exists <=> peak <= 1/max(ceil(2m/n - 1), 1). A single player has no one to
/// deviate against, so for n == 1 the threshold is 1.
ExistenceVerdict exists_equilibrium(int n, int m, const Rational& peak);

/// Throws DomainError when no equilibrium exists.
StrategyProfile construct_equilibrium(const RankingGame& game);

/// The profile the construction would produce if the existence bound were
/// ignored. Used to show that the constructions break above the threshold.
StrategyProfile candidate_profile(const RankingGame& game);

struct PlayerReport {
    Rational current;
    Rational best_attained;
    Rational best_sup;
    std::optional<EmphasisVector> improving_witness;
};

struct NashReport {
    bool is_nash = true;
    std::vector<PlayerReport> players;
};

/// Exact check: no player has an attainable strictly improving deviation.
/// Falls back to the greedy best response when m exceeds the enumeration cap.
NashReport verify_nash(const RankingGame& game, const StrategyProfile& profile,
                       BestResponseMethod method = BestResponseMethod::enumerate,
                       bool with_witnesses = true);

nlohmann::json to_json(const NashReport& report);

}  // namespace mqrank
