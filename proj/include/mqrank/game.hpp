#pragma once

// Core types of the multi-query ranking game: n publishers each write one
// document, abstracted as per-query emphases on the capped simplex; a
// single-peaked function maps emphasis to retrieval score; a player's utility
// is the (tie-shared) number of queries on which its document ranks first.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mqrank/rational.hpp"

namespace mqrank {

/// Piecewise-linear single-peaked function on [0,1].
///
/// Stored as breakpoints (x_0 = 0, y_0), ..., (x_k = 1, y_k). Exactly one
/// breakpoint is the peak; y strictly increases before it and strictly
/// decreases after it. All values are in [0,1].
class SinglePeakFunction {
public:
    struct Breakpoint {
        Rational x;
        Rational y;
    };

    /// f(x) = x/peak on [0,peak], (1-x)/(1-peak) on [peak,1].
    static SinglePeakFunction tent(const Rational& peak);

    /// Throws InputError unless the breakpoints describe a valid single-peaked
    /// function.
    static SinglePeakFunction from_breakpoints(std::vector<Breakpoint> points);

    const Rational& peak() const { return points_[peak_index_].x; }
    const Rational& max_value() const { return points_[peak_index_].y; }
    const Rational& value_at_zero() const { return points_.front().y; }
    const std::vector<Breakpoint>& breakpoints() const { return points_; }
    bool is_tent() const;

    Rational operator()(const Rational& x) const;

    /// The unique x in [0, peak] with f(x) = y. Requires f(0) <= y <= f(peak).
    Rational inverse_increasing(const Rational& y) const;

private:
    explicit SinglePeakFunction(std::vector<Breakpoint> points, std::size_t peak_index)
        : points_(std::move(points)), peak_index_(peak_index) {}

    std::vector<Breakpoint> points_;
    std::size_t peak_index_ = 0;
};

/// A document: m query emphases, each in [0,1], summing to at most 1.
struct EmphasisVector {
    std::vector<Rational> emphases;

    EmphasisVector() = default;
    explicit EmphasisVector(std::vector<Rational> values) : emphases(std::move(values)) {}
    EmphasisVector(std::initializer_list<Rational> values) : emphases(values) {}

    std::size_t size() const { return emphases.size(); }
    const Rational& operator[](std::size_t j) const { return emphases[j]; }
    Rational& operator[](std::size_t j) { return emphases[j]; }
    Rational total() const;

    static EmphasisVector zeros(std::size_t m) { return EmphasisVector(std::vector<Rational>(m)); }

    friend bool operator==(const EmphasisVector&, const EmphasisVector&) = default;
};

/// G = <n, m, f>.
class RankingGame {
public:
    RankingGame(int players, int queries, SinglePeakFunction f);
    RankingGame(int players, int queries, const Rational& peak)
        : RankingGame(players, queries, SinglePeakFunction::tent(peak)) {}

    int players() const { return players_; }
    int queries() const { return queries_; }
    const SinglePeakFunction& f() const { return f_; }
    const Rational& peak() const { return f_.peak(); }

private:
    int players_;
    int queries_;
    SinglePeakFunction f_;
};

/// One strategy per player; index = player id.
struct StrategyProfile {
    std::vector<EmphasisVector> strategies;

    StrategyProfile() = default;
    explicit StrategyProfile(std::vector<EmphasisVector> s) : strategies(std::move(s)) {}
    StrategyProfile(std::initializer_list<EmphasisVector> s) : strategies(s) {}

    std::size_t size() const { return strategies.size(); }
    const EmphasisVector& operator[](std::size_t i) const { return strategies[i]; }
    EmphasisVector& operator[](std::size_t i) { return strategies[i]; }

    /// Copy with player `i`'s strategy replaced.
    StrategyProfile with(std::size_t i, EmphasisVector strategy) const;

    friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
};

struct TieGroup {
    Rational score;
    std::vector<int> players;  // ascending ids
};

struct InducedRanking {
    int query_index = 0;
    std::vector<TieGroup> groups;  // scores strictly decreasing
};

using UtilityVector = std::vector<Rational>;

struct Violation {
    enum class Kind { player_count, length, range, simplex_cap };
    Kind kind;
    int player;  // -1 for profile-level violations
    std::string message;
};

Rational score(const RankingGame& game, const EmphasisVector& strategy, int query_index);

InducedRanking induce_ranking(const RankingGame& game, const StrategyProfile& profile,
                              int query_index);

/// The top tie-group of size h on each query shares one unit: 1/h per member.
UtilityVector utilities(const RankingGame& game, const StrategyProfile& profile);

std::vector<Violation> validate(const StrategyProfile& profile, const RankingGame& game);

/// Violations of a single document against an m-query game.
std::vector<Violation> validate_strategy(const EmphasisVector& strategy, int queries,
                                         int player = -1);

/// Throws InputError listing every violation.
void require_valid(const StrategyProfile& profile, const RankingGame& game);

// JSON profile files: {"n":int, "m":int, "peak":number, "strategies":[[...],...]}.
// Numbers may also be given as rational strings such as "1/3".

struct ProfileDocument {
    RankingGame game;
    StrategyProfile profile;
};

nlohmann::json profile_to_json(const StrategyProfile& profile);
nlohmann::json strategy_to_json(const EmphasisVector& strategy);
EmphasisVector strategy_from_json(const nlohmann::json& value);
StrategyProfile profile_from_json(const nlohmann::json& value);

nlohmann::json game_document_to_json(const RankingGame& game, const StrategyProfile& profile);
ProfileDocument game_document_from_json(const nlohmann::json& doc);

}  // namespace mqrank
