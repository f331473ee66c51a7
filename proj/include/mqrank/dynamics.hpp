#pragma once

// Best-response dynamics with convergence and cycle detection.
//
// States are numbered from 0 (the initial profile); step t produces state t.
// A mover only changes its document when an attainable strictly better
// response exists, otherwise it stays and the state repeats.

#include <cstdint>
#include <optional>
#include <vector>

#include "mqrank/best_response.hpp"
#include "mqrank/game.hpp"

namespace mqrank {

enum class Schedule { round_robin, random };

struct DynamicsOptions {
    Schedule schedule = Schedule::round_robin;
    int first_mover = 1;  // round-robin start; taken modulo n
    std::uint64_t seed = 0;
    int max_rounds = 100;
    Rational epsilon = Rational(1, 1000);
    LeftoverPolicy leftover = LeftoverPolicy::fill;
    bool symmetric_cycles = true;
};

enum class Equivalence { exact, symmetric };

struct DynamicsStep {
    int mover = 0;
    bool moved = false;
    Rational mover_value;  // mover's utility after the step
    StrategyProfile profile;
};

struct Outcome {
    enum class Kind { converged, cycled, budget_exhausted };
    Kind kind = Kind::budget_exhausted;
    int round = 0;   // converged: index of the final state
    int first = 0;   // cycled: earlier state
    int second = 0;  // cycled: state equivalent to `first`
    Equivalence equivalence = Equivalence::exact;
};

struct DynamicsTrace {
    StrategyProfile initial;
    std::vector<DynamicsStep> steps;
    Outcome outcome;

    /// State t (0 = initial).
    const StrategyProfile& state(std::size_t t) const { return t == 0 ? initial : steps[t - 1].profile; }
    std::size_t state_count() const { return steps.size() + 1; }
};

DynamicsTrace run_dynamics(const RankingGame& game, const StrategyProfile& initial,
                           const DynamicsOptions& options);

/// True when b equals a after relabelling players by some permutation pi and
/// queries by some permutation sigma (b[pi(i)][sigma(j)] == a[i][j]). When
/// both movers are given the permutation must also send mover_a to mover_b.
/// Player permutations are only searched for n <= 8.
bool symmetric_equivalent(const StrategyProfile& a, const StrategyProfile& b,
                          std::optional<int> mover_a = std::nullopt,
                          std::optional<int> mover_b = std::nullopt);

/// First repeated state in a sequence. next_movers[t], when given, is the
/// player due to act in state t; states only match when their movers agree
/// (exactly, or under the player permutation for symmetric matches).
std::optional<Outcome> detect_cycle(const std::vector<StrategyProfile>& states,
                                    const std::vector<int>& next_movers = {},
                                    bool symmetric = true);

std::optional<Outcome> detect_cycle(const DynamicsTrace& trace, const DynamicsOptions& options);

struct StepReport {
    int step = 0;  // 1-based: transition from state step-1 to state step
    std::optional<int> mover;
    bool stay = false;
    Rational value;  // mover's utility after the step (unset for an anonymous stay)
    Rational best;   // attainable best response against the previous state
    bool optimal = false;
};

struct TraceReport {
    std::vector<StepReport> steps;
    bool all_optimal = true;
};

/// Checks each transition of an explicit state sequence. Consecutive states
/// must differ in at most one player (InputError otherwise). A stay is optimal
/// when the mover, or every player if the mover is not given, has no
/// improving deviation.
TraceReport verify_trace(const RankingGame& game, const std::vector<StrategyProfile>& states,
                         const std::vector<int>& movers = {});

nlohmann::json to_json(const Outcome& outcome);
nlohmann::json to_json(const TraceReport& report);

}  // namespace mqrank
