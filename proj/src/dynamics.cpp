#include "mqrank/dynamics.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "mqrank/errors.hpp"

namespace mqrank {

namespace {

using Row = std::vector<Rational>;

// Sorted rows, sorted: a necessary condition for symmetric equivalence.
std::vector<Row> shape_key(const StrategyProfile& s) {
    std::vector<Row> rows;
    for (const auto& d : s.strategies) {
        Row r = d.emphases;
        std::sort(r.begin(), r.end());
        rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

std::vector<Row> sorted_columns(const StrategyProfile& s, const std::vector<int>& order) {
    const std::size_t m = s.size() ? s[0].size() : 0;
    std::vector<Row> cols(m, Row(order.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) cols[j][i] = s[static_cast<std::size_t>(order[i])][j];
    }
    std::sort(cols.begin(), cols.end());
    return cols;
}

int next_round_robin(int mover, int n) { return (mover + 1) % n; }

}  // namespace

bool symmetric_equivalent(const StrategyProfile& a, const StrategyProfile& b, std::optional<int> mover_a,
                          std::optional<int> mover_b) {
    if (a.size() != b.size()) return false;
    const std::size_t n = a.size();
    if (n == 0) return true;
    if (a[0].size() != b[0].size()) return false;
    if (n > 8) return false;
    if (shape_key(a) != shape_key(b)) return false;

    std::vector<int> identity(n);
    std::iota(identity.begin(), identity.end(), 0);
    const auto target = sorted_columns(a, identity);
    std::vector<int> pi = identity;
    do {
        if (mover_a && mover_b && pi[static_cast<std::size_t>(*mover_a)] != *mover_b) continue;
        // Column j of b, read in the order pi(0), ..., pi(n-1).
        if (sorted_columns(b, pi) == target) return true;
    } while (std::next_permutation(pi.begin(), pi.end()));
    return false;
}

std::optional<Outcome> detect_cycle(const std::vector<StrategyProfile>& states,
                                    const std::vector<int>& next_movers, bool symmetric) {
    const bool with_movers = !next_movers.empty();
    if (with_movers && next_movers.size() != states.size()) {
        throw InputError("next_movers must have one entry per state");
    }
    for (std::size_t t = 1; t < states.size(); ++t) {
        for (std::size_t u = 0; u < t; ++u) {
            if (states[u] == states[t] && (!with_movers || next_movers[u] == next_movers[t])) {
                return Outcome{Outcome::Kind::cycled, 0, static_cast<int>(u), static_cast<int>(t),
                               Equivalence::exact};
            }
        }
        if (!symmetric) continue;
        for (std::size_t u = 0; u < t; ++u) {
            std::optional<int> mu;
            std::optional<int> mt;
            if (with_movers) {
                mu = next_movers[u];
                mt = next_movers[t];
            }
            if (symmetric_equivalent(states[u], states[t], mu, mt)) {
                return Outcome{Outcome::Kind::cycled, 0, static_cast<int>(u), static_cast<int>(t),
                               Equivalence::symmetric};
            }
        }
    }
    return std::nullopt;
}

namespace {

class MoverSchedule {
public:
    MoverSchedule(int n, const DynamicsOptions& options)
        : n_(n), options_(options), rng_(options.seed),
          next_(options.schedule == Schedule::round_robin ? ((options.first_mover % n) + n) % n : draw()) {}

    int peek() const { return next_; }

    int advance() {
        const int current = next_;
        next_ = options_.schedule == Schedule::round_robin ? next_round_robin(current, n_) : draw();
        return current;
    }

private:
    int draw() { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n_)); }

    int n_;
    const DynamicsOptions& options_;
    std::mt19937_64 rng_;
    int next_;
};

}  // namespace

DynamicsTrace run_dynamics(const RankingGame& game, const StrategyProfile& initial,
                           const DynamicsOptions& options) {
    require_valid(initial, game);
    if (options.max_rounds < 1) throw InputError("max_rounds must be >= 1");
    const int n = game.players();
    DynamicsTrace trace;
    trace.initial = initial;

    MoverSchedule schedule(n, options);
    std::vector<StrategyProfile> states{initial};
    std::vector<int> next_movers{schedule.peek()};
    std::vector<char> settled(static_cast<std::size_t>(n), 0);
    int settled_count = 0;
    int last_change = 0;

    for (int t = 1; t <= options.max_rounds; ++t) {
        const StrategyProfile& current = states.back();
        const int mover = schedule.advance();
        const auto current_value = utilities(game, current)[static_cast<std::size_t>(mover)];
        const auto method = game.queries() > kMaxEnumerationQueries ? BestResponseMethod::greedy
                                                                    : BestResponseMethod::enumerate;
        const auto br = best_response_value(game, current, mover, method);

        DynamicsStep step;
        step.mover = mover;
        if (br.attained_value > current_value) {
            const auto w = best_response_witness(game, current, mover, options.epsilon, options.leftover, method);
            step.moved = true;
            step.mover_value = w.value;
            step.profile = current.with(static_cast<std::size_t>(mover), w.strategy);
            std::fill(settled.begin(), settled.end(), 0);
            settled_count = 0;
            last_change = t;
        } else {
            step.mover_value = current_value;
            step.profile = current;
        }
        if (!settled[static_cast<std::size_t>(mover)] && !step.moved) {
            settled[static_cast<std::size_t>(mover)] = 1;
            ++settled_count;
        }
        trace.steps.push_back(step);
        states.push_back(step.profile);
        next_movers.push_back(schedule.peek());

        if (settled_count == n) {
            trace.outcome = Outcome{Outcome::Kind::converged, last_change, 0, 0, Equivalence::exact};
            return trace;
        }
        // Repetitions are only meaningful for a deterministic schedule, and a
        // stay can only repeat a state that convergence handles.
        if (step.moved && options.schedule == Schedule::round_robin) {
            const std::size_t u_max = states.size() - 1;
            for (std::size_t u = 0; u < u_max; ++u) {
                if (states[u] == states[u_max] && next_movers[u] == next_movers[u_max]) {
                    trace.outcome = Outcome{Outcome::Kind::cycled, 0, static_cast<int>(u),
                                            static_cast<int>(u_max), Equivalence::exact};
                    return trace;
                }
            }
            if (options.symmetric_cycles) {
                for (std::size_t u = 0; u < u_max; ++u) {
                    if (symmetric_equivalent(states[u], states[u_max], next_movers[u], next_movers[u_max])) {
                        trace.outcome = Outcome{Outcome::Kind::cycled, 0, static_cast<int>(u),
                                                static_cast<int>(u_max), Equivalence::symmetric};
                        return trace;
                    }
                }
            }
        }
    }
    trace.outcome = Outcome{Outcome::Kind::budget_exhausted, 0, 0, 0, Equivalence::exact};
    return trace;
}

std::optional<Outcome> detect_cycle(const DynamicsTrace& trace, const DynamicsOptions& options) {
    std::vector<StrategyProfile> states;
    std::vector<int> next_movers;
    for (std::size_t t = 0; t < trace.state_count(); ++t) states.push_back(trace.state(t));
    if (options.schedule == Schedule::round_robin && !states.empty()) {
        const int n = static_cast<int>(trace.initial.size());
        int mover = ((options.first_mover % n) + n) % n;
        for (std::size_t t = 0; t < states.size(); ++t) {
            next_movers.push_back(mover);
            mover = next_round_robin(mover, n);
        }
    } else {
        for (const auto& s : trace.steps) next_movers.push_back(s.mover);
        next_movers.push_back(-1);
    }
    return detect_cycle(states, next_movers, options.symmetric_cycles);
}

TraceReport verify_trace(const RankingGame& game, const std::vector<StrategyProfile>& states,
                         const std::vector<int>& movers) {
    if (states.empty()) throw InputError("empty state sequence");
    if (!movers.empty() && movers.size() + 1 != states.size()) {
        throw InputError("movers must have one entry per transition");
    }
    for (const auto& s : states) require_valid(s, game);

    TraceReport out;
    for (std::size_t t = 1; t < states.size(); ++t) {
        const auto& prev = states[t - 1];
        const auto& next = states[t];
        std::vector<int> changed;
        for (std::size_t i = 0; i < prev.size(); ++i) {
            if (!(prev[i] == next[i])) changed.push_back(static_cast<int>(i));
        }
        if (changed.size() > 1) {
            throw InputError("states " + std::to_string(t - 1) + " and " + std::to_string(t) + " differ in " +
                             std::to_string(changed.size()) + " players");
        }
        StepReport row;
        row.step = static_cast<int>(t);
        if (!movers.empty()) {
            row.mover = movers[t - 1];
            if (!changed.empty() && changed[0] != *row.mover) {
                throw InputError("step " + std::to_string(t) + " changes player " + std::to_string(changed[0]) +
                                 " but the mover is " + std::to_string(*row.mover));
            }
        } else if (!changed.empty()) {
            row.mover = changed[0];
        }
        row.stay = changed.empty();

        const auto after = utilities(game, next);
        const auto method = game.queries() > kMaxEnumerationQueries ? BestResponseMethod::greedy
                                                                    : BestResponseMethod::enumerate;
        if (row.mover) {
            const auto i = static_cast<std::size_t>(*row.mover);
            row.value = after[i];
            row.best = best_response_value(game, prev, *row.mover, method).attained_value;
            row.optimal = row.value == row.best;
        } else {
            row.optimal = true;
            for (int i = 0; i < game.players(); ++i) {
                if (best_response_value(game, prev, i, method).attained_value > after[static_cast<std::size_t>(i)]) {
                    row.optimal = false;
                }
            }
        }
        out.all_optimal = out.all_optimal && row.optimal;
        out.steps.push_back(row);
    }
    return out;
}

nlohmann::json to_json(const Outcome& outcome) {
    nlohmann::json out;
    switch (outcome.kind) {
        case Outcome::Kind::converged:
            out["kind"] = "converged";
            out["round"] = outcome.round;
            break;
        case Outcome::Kind::cycled:
            out["kind"] = "cycled";
            out["first"] = outcome.first;
            out["second"] = outcome.second;
            out["equivalence"] = outcome.equivalence == Equivalence::exact ? "exact" : "symmetric";
            break;
        case Outcome::Kind::budget_exhausted:
            out["kind"] = "budget_exhausted";
            break;
    }
    return out;
}

nlohmann::json to_json(const TraceReport& report) {
    nlohmann::json out;
    out["all_optimal"] = report.all_optimal;
    auto rows = nlohmann::json::array();
    for (const auto& s : report.steps) {
        nlohmann::json row;
        row["step"] = s.step;
        row["mover"] = s.mover ? nlohmann::json(*s.mover) : nlohmann::json(nullptr);
        row["stay"] = s.stay;
        row["value"] = s.mover ? to_json(s.value) : nlohmann::json(nullptr);
        row["best"] = s.mover ? to_json(s.best) : nlohmann::json(nullptr);
        row["optimal"] = s.optimal;
        rows.push_back(row);
    }
    out["steps"] = rows;
    return out;
}

}  // namespace mqrank
