#include "mqrank/game.hpp"

#include <algorithm>
#include <numeric>

#include "mqrank/errors.hpp"

namespace mqrank {

// ---------------------------------------------------------------- f

SinglePeakFunction SinglePeakFunction::tent(const Rational& peak) {
    if (peak < 0 || peak > 1) throw InputError("peak must lie in [0,1], got " + to_string(peak));
    if (peak == 0) return SinglePeakFunction({{0, 1}, {1, 0}}, 0);
    if (peak == 1) return SinglePeakFunction({{0, 0}, {1, 1}}, 1);
    return SinglePeakFunction({{0, 0}, {peak, 1}, {1, 0}}, 1);
}

SinglePeakFunction SinglePeakFunction::from_breakpoints(std::vector<Breakpoint> points) {
    if (points.size() < 2) throw InputError("a single-peak function needs at least two breakpoints");
    if (points.front().x != 0 || points.back().x != 1) {
        throw InputError("breakpoints must start at x=0 and end at x=1");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].y < 0 || points[i].y > 1) throw InputError("function values must lie in [0,1]");
        if (i > 0 && points[i].x <= points[i - 1].x) {
            throw InputError("breakpoint x values must be strictly increasing");
        }
    }
    const auto peak_it = std::max_element(points.begin(), points.end(),
                                          [](const auto& a, const auto& b) { return a.y < b.y; });
    const auto peak_index = static_cast<std::size_t>(peak_it - points.begin());
    for (std::size_t i = 1; i < points.size(); ++i) {
        const bool rising = i <= peak_index;
        if (rising ? !(points[i].y > points[i - 1].y) : !(points[i].y < points[i - 1].y)) {
            throw InputError("function must strictly increase up to the peak and strictly decrease after it");
        }
    }
    return SinglePeakFunction(std::move(points), peak_index);
}

bool SinglePeakFunction::is_tent() const {
    const auto t = tent(peak());
    if (t.points_.size() != points_.size()) return false;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (t.points_[i].x != points_[i].x || t.points_[i].y != points_[i].y) return false;
    }
    return true;
}

Rational SinglePeakFunction::operator()(const Rational& x) const {
    if (x <= 0) return points_.front().y;
    if (x >= 1) return points_.back().y;
    const auto it = std::lower_bound(points_.begin(), points_.end(), x,
                                     [](const Breakpoint& p, const Rational& v) { return p.x < v; });
    if (it->x == x) return it->y;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    Rational out = lo.y + (hi.y - lo.y) * (x - lo.x) / (hi.x - lo.x);
    return out;
}

Rational SinglePeakFunction::inverse_increasing(const Rational& y) const {
    if (y < points_.front().y || y > max_value()) {
        throw DomainError("value " + to_string(y) + " outside the increasing branch's range");
    }
    for (std::size_t i = 0; i < peak_index_; ++i) {
        const auto& lo = points_[i];
        const auto& hi = points_[i + 1];
        if (y <= hi.y) {
            Rational out = lo.x + (hi.x - lo.x) * (y - lo.y) / (hi.y - lo.y);
            return out;
        }
    }
    return peak();
}

// ---------------------------------------------------------------- values

Rational EmphasisVector::total() const {
    Rational sum = 0;
    for (const auto& e : emphases) sum += e;
    return sum;
}

RankingGame::RankingGame(int players, int queries, SinglePeakFunction f)
    : players_(players), queries_(queries), f_(std::move(f)) {
    if (players < 1) throw InputError("n must be >= 1");
    if (queries < 1) throw InputError("m must be >= 1");
}

StrategyProfile StrategyProfile::with(std::size_t i, EmphasisVector strategy) const {
    StrategyProfile out = *this;
    out.strategies.at(i) = std::move(strategy);
    return out;
}

// ---------------------------------------------------------------- scoring

Rational score(const RankingGame& game, const EmphasisVector& strategy, int query_index) {
    if (query_index < 0 || query_index >= game.queries() ||
        static_cast<std::size_t>(query_index) >= strategy.size()) {
        throw DomainError("query index " + std::to_string(query_index) + " out of range [0," +
                          std::to_string(game.queries()) + ")");
    }
    return game.f()(strategy[static_cast<std::size_t>(query_index)]);
}

InducedRanking induce_ranking(const RankingGame& game, const StrategyProfile& profile,
                              int query_index) {
    require_valid(profile, game);
    std::vector<std::pair<Rational, int>> scored;
    scored.reserve(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        scored.emplace_back(score(game, profile[i], query_index), static_cast<int>(i));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    InducedRanking out;
    out.query_index = query_index;
    for (auto& [s, player] : scored) {
        if (out.groups.empty() || out.groups.back().score != s) {
            out.groups.push_back(TieGroup{s, {}});
        }
        out.groups.back().players.push_back(player);
    }
    return out;
}

UtilityVector utilities(const RankingGame& game, const StrategyProfile& profile) {
    require_valid(profile, game);
    const auto n = profile.size();
    UtilityVector out(n);
    std::vector<Rational> scores(n);
    for (int j = 0; j < game.queries(); ++j) {
        Rational top;
        std::size_t h = 0;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = game.f()(profile[i][static_cast<std::size_t>(j)]);
            if (h == 0 || scores[i] > top) {
                top = scores[i];
                h = 1;
            } else if (scores[i] == top) {
                ++h;
            }
        }
        const Rational share(1, static_cast<unsigned long>(h));
        for (std::size_t i = 0; i < n; ++i) {
            if (scores[i] == top) out[i] += share;
        }
    }
    return out;
}

// ---------------------------------------------------------------- validation

std::vector<Violation> validate_strategy(const EmphasisVector& strategy, int queries, int player) {
    std::vector<Violation> out;
    if (strategy.size() != static_cast<std::size_t>(queries)) {
        out.push_back({Violation::Kind::length, player,
                       "length " + std::to_string(strategy.size()) + " != " + std::to_string(queries)});
    }
    for (std::size_t j = 0; j < strategy.size(); ++j) {
        if (strategy[j] < 0 || strategy[j] > 1) {
            out.push_back({Violation::Kind::range, player,
                           "emphasis[" + std::to_string(j) + "] = " + to_string(strategy[j]) +
                               " outside [0,1]"});
        }
    }
    const Rational sum = strategy.total();
    if (sum > 1) {
        out.push_back({Violation::Kind::simplex_cap, player,
                       "sum " + display(sum) + " > 1"});
    }
    return out;
}

std::vector<Violation> validate(const StrategyProfile& profile, const RankingGame& game) {
    std::vector<Violation> out;
    if (profile.size() != static_cast<std::size_t>(game.players())) {
        out.push_back({Violation::Kind::player_count, -1,
                       "profile has " + std::to_string(profile.size()) + " strategies, game has n = " +
                           std::to_string(game.players())});
    }
    for (std::size_t i = 0; i < profile.size(); ++i) {
        auto v = validate_strategy(profile[i], game.queries(), static_cast<int>(i));
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

void require_valid(const StrategyProfile& profile, const RankingGame& game) {
    const auto violations = validate(profile, game);
    if (violations.empty()) return;
    std::string msg = "invalid strategy profile:";
    for (const auto& v : violations) {
        msg += v.player >= 0 ? " [player " + std::to_string(v.player) + "] " : " ";
        msg += v.message + ";";
    }
    throw InputError(msg);
}

// ---------------------------------------------------------------- JSON

nlohmann::json strategy_to_json(const EmphasisVector& strategy) {
    auto out = nlohmann::json::array();
    for (const auto& e : strategy.emphases) out.push_back(to_json(e));
    return out;
}

nlohmann::json profile_to_json(const StrategyProfile& profile) {
    auto out = nlohmann::json::array();
    for (const auto& s : profile.strategies) out.push_back(strategy_to_json(s));
    return out;
}

EmphasisVector strategy_from_json(const nlohmann::json& value) {
    if (!value.is_array()) throw InputError("a strategy must be a JSON array");
    EmphasisVector out;
    for (const auto& e : value) out.emphases.push_back(rational_from_json(e));
    return out;
}

StrategyProfile profile_from_json(const nlohmann::json& value) {
    if (!value.is_array()) throw InputError("\"strategies\" must be an array of arrays");
    StrategyProfile out;
    for (const auto& s : value) out.strategies.push_back(strategy_from_json(s));
    return out;
}

nlohmann::json game_document_to_json(const RankingGame& game, const StrategyProfile& profile) {
    nlohmann::json doc;
    doc["n"] = game.players();
    doc["m"] = game.queries();
    doc["peak"] = to_json(game.peak());
    if (!game.f().is_tent()) {
        auto f = nlohmann::json::array();
        for (const auto& p : game.f().breakpoints()) f.push_back({to_json(p.x), to_json(p.y)});
        doc["f"] = f;
    }
    doc["strategies"] = profile_to_json(profile);
    return doc;
}

ProfileDocument game_document_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw InputError("profile document must be a JSON object");
    for (const char* key : {"n", "m", "strategies"}) {
        if (!doc.contains(key)) throw InputError(std::string("profile document lacks \"") + key + "\"");
    }
    const int n = doc.at("n").get<int>();
    const int m = doc.at("m").get<int>();
    std::optional<SinglePeakFunction> f;
    if (doc.contains("f")) {
        std::vector<SinglePeakFunction::Breakpoint> points;
        for (const auto& p : doc.at("f")) {
            if (!p.is_array() || p.size() != 2) throw InputError("\"f\" entries must be [x, y] pairs");
            points.push_back({rational_from_json(p[0]), rational_from_json(p[1])});
        }
        f = SinglePeakFunction::from_breakpoints(std::move(points));
        if (doc.contains("peak") && rational_from_json(doc.at("peak")) != f->peak()) {
            throw InputError("\"peak\" disagrees with the peak of \"f\"");
        }
    } else {
        if (!doc.contains("peak")) throw InputError("profile document lacks \"peak\"");
        f = SinglePeakFunction::tent(rational_from_json(doc.at("peak")));
    }
    ProfileDocument out{RankingGame(n, m, std::move(*f)), profile_from_json(doc.at("strategies"))};
    return out;
}

}  // namespace mqrank
