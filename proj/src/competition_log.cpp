#include "mqrank/competition_log.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "mqrank/errors.hpp"
#include "mqrank/text_features.hpp"

namespace mqrank {

int RoundRecord::rank_of(std::size_t query, const std::string& publisher) const {
    const auto& list = rankings.at(query);
    const auto it = std::find(list.begin(), list.end(), publisher);
    if (it == list.end()) throw InputError("publisher " + publisher + " missing from ranking");
    return static_cast<int>(it - list.begin()) + 1;
}

void validate_log(const CompetitionLog& log) {
    std::set<std::string> topic_ids;
    for (const auto& topic : log.topics) {
        const std::string where = "topic " + topic.topic_id;
        if (!topic_ids.insert(topic.topic_id).second) throw InputError("duplicate topic id " + topic.topic_id);
        if (topic.queries.empty()) throw InputError(where + ": no queries");
        std::set<std::string> publishers;
        for (std::size_t r = 0; r < topic.rounds.size(); ++r) {
            const auto& round = topic.rounds[r];
            const std::string at = where + " round " + std::to_string(round.round);
            if (round.round != static_cast<int>(r) + 1) {
                throw InputError(at + ": rounds must be numbered 1, 2, ... (expected " + std::to_string(r + 1) + ")");
            }
            std::set<std::string> current;
            for (const auto& [p, doc] : round.documents) current.insert(p);
            if (current.empty()) throw InputError(at + ": no documents");
            if (r == 0) {
                publishers = current;
            } else if (current != publishers) {
                throw InputError(at + ": publisher set differs from round 1");
            }
            if (round.rankings.size() != topic.queries.size()) {
                throw InputError(at + ": expected " + std::to_string(topic.queries.size()) + " rankings, got " +
                                 std::to_string(round.rankings.size()));
            }
            for (std::size_t q = 0; q < round.rankings.size(); ++q) {
                std::set<std::string> seen;
                for (const auto& p : round.rankings[q]) {
                    if (!current.count(p)) {
                        throw InputError(at + " query " + std::to_string(q) + ": unknown publisher " + p);
                    }
                    if (!seen.insert(p).second) {
                        throw InputError(at + " query " + std::to_string(q) + ": publisher " + p + " listed twice");
                    }
                }
                if (seen.size() != current.size()) {
                    throw InputError(at + " query " + std::to_string(q) + ": ranking does not list every publisher");
                }
            }
        }
    }
}

namespace {

nlohmann::json topic_to_json(const GameHistory& topic) {
    nlohmann::json j;
    j["topic_id"] = topic.topic_id;
    j["queries"] = topic.queries;
    auto rounds = nlohmann::json::array();
    for (const auto& r : topic.rounds) {
        nlohmann::json jr;
        jr["round"] = r.round;
        auto docs = nlohmann::json::array();
        for (const auto& [p, d] : r.documents) {
            docs.push_back({{"publisher", p}, {"text", d.text}, {"is_bot", d.is_bot}});
        }
        jr["documents"] = docs;
        jr["rankings"] = r.rankings;
        rounds.push_back(jr);
    }
    j["rounds"] = rounds;
    return j;
}

template <typename T>
T field(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(where + ": \"" + key + "\" has the wrong type");
    }
}

GameHistory topic_from_json(const nlohmann::json& j, const std::string& where) {
    GameHistory topic;
    topic.topic_id = field<std::string>(j, "topic_id", where);
    topic.queries = field<std::vector<std::string>>(j, "queries", where);
    const auto rounds = field<nlohmann::json>(j, "rounds", where);
    if (!rounds.is_array()) throw InputError(where + ": \"rounds\" must be an array");
    for (const auto& jr : rounds) {
        RoundRecord r;
        r.round = field<int>(jr, "round", where);
        const std::string at = where + " round " + std::to_string(r.round);
        const auto docs = field<nlohmann::json>(jr, "documents", at);
        if (!docs.is_array()) throw InputError(at + ": \"documents\" must be an array");
        for (const auto& jd : docs) {
            const auto p = field<std::string>(jd, "publisher", at);
            SubmittedDocument d{field<std::string>(jd, "text", at), jd.value("is_bot", false)};
            if (!r.documents.emplace(p, d).second) throw InputError(at + ": publisher " + p + " submitted twice");
        }
        r.rankings = field<std::vector<std::vector<std::string>>>(jr, "rankings", at);
        topic.rounds.push_back(std::move(r));
    }
    return topic;
}

}  // namespace

CompetitionLog parse_log(const std::string& text) {
    CompetitionLog log;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "line " + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError(where + ": " + e.what());
        }
        if (first && j.is_object() && j.contains("metadata") && !j.contains("topic_id")) {
            log.metadata = field<std::map<std::string, std::string>>(j, "metadata", where);
        } else {
            log.topics.push_back(topic_from_json(j, where));
        }
        first = false;
    }
    try {
        validate_log(log);
    } catch (const InputError& e) {
        throw InputError(std::string("invalid log: ") + e.what());
    }
    return log;
}

CompetitionLog load_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_log(buf.str());
}

std::string serialize_log(const CompetitionLog& log) {
    std::string out;
    if (!log.metadata.empty()) {
        out += nlohmann::json{{"metadata", log.metadata}}.dump();
        out += '\n';
    }
    for (const auto& t : log.topics) {
        out += topic_to_json(t).dump();
        out += '\n';
    }
    return out;
}

void save_log(const CompetitionLog& log, const std::string& path) {
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw InputError("cannot write " + path);
    outf << serialize_log(log);
}

std::vector<EligibleTriple> filter_for_prediction(const CompetitionLog& log) {
    std::vector<EligibleTriple> out;
    for (std::size_t t = 0; t < log.topics.size(); ++t) {
        const auto& topic = log.topics[t];
        for (int l = 3; l <= static_cast<int>(topic.rounds.size()); ++l) {
            for (std::size_t q = 0; q < topic.queries.size(); ++q) {
                const auto& winner = topic.round(l).winner(q);
                if (topic.round(l).documents.at(winner).is_bot) continue;
                if (winner == topic.round(l - 1).winner(q)) continue;
                out.push_back({t, q, l});
            }
        }
    }
    return out;
}

namespace {

struct SpreadAccumulator {
    std::vector<long> docs;
    std::vector<double> rank_sum;
    std::vector<long> rank_count;

    explicit SpreadAccumulator(std::size_t m) : docs(m + 1), rank_sum(m + 1), rank_count(m + 1) {}

    void add(const GameHistory& topic) {
        const std::size_t m = topic.queries.size();
        for (const auto& round : topic.rounds) {
            for (const auto& [p, d] : round.documents) {
                std::size_t wins = 0;
                for (std::size_t q = 0; q < m; ++q) wins += round.winner(q) == p;
                if (wins == 0 || wins >= docs.size()) continue;
                ++docs[wins];
                for (std::size_t q = 0; q < m; ++q) {
                    if (round.winner(q) == p) continue;
                    rank_sum[wins] += round.rank_of(q, p);
                    ++rank_count[wins];
                }
            }
        }
    }

    std::vector<WinSpreadRow> rows() const {
        long total = 0;
        for (std::size_t x = 1; x < docs.size(); ++x) total += docs[x];
        std::vector<WinSpreadRow> out;
        for (std::size_t x = 1; x < docs.size(); ++x) {
            WinSpreadRow row;
            row.wins = static_cast<int>(x);
            row.documents = docs[x];
            row.percentage = total > 0 ? 100.0 * static_cast<double>(docs[x]) / static_cast<double>(total) : 0.0;
            if (rank_count[x] > 0) row.mean_nonwon_rank = rank_sum[x] / static_cast<double>(rank_count[x]);
            out.push_back(row);
        }
        return out;
    }
};

}  // namespace

WinSpreadReport report_win_spread(const CompetitionLog& log) {
    std::size_t max_m = 0;
    for (const auto& t : log.topics) max_m = std::max(max_m, t.queries.size());
    SpreadAccumulator all(max_m);
    WinSpreadReport out;
    for (const auto& t : log.topics) {
        SpreadAccumulator one(t.queries.size());
        one.add(t);
        all.add(t);
        out.per_topic[t.topic_id] = one.rows();
    }
    out.overall = all.rows();
    return out;
}

std::vector<AgreementRow> report_ranking_agreement(const CompetitionLog& log, double persistence) {
    std::map<int, std::pair<double, int>> by_round;
    for (const auto& t : log.topics) {
        if (t.queries.size() < 2) {
            throw DomainError("topic " + t.topic_id + " has a single query; ranking agreement needs at least two");
        }
        for (const auto& r : t.rounds) {
            double sum = 0;
            int pairs = 0;
            for (std::size_t a = 0; a < r.rankings.size(); ++a) {
                for (std::size_t b = a + 1; b < r.rankings.size(); ++b) {
                    sum += rbo(r.rankings[a], r.rankings[b], persistence);
                    ++pairs;
                }
            }
            auto& acc = by_round[r.round];
            acc.first += sum / pairs;
            acc.second += 1;
        }
    }
    std::vector<AgreementRow> out;
    for (const auto& [round, acc] : by_round) out.push_back({round, acc.first / acc.second, acc.second});
    return out;
}

// ---------------------------------------------------------------- synthesis

SynthConfig synth_config_from_json(const nlohmann::json& j) {
    SynthConfig c;
    if (!j.is_object()) throw InputError("config must be a JSON object");
    static const std::set<std::string> known{"publishers", "bots", "topics", "queries", "rounds", "mix",
                                             "vocabulary", "topic_terms", "query_length", "document_length",
                                             "stopword_rate", "topic_rate", "edit_rate", "ranker_weights"};
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw InputError("unknown config key \"" + k + "\"");
    }
    try {
        c.publishers = j.value("publishers", c.publishers);
        c.bots = j.value("bots", c.bots);
        c.topics = j.value("topics", c.topics);
        c.queries = j.value("queries", c.queries);
        c.rounds = j.value("rounds", c.rounds);
        c.vocabulary = j.value("vocabulary", c.vocabulary);
        c.topic_terms = j.value("topic_terms", c.topic_terms);
        c.query_length = j.value("query_length", c.query_length);
        c.document_length = j.value("document_length", c.document_length);
        c.stopword_rate = j.value("stopword_rate", c.stopword_rate);
        c.topic_rate = j.value("topic_rate", c.topic_rate);
        c.edit_rate = j.value("edit_rate", c.edit_rate);
        if (j.contains("mix")) {
            const auto& m = j.at("mix");
            c.mix.mimic = m.value("mimic", 0.0);
            c.mix.static_doc = m.value("static", 0.0);
            c.mix.random_edit = m.value("random_edit", 0.0);
        }
        if (j.contains("ranker_weights")) c.ranker_weights = j.at("ranker_weights").get<std::map<std::string, double>>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad config value: ") + e.what());
    }
    if (c.publishers + c.bots < 2) throw DomainError("a competition needs at least two publishers");
    if (c.publishers < 0 || c.bots < 0 || c.topics < 1 || c.queries < 1 || c.rounds < 1) {
        throw DomainError("publishers, bots >= 0; topics, queries, rounds >= 1");
    }
    if (c.vocabulary < 1 || c.topic_terms < 1 || c.query_length < 1 || c.document_length < 1) {
        throw DomainError("vocabulary, topic_terms, query_length and document_length must be >= 1");
    }
    if (c.topic_terms > c.vocabulary) throw DomainError("topic_terms exceeds vocabulary");
    const double mix_total = c.mix.mimic + c.mix.static_doc + c.mix.random_edit;
    if (c.mix.mimic < 0 || c.mix.static_doc < 0 || c.mix.random_edit < 0 || !(mix_total > 0)) {
        throw DomainError("strategy mix weights must be non-negative with a positive sum");
    }
    for (const auto& [name, w] : c.ranker_weights) {
        const auto& names = document_feature_names();
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            throw InputError("unknown ranker feature \"" + name + "\"");
        }
    }
    return c;
}

nlohmann::json to_json(const SynthConfig& c) {
    return {{"publishers", c.publishers},
            {"bots", c.bots},
            {"topics", c.topics},
            {"queries", c.queries},
            {"rounds", c.rounds},
            {"mix", {{"mimic", c.mix.mimic}, {"static", c.mix.static_doc}, {"random_edit", c.mix.random_edit}}},
            {"vocabulary", c.vocabulary},
            {"topic_terms", c.topic_terms},
            {"query_length", c.query_length},
            {"document_length", c.document_length},
            {"stopword_rate", c.stopword_rate},
            {"topic_rate", c.topic_rate},
            {"edit_rate", c.edit_rate},
            {"ranker_weights", c.ranker_weights}};
}

namespace {

enum class Strategy { mimic, static_doc, random_edit };

// Own helpers instead of <random> distributions, whose output is
// implementation-defined: logs must be byte-identical across toolchains.
std::size_t draw_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string padded(const std::string& prefix, int i, int count) {
    const auto width = std::to_string(std::max(count - 1, 0)).size();
    std::string digits = std::to_string(i);
    return prefix + std::string(width - std::min(width, digits.size()), '0') + digits;
}

std::vector<Strategy> assign_strategies(const StrategyMix& mix, int count, std::mt19937_64& rng) {
    const double weights[3] = {mix.mimic, mix.static_doc, mix.random_edit};
    const double total = weights[0] + weights[1] + weights[2];
    int base[3];
    double rem[3];
    int assigned = 0;
    for (int s = 0; s < 3; ++s) {
        const double exact = weights[s] / total * count;
        base[s] = static_cast<int>(std::floor(exact));
        rem[s] = exact - base[s];
        assigned += base[s];
    }
    while (assigned < count) {
        int best = 0;
        for (int s = 1; s < 3; ++s) {
            if (rem[s] > rem[best]) best = s;
        }
        ++base[best];
        rem[best] = -1;
        ++assigned;
    }
    std::vector<Strategy> out;
    for (int s = 0; s < 3; ++s) out.insert(out.end(), static_cast<std::size_t>(base[s]), static_cast<Strategy>(s));
    for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[draw_index(rng, i)]);
    return out;
}

struct TopicWords {
    std::vector<std::string> topic;
    std::vector<std::string> general;
    std::vector<std::string> stop;
};

std::string draw_token(const SynthConfig& c, const TopicWords& w, std::mt19937_64& rng) {
    if (draw_unit(rng) < c.stopword_rate) return w.stop[draw_index(rng, w.stop.size())];
    if (draw_unit(rng) < c.topic_rate) return w.topic[draw_index(rng, w.topic.size())];
    return w.general[draw_index(rng, w.general.size())];
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

std::vector<std::vector<std::string>> rank_round(const SynthConfig& c, const GameHistory& topic,
                                                 const RoundRecord& round) {
    std::map<std::string, TokenizedDocument> docs;
    std::vector<TokenizedDocument> all;
    for (const auto& [p, d] : round.documents) {
        docs[p] = tokenize(d.text);
        all.push_back(docs[p]);
    }
    const CorpusStats stats(all);
    std::vector<std::vector<std::string>> out;
    for (const auto& q : topic.queries) {
        const auto query = tokenize(q).tokens;
        std::vector<std::pair<double, std::string>> scored;
        for (const auto& [p, doc] : docs) {
            const auto f = compute_features(doc, query, stats, default_stopwords());
            const double values[8] = {f.tf, f.normtf, f.bm25, f.lmir, f.len, f.fracstop, f.stopcover, f.ent};
            double s = 0;
            const auto& names = document_feature_names();
            for (std::size_t k = 0; k < names.size(); ++k) {
                const auto it = c.ranker_weights.find(names[k]);
                if (it != c.ranker_weights.end()) s += it->second * values[k];
            }
            scored.emplace_back(s, p);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        std::vector<std::string> ranking;
        for (const auto& [s, p] : scored) ranking.push_back(p);
        out.push_back(std::move(ranking));
    }
    return out;
}

}  // namespace

CompetitionLog synthesize(const SynthConfig& c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CompetitionLog log;
    log.metadata = {{"generator", "synthetic"},
                    {"seed", std::to_string(seed)},
                    {"ranker", "weighted-features"},
                    {"ai_tools", "none"}};

    std::vector<std::string> vocabulary;
    for (int v = 0; v < c.vocabulary; ++v) vocabulary.push_back(padded("w", v, c.vocabulary));
    const std::vector<std::string> stop(default_stopwords().begin(), default_stopwords().end());
    const int players = c.publishers + c.bots;

    for (int t = 0; t < c.topics; ++t) {
        GameHistory topic;
        topic.topic_id = padded("t", t, c.topics);

        TopicWords words;
        words.stop = stop;
        std::vector<std::string> pool = vocabulary;
        for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[draw_index(rng, i)]);
        words.topic.assign(pool.begin(), pool.begin() + c.topic_terms);
        words.general.assign(pool.begin() + c.topic_terms, pool.end());
        if (words.general.empty()) words.general = words.topic;

        for (int q = 0; q < c.queries; ++q) {
            std::vector<std::string> terms;
            for (int k = 0; k < c.query_length; ++k) {
                terms.push_back(words.topic[static_cast<std::size_t>(q * c.query_length + k) % words.topic.size()]);
            }
            topic.queries.push_back(join(terms));
        }

        std::vector<std::string> ids;
        std::vector<Strategy> strategy = assign_strategies(c.mix, c.publishers, rng);
        for (int i = 0; i < c.publishers; ++i) ids.push_back(padded("p", i, players));
        for (int i = 0; i < c.bots; ++i) {
            ids.push_back(padded("p", c.publishers + i, players));
            strategy.push_back(Strategy::mimic);
        }

        std::vector<std::vector<std::string>> current(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (int k = 0; k < c.document_length; ++k) current[i].push_back(draw_token(c, words, rng));
        }

        for (int l = 1; l <= c.rounds; ++l) {
            if (l > 1) {
                const auto& prev = topic.rounds.back();
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    auto& doc = current[i];
                    if (strategy[i] == Strategy::static_doc) continue;
                    if (strategy[i] == Strategy::mimic) {
                        const std::size_t q = draw_index(rng, topic.queries.size());
                        const auto& winner = prev.winner(q);
                        if (winner == ids[i]) continue;
                        const auto source = split(prev.documents.at(winner).text);
                        for (auto& token : doc) {
                            if (draw_unit(rng) < c.edit_rate) token = source[draw_index(rng, source.size())];
                        }
                    } else {
                        for (auto& token : doc) {
                            if (draw_unit(rng) < c.edit_rate) token = draw_token(c, words, rng);
                        }
                    }
                }
            }
            RoundRecord round;
            round.round = l;
            for (std::size_t i = 0; i < ids.size(); ++i) {
                round.documents[ids[i]] = SubmittedDocument{join(current[i]), static_cast<int>(i) >= c.publishers};
            }
            round.rankings = rank_round(c, topic, round);
            topic.rounds.push_back(std::move(round));
        }
        log.topics.push_back(std::move(topic));
    }
    return log;
}

nlohmann::json to_json(const WinSpreadReport& report) {
    auto rows_json = [](const std::vector<WinSpreadRow>& rows) {
        auto arr = nlohmann::json::array();
        for (const auto& r : rows) {
            arr.push_back({{"wins", r.wins},
                           {"documents", r.documents},
                           {"percentage", r.percentage},
                           {"mean_nonwon_rank",
                            r.mean_nonwon_rank ? nlohmann::json(*r.mean_nonwon_rank) : nlohmann::json(nullptr)}});
        }
        return arr;
    };
    nlohmann::json out;
    out["overall"] = rows_json(report.overall);
    nlohmann::json per_topic = nlohmann::json::object();
    for (const auto& [id, rows] : report.per_topic) per_topic[id] = rows_json(rows);
    out["per_topic"] = per_topic;
    return out;
}

nlohmann::json to_json(const std::vector<AgreementRow>& rows) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back({{"round", r.round}, {"mean_rbo", r.mean_rbo}, {"topics", r.topics}});
    return arr;
}

}  // namespace mqrank
