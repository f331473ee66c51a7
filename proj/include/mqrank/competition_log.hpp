#pragma once

// Multi-round, multi-query competition histories.
//
// File format (JSONL, keys sorted, one object per line):
//   optional first line  {"metadata": {...free-form strings...}}
//   then one topic/line  {"queries": [...],
//                         "rounds": [{"documents": [{"is_bot": false, "publisher": "p1", "text": "..."}, ...],
//                                     "rankings": [["p1", "p0", ...], ...],   // one per query, rank 1 first
//                                     "round": 1}, ...],
//                         "topic_id": "t01"}

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mqrank {

struct SubmittedDocument {
    std::string text;
    bool is_bot = false;
};

struct RoundRecord {
    int round = 1;
    std::map<std::string, SubmittedDocument> documents;  // by publisher id
    std::vector<std::vector<std::string>> rankings;      // per query, rank 1 first

    int rank_of(std::size_t query, const std::string& publisher) const;
    const std::string& winner(std::size_t query) const { return rankings.at(query).front(); }
};

struct GameHistory {
    std::string topic_id;
    std::vector<std::string> queries;
    std::vector<RoundRecord> rounds;  // rounds[l-1] has round index l

    const RoundRecord& round(int l) const { return rounds.at(static_cast<std::size_t>(l - 1)); }
};

struct CompetitionLog {
    std::map<std::string, std::string> metadata;
    std::vector<GameHistory> topics;
};

/// Throws InputError naming the topic, round and query of the first problem.
void validate_log(const CompetitionLog& log);

CompetitionLog parse_log(const std::string& text);
CompetitionLog load_log(const std::string& path);
std::string serialize_log(const CompetitionLog& log);
void save_log(const CompetitionLog& log, const std::string& path);

struct EligibleTriple {
    std::size_t topic = 0;  // index into log.topics
    std::size_t query = 0;
    int round = 0;  // l >= 3
};

/// (topic, query, l) with l >= 3 whose round-l winner is not a bot and differs
/// from the round-(l-1) winner.
std::vector<EligibleTriple> filter_for_prediction(const CompetitionLog& log);

struct WinSpreadRow {
    int wins = 0;        // x
    long documents = 0;  // winning documents that won exactly x queries
    double percentage = 0;
    std::optional<double> mean_nonwon_rank;  // over the queries those documents did not win
};

struct WinSpreadReport {
    std::vector<WinSpreadRow> overall;
    std::map<std::string, std::vector<WinSpreadRow>> per_topic;
};

/// A winning document is a (publisher, round) that ranks first for at least one query.
WinSpreadReport report_win_spread(const CompetitionLog& log);

struct AgreementRow {
    int round = 0;
    double mean_rbo = 0;
    int topics = 0;
};

/// Mean pairwise RBO (persistence 0.9) between the per-query rankings of a
/// topic, averaged over topics, per round. Refuses topics with fewer than two
/// queries.
std::vector<AgreementRow> report_ranking_agreement(const CompetitionLog& log, double persistence = 0.9);

struct StrategyMix {
    double mimic = 0.5;
    double static_doc = 0.25;
    double random_edit = 0.25;
};

struct SynthConfig {
    int publishers = 4;  // non-bot publishers per topic
    int bots = 1;
    int topics = 30;
    int queries = 3;
    int rounds = 10;
    StrategyMix mix;
    int vocabulary = 300;
    int topic_terms = 12;
    int query_length = 2;
    int document_length = 50;
    double stopword_rate = 0.35;
    double topic_rate = 0.25;  // share of non-stopword tokens drawn from the topic's terms
    double edit_rate = 0.2;    // share of tokens rewritten per round by editing strategies
    std::map<std::string, double> ranker_weights{{"bm25", 1.0}, {"normtf", 2.0}, {"lmir", 0.05}};
};

SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthConfig& config);

/// Deterministic given (config, seed). Rankings come from a weighted sum of
/// document features over the round's documents, ties broken by publisher id.
CompetitionLog synthesize(const SynthConfig& config, std::uint64_t seed);

nlohmann::json to_json(const WinSpreadReport& report);
nlohmann::json to_json(const std::vector<AgreementRow>& rows);

}  // namespace mqrank
