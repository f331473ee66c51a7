#include "mqrank/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mqrank/best_response.hpp"
#include "mqrank/competition_log.hpp"
#include "mqrank/dynamics.hpp"
#include "mqrank/equilibria.hpp"
#include "mqrank/errors.hpp"
#include "mqrank/grid_oracle.hpp"
#include "mqrank/prediction.hpp"
#include "mqrank/rational.hpp"
#include "mqrank/text_features.hpp"

namespace mqrank {
namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    return out;
}

void flatten(const json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object() && !j.empty()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else {
        out << prefix << '\t' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
    }
}

// Schema helpers: {"type": "object", "properties": {...}}.
json type(const char* t) { return {{"type", t}}; }
json object(std::initializer_list<std::pair<const char*, json>> props) {
    json p = json::object();
    for (const auto& [k, v] : props) p[k] = v;
    return {{"type", "object"}, {"properties", p}};
}
json array_of(json items) { return {{"type", "array"}, {"items", std::move(items)}}; }
json rational() { return {{"type", {"number", "string"}}, {"description", "exact value; \"p/q\" when not a finite decimal"}}; }
json metrics_schema() { return object({{"acc", type("number")}, {"f1", type("number")}, {"groups", type("integer")}}); }
json cv_schema() {
    return object({{"grid", array_of(type("number"))},
                   {"seed", type("integer")},
                   {"acc", type("number")},
                   {"f1", type("number")},
                   {"folds", array_of(object({{"test_round", type("integer")},
                                              {"selected_c", type("number")},
                                              {"validation_acc", array_of(type("number"))},
                                              {"test", metrics_schema()}}))}});
}
json nash_schema() {
    return object({{"is_nash", type("boolean")},
                   {"per_player", array_of(object({{"player", type("integer")},
                                                   {"current_utility", rational()},
                                                   {"best_attained_deviation", rational()},
                                                   {"best_sup_deviation", rational()},
                                                   {"improving_witness", array_of(rational())}}))}});
}
json profile_doc_schema() {
    return object({{"n", type("integer")},
                   {"m", type("integer")},
                   {"peak", rational()},
                   {"strategies", array_of(array_of(rational()))}});
}

class Cli {
public:
    Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err), app_("Multi-query ranking competitions: equilibria, dynamics, features and winner prediction", "mqrank") {
        app_.require_subcommand(1);
        app_.add_option("--format", format_, "Output rendering")->check(CLI::IsMember({"json", "table"}));
        setup_game();
        setup_features();
        setup_report();
        setup_simulate();
        setup_predict();
    }

    int run(int argc, const char* const* argv) {
        try {
            app_.parse(argc, argv);
        } catch (const CLI::CallForHelp&) {
            out_ << help_text();
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out_ << app_.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::ParseError& e) {
            err_ << "error: " << e.what() << "\n\n" << help_text();
            return 2;
        }
        try {
            if (schema_ && schema_fn_) {
                emit(schema_fn_());
                return 0;
            }
            if (!action_) throw UsageError("no command given");
            action_();
            return 0;
        } catch (const UsageError& e) {
            err_ << "error: " << e.what() << '\n';
            return 2;
        } catch (const DomainError& e) {
            err_ << "error: " << e.what() << '\n';
            return 1;
        } catch (const json::exception& e) {
            err_ << "error: " << e.what() << '\n';
            return 1;
        } catch (const std::logic_error& e) {
            err_ << "internal error: " << e.what() << '\n';
            return 1;
        }
    }

private:
    std::ostream& out_;
    std::ostream& err_;
    CLI::App app_;
    std::string format_ = "json";
    bool schema_ = false;
    std::function<void()> action_;
    std::function<json()> schema_fn_;

    // Options shared across subcommands; each subcommand binds the ones it uses.
    std::string n_, m_, peak_, profile_, epsilon_ = "1/1000", method_ = "enumerate", order_ = "round-robin",
                                         mode_ = "exact", init_, replay_, log_, out_path_, a_, b_, config_,
                                         instances_, params_ = "1,10,50,100", stopwords_, mask_;
    std::optional<long long> seed_;
    std::optional<int> jobs_;
    int player_ = 0, max_rounds_ = 100, grid_ = 0, first_mover_ = 1;
    double persistence_ = 0.9;
    unsigned long long budget_ = 100'000'000ULL;
    bool check_ = false, all_profiles_ = false, no_symmetric_ = false;

    std::string help_text() {
        CLI::App* deepest = &app_;
        while (!deepest->get_subcommands().empty()) deepest = deepest->get_subcommands().front();
        return deepest->help();
    }

    void emit(const json& j) {
        if (format_ == "table") {
            flatten(j, "", out_);
        } else {
            out_ << j.dump() << '\n';
        }
    }

    CLI::App* leaf(CLI::App* parent, const std::string& name, const std::string& help, std::function<json()> schema,
                   std::function<void()> action) {
        auto* sub = parent->add_subcommand(name, help);
        sub->add_flag("--schema", schema_, "Print a JSON schema of the output and exit");
        sub->callback([this, schema, action] {
            schema_fn_ = schema;
            action_ = action;
        });
        return sub;
    }

    static std::string need(const std::string& value, const char* flag) {
        if (value.empty()) throw UsageError(std::string(flag) + " is required");
        return value;
    }

    int need_int(const std::string& value, const char* flag) {
        need(value, flag);
        try {
            std::size_t used = 0;
            const int v = std::stoi(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            return v;
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + " expects an integer, got \"" + value + "\"");
        }
    }

    Rational need_rational(const std::string& value, const char* flag) {
        need(value, flag);
        try {
            return parse_rational(value);
        } catch (const InputError& e) {
            throw UsageError(std::string(flag) + ": " + e.what());
        }
    }

    std::uint64_t seed_value(bool required) const {
        if (seed_) return static_cast<std::uint64_t>(*seed_);
        if (const char* env = std::getenv("MQRANK_SEED"); env && *env) {
            try {
                return std::stoull(env);
            } catch (const std::exception&) {
                throw UsageError(std::string("MQRANK_SEED is not an integer: ") + env);
            }
        }
        if (required) throw UsageError("--seed (or MQRANK_SEED) is required");
        return 0;
    }

    int jobs_value() const {
        if (jobs_) return *jobs_;
        if (const char* env = std::getenv("MQRANK_JOBS"); env && *env) {
            try {
                return std::stoi(env);
            } catch (const std::exception&) {
                throw UsageError(std::string("MQRANK_JOBS is not an integer: ") + env);
            }
        }
        return 0;
    }

    BestResponseMethod method_value() const {
        if (method_ == "greedy") return BestResponseMethod::greedy;
        return BestResponseMethod::enumerate;
    }

    RankingGame game_from_flags() {
        const int n = need_int(n_, "--n");
        const int m = need_int(m_, "--m");
        if (n < 1 || m < 1) throw DomainError("--n and --m must be at least 1");
        return RankingGame(n, m, need_rational(peak_, "--peak"));
    }

    // ------------------------------------------------------------ game

    void setup_game() {
        auto* game = app_.add_subcommand("game", "Equilibria, best responses and dynamics");
        game->require_subcommand(1);

        auto* exists = leaf(
            game, "exists", "Decide whether a pure Nash equilibrium exists",
            [] {
                return object({{"exists", type("boolean")},
                               {"threshold", rational()},
                               {"regime", type("string")},
                               {"n", type("integer")},
                               {"m", type("integer")},
                               {"peak", rational()}});
            },
            [this] {
                const auto g = game_from_flags();
                const auto v = exists_equilibrium(g.players(), g.queries(), g.peak());
                emit({{"exists", v.exists},
                      {"threshold", to_json(v.threshold)},
                      {"regime", to_string(v.regime)},
                      {"n", g.players()},
                      {"m", g.queries()},
                      {"peak", to_json(g.peak())}});
            });
        add_game_flags(exists);

        auto* construct = leaf(
            game, "construct", "Build an equilibrium profile",
            [] {
                auto s = profile_doc_schema();
                s["properties"]["verification"] = nash_schema();
                return s;
            },
            [this] {
                const auto g = game_from_flags();
                const auto profile = construct_equilibrium(g);
                auto doc = game_document_to_json(g, profile);
                if (!out_path_.empty()) {
                    auto f = open_out(out_path_);
                    f << doc.dump(2) << '\n';
                }
                if (check_) {
                    const auto report = verify_nash(g, profile);
                    doc["verification"] = to_json(report);
                    if (!report.is_nash) {
                        emit(doc);
                        throw std::logic_error("constructed profile failed verification");
                    }
                }
                emit(doc);
            });
        add_game_flags(construct);
        construct->add_flag("--check", check_, "Verify the constructed profile");
        construct->add_option("--out", out_path_, "Also write the profile document here");

        auto* verify = leaf(
            game, "verify", "Check a profile for profitable unilateral deviations", [] { return nash_schema(); },
            [this] {
                const auto doc = game_document_from_json(read_json_file(need(profile_, "--profile")));
                emit(to_json(verify_nash(doc.game, doc.profile, method_value())));
            });
        verify->add_option("--profile", profile_, "Profile document (JSON)");
        verify->add_option("--method", method_, "Best-response method")->check(CLI::IsMember({"enumerate", "greedy"}));

        auto* br = leaf(
            game, "best-response", "Best response of one player",
            [] {
                return object({{"player", type("integer")},
                               {"sup_value", rational()},
                               {"attained_value", rational()},
                               {"solo_queries", array_of(type("integer"))},
                               {"tie_queries", array_of(type("integer"))},
                               {"cost", rational()},
                               {"witness", array_of(rational())},
                               {"witness_value", rational()},
                               {"epsilon_used", rational()}});
            },
            [this] {
                const auto doc = game_document_from_json(read_json_file(need(profile_, "--profile")));
                require_valid(doc.profile, doc.game);
                if (player_ < 0 || player_ >= doc.game.players()) throw DomainError("--player out of range");
                const auto best = best_response_value(doc.game, doc.profile, player_, method_value());
                const auto w = best_response_witness(doc.game, doc.profile, player_,
                                                     need_rational(epsilon_, "--epsilon"), LeftoverPolicy::none,
                                                     method_value());
                emit({{"player", player_},
                      {"sup_value", to_json(best.sup_value)},
                      {"attained_value", to_json(best.attained_value)},
                      {"solo_queries", best.plan.solo_set},
                      {"tie_queries", best.plan.tie_set},
                      {"cost", to_json(best.plan.cost)},
                      {"witness", strategy_to_json(w.strategy)},
                      {"witness_value", to_json(w.value)},
                      {"epsilon_used", to_json(w.epsilon_used)}});
            });
        br->add_option("--profile", profile_, "Profile document (JSON)");
        br->add_option("--player", player_, "Player index (0-based)");
        br->add_option("--epsilon", epsilon_, "Margin for strict wins in the witness");
        br->add_option("--method", method_, "Best-response method")->check(CLI::IsMember({"enumerate", "greedy"}));

        auto* dyn = leaf(
            game, "dynamics", "Run best-response dynamics (JSON lines: steps, then the outcome)",
            [] {
                return json{{"description", "one JSON object per line"},
                            {"oneOf",
                             {object({{"step", type("integer")},
                                      {"mover", type("integer")},
                                      {"moved", type("boolean")},
                                      {"value", rational()},
                                      {"profile", array_of(array_of(rational()))}}),
                              object({{"outcome", object({{"kind", type("string")},
                                                          {"round", type("integer")},
                                                          {"first", type("integer")},
                                                          {"second", type("integer")},
                                                          {"equivalence", type("string")}})}}),
                              object({{"trace", object({{"all_optimal", type("boolean")},
                                                        {"steps", array_of(type("object"))}})},
                                      {"cycle", type("object")}})}}};
            },
            [this] { run_dynamics_command(); });
        dyn->add_option("--init", init_, "Initial profile document (JSON)");
        dyn->add_option("--order", order_, "Mover schedule")->check(CLI::IsMember({"round-robin", "random"}));
        dyn->add_option("--seed", seed_, "Seed for the random schedule");
        dyn->add_option("--max-rounds", max_rounds_, "Step budget");
        dyn->add_option("--epsilon", epsilon_, "Margin for strict wins");
        dyn->add_option("--first-mover", first_mover_, "First player to move under round-robin");
        dyn->add_flag("--no-symmetric", no_symmetric_, "Only detect exact repeats");
        dyn->add_option("--replay", replay_,
                        "Check an explicit sequence {n, m, peak, states: [...], movers: [...]} instead of running");

        auto* oracle = leaf(
            game, "oracle", "Exhaustive grid search for equilibria",
            [] {
                return object({{"mode", type("string")},
                               {"grid", type("integer")},
                               {"examined", type("integer")},
                               {"equilibria", array_of(array_of(array_of(rational())))}});
            },
            [this] {
                const auto g = game_from_flags();
                GridSpec spec;
                spec.resolution = grid_;
                if (grid_ < 1) throw UsageError("--grid must be at least 1");
                spec.budget = budget_;
                spec.symmetric = !all_profiles_;
                spec.jobs = jobs_value();
                const auto mode = mode_ == "grid" ? DeviationMode::grid : DeviationMode::exact;
                const auto result = grid_nash_search(g, spec, mode);
                auto eq = json::array();
                for (const auto& p : result.profiles) eq.push_back(profile_to_json(p));
                emit({{"mode", mode_}, {"grid", grid_}, {"examined", result.examined}, {"equilibria", eq}});
            });
        add_game_flags(oracle);
        oracle->add_option("--grid", grid_, "Grid resolution g (emphases in multiples of 1/g)");
        oracle->add_option("--mode", mode_, "Deviation check")->check(CLI::IsMember({"exact", "grid"}));
        oracle->add_option("--jobs", jobs_, "Worker threads");
        oracle->add_option("--budget", budget_, "Maximum number of profiles");
        oracle->add_flag("--all-profiles", all_profiles_, "Enumerate ordered profiles instead of multisets");
    }

    void add_game_flags(CLI::App* sub) {
        sub->add_option("--n", n_, "Number of players");
        sub->add_option("--m", m_, "Number of queries");
        sub->add_option("--peak", peak_, "Peak of the tent function (decimal or p/q)");
    }

    void run_dynamics_command() {
        if (!replay_.empty()) {
            const auto j = read_json_file(replay_);
            json header = j;
            header["strategies"] = json::array();
            if (!j.contains("states") || !j.at("states").is_array()) throw InputError("replay file lacks \"states\"");
            header["strategies"] = j.at("states").at(0);
            const auto doc = game_document_from_json(header);
            std::vector<StrategyProfile> states;
            for (const auto& s : j.at("states")) {
                auto p = profile_from_json(s);
                require_valid(p, doc.game);
                states.push_back(std::move(p));
            }
            std::vector<int> movers;
            if (j.contains("movers")) movers = j.at("movers").get<std::vector<int>>();
            const auto report = verify_trace(doc.game, states, movers);
            const auto cycle = detect_cycle(states, {}, !no_symmetric_);
            emit({{"trace", to_json(report)}, {"cycle", cycle ? to_json(*cycle) : json(nullptr)}});
            return;
        }
        const auto doc = game_document_from_json(read_json_file(need(init_, "--init")));
        require_valid(doc.profile, doc.game);
        DynamicsOptions opt;
        opt.schedule = order_ == "random" ? Schedule::random : Schedule::round_robin;
        opt.seed = seed_value(opt.schedule == Schedule::random);
        opt.max_rounds = max_rounds_;
        opt.epsilon = need_rational(epsilon_, "--epsilon");
        opt.first_mover = first_mover_;
        opt.symmetric_cycles = !no_symmetric_;
        const auto trace = run_dynamics(doc.game, doc.profile, opt);
        emit({{"step", 0}, {"profile", profile_to_json(trace.initial)}});
        for (std::size_t t = 0; t < trace.steps.size(); ++t) {
            const auto& s = trace.steps[t];
            emit({{"step", t + 1},
                  {"mover", s.mover},
                  {"moved", s.moved},
                  {"value", to_json(s.mover_value)},
                  {"profile", profile_to_json(s.profile)}});
        }
        emit({{"outcome", to_json(trace.outcome)}});
    }

    // ------------------------------------------------------------ features

    void setup_features() {
        auto* features = app_.add_subcommand("features", "Document features and ranking similarity");
        features->require_subcommand(1);

        auto* extract = leaf(
            features, "extract", "Per document and query features of a log, as CSV",
            [] { return object({{"rows", type("integer")}, {"out", type("string")}}); },
            [this] {
                const auto log = load_log(need(log_, "--log"));
                const auto stop = stopwords_.empty() ? default_stopwords() : load_stopwords(stopwords_);
                auto f = open_out(need(out_path_, "--out"));
                f << "topic_id,round,publisher,query_index";
                for (const auto& name : document_feature_names()) f << ',' << name;
                f << '\n';
                long rows = 0;
                for (const auto& topic : log.topics) {
                    // Background statistics: the topic's documents up to and including the round.
                    CorpusStats stats;
                    for (const auto& round : topic.rounds) {
                        std::map<std::string, TokenizedDocument> docs;
                        for (const auto& [p, d] : round.documents) stats.add(docs[p] = tokenize(d.text));
                        for (const auto& [p, doc] : docs) {
                            for (std::size_t q = 0; q < topic.queries.size(); ++q) {
                                const auto v = compute_features(doc, tokenize(topic.queries[q]).tokens, stats, stop);
                                f << topic.topic_id << ',' << round.round << ',' << p << ',' << q;
                                for (double x : {v.tf, v.normtf, v.bm25, v.lmir, v.len, v.fracstop, v.stopcover, v.ent}) {
                                    f << ',' << json(x).dump();
                                }
                                f << '\n';
                                ++rows;
                            }
                        }
                    }
                }
                emit({{"rows", rows}, {"out", out_path_}});
            });
        extract->add_option("--log", log_, "Competition log (JSONL)");
        extract->add_option("--out", out_path_, "CSV output");
        extract->add_option("--stopwords", stopwords_, "Stopword list, one term per line");

        auto* rbo_cmd = leaf(
            features, "rbo", "Rank-biased overlap of two rankings (one item per line)",
            [] { return object({{"rbo", type("number")}, {"p", type("number")}}); },
            [this] {
                const auto a = read_lines(need(a_, "--a"));
                const auto b = read_lines(need(b_, "--b"));
                emit({{"rbo", rbo(a, b, persistence_)}, {"p", persistence_}});
            });
        rbo_cmd->add_option("--a", a_, "First ranking");
        rbo_cmd->add_option("--b", b_, "Second ranking");
        rbo_cmd->add_option("--p", persistence_, "Persistence");
    }

    // ------------------------------------------------------------ reports

    void setup_report() {
        auto* report = app_.add_subcommand("report", "Competition log reports");
        report->require_subcommand(1);
        auto row = object({{"wins", type("integer")},
                           {"documents", type("integer")},
                           {"percentage", type("number")},
                           {"mean_nonwon_rank", {{"type", {"number", "null"}}}}});
        auto* spread = leaf(
            report, "win-spread", "Share of winning documents that won exactly x queries",
            [row] {
                return object({{"overall", array_of(row)},
                               {"per_topic", {{"type", "object"}, {"additionalProperties", array_of(row)}}}});
            },
            [this] { emit(to_json(report_win_spread(load_log(need(log_, "--log"))))); });
        spread->add_option("--log", log_, "Competition log (JSONL)");

        auto* agreement = leaf(
            report, "rbo", "Mean pairwise RBO between per-query rankings, per round",
            [] {
                return array_of(
                    object({{"round", type("integer")}, {"mean_rbo", type("number")}, {"topics", type("integer")}}));
            },
            [this] { emit(to_json(report_ranking_agreement(load_log(need(log_, "--log")), persistence_))); });
        agreement->add_option("--log", log_, "Competition log (JSONL)");
        agreement->add_option("--p", persistence_, "Persistence");
    }

    // ------------------------------------------------------------ simulate

    void setup_simulate() {
        auto* simulate = app_.add_subcommand("simulate", "Synthetic data");
        simulate->require_subcommand(1);
        auto* competition = leaf(
            simulate, "competition", "Generate a synthetic competition log",
            [] {
                return object({{"topics", type("integer")},
                               {"rounds", type("integer")},
                               {"seed", type("integer")},
                               {"out", type("string")},
                               {"config", type("object")}});
            },
            [this] {
                SynthConfig config;
                if (!config_.empty()) config = synth_config_from_json(read_json_file(config_));
                const auto seed = seed_value(true);
                const auto log = synthesize(config, seed);
                save_log(log, need(out_path_, "--out"));
                emit({{"topics", log.topics.size()},
                      {"rounds", config.rounds},
                      {"seed", seed},
                      {"out", out_path_},
                      {"config", to_json(config)}});
            });
        competition->add_option("--config", config_, "Generator configuration (JSON); defaults when omitted");
        competition->add_option("--seed", seed_, "Generator seed");
        competition->add_option("--out", out_path_, "Output log (JSONL)");
    }

    // ------------------------------------------------------------ predict

    std::vector<PredictionInstance> instances_from_flags(std::vector<std::string>* warnings) {
        if (!instances_.empty()) {
            std::ifstream in(instances_);
            if (!in) throw InputError("cannot read " + instances_);
            return read_instances_csv(in);
        }
        const auto log = load_log(need(log_, "--log or --instances"));
        return build_instances(log, filter_for_prediction(log), default_stopwords(), jobs_value(), warnings);
    }

    std::set<std::string> mask_value() const {
        std::set<std::string> out;
        std::stringstream ss(mask_);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) out.insert(item);
        }
        return out;
    }

    void setup_predict() {
        auto* predict = app_.add_subcommand("predict", "Winner prediction");
        predict->require_subcommand(1);

        auto* build = leaf(
            predict, "build", "Build the 27-feature prediction instances as CSV",
            [] {
                return object({{"instances", type("integer")},
                               {"groups", type("integer")},
                               {"out", type("string")},
                               {"warnings", array_of(type("string"))}});
            },
            [this] {
                const auto log = load_log(need(log_, "--log"));
                std::vector<std::string> warnings;
                const auto inst =
                    build_instances(log, filter_for_prediction(log), default_stopwords(), jobs_value(), &warnings);
                auto f = open_out(need(out_path_, "--out"));
                write_instances_csv(inst, f);
                emit({{"instances", inst.size()},
                      {"groups", group_instances(inst).size()},
                      {"out", out_path_},
                      {"warnings", warnings}});
            });
        build->add_option("--log", log_, "Competition log (JSONL)");
        build->add_option("--out", out_path_, "CSV output");
        build->add_option("--jobs", jobs_, "Worker threads");

        auto* cv = leaf(
            predict, "cv", "Leave-one-round-out cross-validation of L1 logistic regression", [] { return cv_schema(); },
            [this] {
                std::vector<std::string> warnings;
                auto inst = instances_from_flags(&warnings);
                if (!mask_.empty()) inst = mask_sections(std::move(inst), mask_value());
                CvOptions opt;
                opt.grid.clear();
                std::stringstream ss(params_);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    try {
                        opt.grid.push_back(std::stod(item));
                    } catch (const std::exception&) {
                        throw UsageError("--params: bad value \"" + item + "\"");
                    }
                }
                opt.seed = seed_value(true);
                opt.jobs = jobs_value();
                emit(to_json(cross_validate(inst, opt)));
            });
        cv->add_option("--instances", instances_, "Instance CSV from `predict build`");
        cv->add_option("--log", log_, "Build instances from this log instead");
        cv->add_option("--params", params_, "Comma-separated regularization grid");
        cv->add_option("--seed", seed_, "Seed recorded in the models");
        cv->add_option("--mask", mask_, "Comma-separated feature sections to zero");
        cv->add_option("--jobs", jobs_, "Worker threads");

        auto* baselines = leaf(
            predict, "baselines", "Rand, QMaj, TMaj, AllW and AllL scored by round",
            [] {
                return object({{"seed", type("integer")},
                               {"baselines", {{"type", "object"}, {"additionalProperties", cv_schema()}}}});
            },
            [this] {
                const auto log = load_log(need(log_, "--log"));
                const auto inst = build_instances(log, filter_for_prediction(log), default_stopwords(), jobs_value());
                const auto groups = group_instances(inst);
                const auto seed = seed_value(true);
                json out = json::object();
                for (auto b : all_baselines()) {
                    out[to_string(b)] =
                        to_json(evaluate_by_round(baseline_predictions(b, log, inst, groups, seed), inst, groups));
                }
                emit({{"seed", seed}, {"baselines", out}});
            });
        baselines->add_option("--log", log_, "Competition log (JSONL)");
        baselines->add_option("--seed", seed_, "Seed for random choices and tie-breaks");
        baselines->add_option("--jobs", jobs_, "Worker threads");
    }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Cli cli(out, err);
    return cli.run(argc, argv);
}

}  // namespace mqrank
