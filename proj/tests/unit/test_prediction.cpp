#include <cmath>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "mqrank/errors.hpp"
#include "mqrank/prediction.hpp"

using namespace mqrank;

namespace {

using Ranking = std::vector<std::string>;

// Five publishers, three queries, three rounds. p0 wins query 0 in round 2 with
// "alpha beta gamma"; p1 copies that text in round 3 and wins.
CompetitionLog feature_log() {
    GameHistory t;
    t.topic_id = "t0";
    t.queries = {"beta zeta", "gamma eta", "theta iota"};
    const std::vector<std::vector<Ranking>> rankings{
        {{"p2", "p3", "p4", "p0", "p1"}, {"p1", "p0", "p3", "p4", "p2"}, {"p0", "p3", "p4", "p1", "p2"}},
        {{"p0", "p1", "p2", "p3", "p4"}, {"p0", "p2", "p1", "p3", "p4"}, {"p2", "p0", "p3", "p4", "p1"}},
        {{"p1", "p0", "p2", "p3", "p4"}, {"p2", "p1", "p0", "p3", "p4"}, {"p0", "p2", "p3", "p4", "p1"}},
    };
    const std::vector<std::map<std::string, std::string>> texts{
        {{"p0", "alpha omega"}, {"p1", "delta kappa"}, {"p2", "theta iota mu"}, {"p3", "nu xi"}, {"p4", "pi rho"}},
        {{"p0", "alpha beta gamma"}, {"p1", "delta the alpha"}, {"p2", "theta iota iota"}, {"p3", "nu xi"}, {"p4", "pi rho"}},
        {{"p0", "alpha beta gamma"}, {"p1", "alpha beta gamma"}, {"p2", "theta iota eta"}, {"p3", "nu xi sigma"}, {"p4", "pi"}},
    };
    for (int l = 0; l < 3; ++l) {
        RoundRecord r;
        r.round = l + 1;
        for (const auto& [p, text] : texts[static_cast<std::size_t>(l)]) r.documents[p] = {text, false};
        r.rankings = rankings[static_cast<std::size_t>(l)];
        t.rounds.push_back(r);
    }
    CompetitionLog log;
    log.topics.push_back(t);
    validate_log(log);
    return log;
}

const PredictionInstance& find(const std::vector<PredictionInstance>& v, const std::string& publisher) {
    for (const auto& i : v) {
        if (i.publisher == publisher) return i;
    }
    throw std::runtime_error("missing " + publisher);
}

std::size_t index_of(const std::string& name) {
    const auto& names = feature_names();
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
}

PredictionInstance make(int round, const std::string& group, const std::string& publisher, bool label,
                        std::initializer_list<double> head = {}) {
    PredictionInstance i;
    i.topic_id = group;
    i.round = round;
    i.publisher = publisher;
    i.label = label;
    std::size_t k = 0;
    for (double x : head) i.features[k++] = x;
    return i;
}

std::vector<PredictionInstance> random_instances(gen::Rng& rng, int groups, int rounds) {
    std::vector<PredictionInstance> out;
    for (int g = 0; g < groups; ++g) {
        const int k = gen::uniform(rng, 2, 5);
        const int winner = gen::uniform(rng, 0, k - 1);
        for (int c = 0; c < k; ++c) {
            PredictionInstance i;
            i.topic_id = "t" + std::to_string(g);
            i.query_index = g % 3;
            i.round = 3 + g % rounds;
            i.publisher = "p" + std::to_string(c);
            i.label = c == winner;
            for (auto& x : i.features) x = gen::unit(rng) * 4 - 2;
            if (i.label) i.features[0] += 1.5;
            out.push_back(i);
        }
    }
    return out;
}

std::vector<PredictionInstance> synthetic_instances(std::uint64_t seed, int topics, int rounds) {
    SynthConfig c;
    c.topics = topics;
    c.rounds = rounds;
    const auto log = synthesize(c, seed);
    return build_instances(log, filter_for_prediction(log));
}

double accuracy_of(const LinearModel& model, const std::vector<PredictionInstance>& data) {
    const auto groups = group_instances(data);
    double sum = 0;
    for (const auto& g : groups) {
        const auto chosen = predict_winner(model, data, g);
        double correct = 0;
        for (auto i : g.members) correct += (i == chosen) == data[i].label;
        sum += correct / static_cast<double>(g.members.size());
    }
    return sum / static_cast<double>(groups.size());
}

}  // namespace

TEST_CASE("feature layout") {
    CHECK(kFeatureCount == 27);
    CHECK(feature_names().size() == 27);
    const std::vector<std::tuple<std::string, std::size_t, std::size_t>> expected{
        {"micro", 0, 12}, {"macro", 12, 3}, {"topic_macro", 15, 2}, {"topic_rank", 17, 3},
        {"query_rank", 20, 3}, {"prev_change", 23, 3}, {"len", 26, 1}};
    REQUIRE(feature_sections().size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(feature_sections()[i].name == std::get<0>(expected[i]));
        CHECK(feature_sections()[i].offset == std::get<1>(expected[i]));
        CHECK(feature_sections()[i].size == std::get<2>(expected[i]));
    }
    CHECK(feature_names()[0] == "micro_query_add_w");
    CHECK(feature_names()[11] == "micro_other_rmv_nw");
    CHECK(feature_names()[12] == "sim_d_pd");
    CHECK(feature_names()[26] == "len");
}

TEST_CASE("features of a hand-built competition") {
    const auto log = feature_log();
    const auto q0 = build_instances(log, {{0, 0, 3}});
    REQUIRE(q0.size() == 4);
    int positives = 0;
    for (const auto& i : q0) {
        CHECK(i.publisher != "p0");
        positives += i.label;
    }
    CHECK(positives == 1);

    const auto& p1 = find(q0, "p1");
    CHECK(p1.label);
    // beta: query term added, in the winner; gamma: other, added, in the winner;
    // delta: other, removed, not in the winner; the: stopword, removed, not in the winner.
    for (std::size_t k = 0; k < 12; ++k) {
        const double want = (k == index_of("micro_query_add_w") || k == index_of("micro_other_add_w") ||
                             k == index_of("micro_other_rmv_nw") || k == index_of("micro_stop_rmv_nw"))
                                ? 1.0
                                : 0.0;
        CHECK_MESSAGE(p1.features[k] == want, feature_names()[k]);
    }
    CHECK(p1.features[index_of("sim_d_pw")] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p1.features[index_of("best_prev_rank")] == 2);
    CHECK(p1.features[index_of("median_prev_rank")] == 3);
    CHECK(p1.features[index_of("worst_prev_rank")] == 5);
    CHECK(p1.features[index_of("is_best")] == 1);
    CHECK(p1.features[index_of("is_median")] == 0);
    CHECK(p1.features[index_of("is_worst")] == 0);
    // Rank changes (5->2, 1->3, 4->5): 3/4, 0 (already first), -1/3.
    CHECK(p1.features[index_of("min_prev_change")] == doctest::Approx(-1.0 / 3.0));
    CHECK(p1.features[index_of("median_prev_change")] == 0);
    CHECK(p1.features[index_of("max_prev_change")] == doctest::Approx(0.75));
    CHECK(p1.features[index_of("len")] == 3);

    // p2 went from rank 5 to rank 1 on query 2.
    CHECK(find(q0, "p2").features[index_of("max_prev_change")] == doctest::Approx(1.0));

    const auto q1 = build_instances(log, {{0, 1, 3}});
    const auto& p1q1 = find(q1, "p1");
    CHECK(p1q1.features[index_of("is_best")] == 0);
    CHECK(p1q1.features[index_of("is_median")] == 1);
    CHECK(p1q1.features[index_of("is_worst")] == 0);
}

TEST_CASE("macro similarities against direct computation") {
    const auto log = feature_log();
    const auto& topic = log.topics[0];
    CorpusStats stats;
    for (const auto& r : topic.rounds) {
        for (const auto& [p, d] : r.documents) stats.add(tokenize(d.text));
    }
    auto vec = [&](int round, const std::string& p) { return tfidf_vector(tokenize(topic.round(round).documents.at(p).text), stats); };
    const auto c = centroid({vec(2, "p0"), vec(2, "p0"), vec(2, "p2")});
    const auto inst = build_instances(log, {{0, 0, 3}});
    for (const auto& i : inst) {
        CHECK(i.features[12] == doctest::Approx(cosine(vec(3, i.publisher), vec(2, i.publisher))).epsilon(1e-12));
        CHECK(i.features[13] == doctest::Approx(cosine(vec(3, i.publisher), vec(2, "p0"))).epsilon(1e-12));
        CHECK(i.features[14] == doctest::Approx(cosine(vec(2, i.publisher), vec(2, "p0"))).epsilon(1e-12));
        CHECK(i.features[15] == doctest::Approx(cosine(vec(3, i.publisher), c)).epsilon(1e-12));
        CHECK(i.features[16] == doctest::Approx(cosine(vec(2, i.publisher), c)).epsilon(1e-12));
    }
}

TEST_CASE("bad triples are skipped with a warning") {
    const auto log = feature_log();
    std::vector<std::string> warnings;
    const auto out = build_instances(log, {{0, 0, 2}, {0, 0, 7}, {3, 0, 3}, {0, 0, 3}}, default_stopwords(), 1, &warnings);
    CHECK(out.size() == 4);
    CHECK(warnings.size() == 3);
}

TEST_CASE("parallel and serial builders agree") {
    SynthConfig c;
    c.topics = 8;
    c.rounds = 6;
    const auto log = synthesize(c, 5);
    const auto triples = filter_for_prediction(log);
    const auto a = build_instances(log, triples, default_stopwords(), 4);
    const auto b = build_instances_serial(log, triples);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].publisher == b[i].publisher);
        CHECK(a[i].features == b[i].features);
        CHECK(a[i].label == b[i].label);
    }
}

TEST_CASE("property: exactly one winner per group on synthetic logs") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto inst = synthetic_instances(seed, 6, 6);
        REQUIRE_FALSE(inst.empty());
        for (const auto& g : group_instances(inst)) {
            int positives = 0;
            for (auto i : g.members) positives += inst[i].label;
            CHECK(positives == 1);
        }
    }
}

TEST_CASE("normalize per query") {
    std::vector<PredictionInstance> v{make(3, "a", "p0", true, {2, 5}), make(3, "a", "p1", false, {6, 5}),
                                      make(3, "b", "p0", false, {9, 1})};
    const auto n = normalize_per_query(v);
    CHECK(n[0].features[0] == 0);
    CHECK(n[1].features[0] == 1);
    CHECK(n[0].features[1] == 0);
    CHECK(n[2].features[0] == 0);
    CHECK(n[0].label);
    CHECK_FALSE(n[1].label);

    gen::Rng rng(71);
    const auto r = normalize_per_query(random_instances(rng, 30, 4));
    const auto again = normalize_per_query(r);
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(again[i].features == r[i].features);
        for (double x : r[i].features) {
            CHECK(x >= 0);
            CHECK(x <= 1);
        }
    }
}

TEST_CASE("mask sections") {
    std::vector<PredictionInstance> v{make(3, "a", "p0", true)};
    v[0].features.fill(1);
    const auto m = mask_sections(v, {"micro", "len"});
    for (std::size_t k = 0; k < kFeatureCount; ++k) CHECK(m[0].features[k] == (k < 12 || k == 26 ? 0 : 1));
    CHECK_THROWS_AS(mask_sections(v, {"nope"}), InputError);
}

TEST_CASE("logistic regression separates a toy set") {
    std::vector<PredictionInstance> v;
    gen::Rng rng(72);
    for (int i = 0; i < 40; ++i) {
        const double x = gen::unit(rng) * 2 - 1;
        const double y = gen::unit(rng) * 2 - 1;
        if (std::abs(x - y) < 0.1) continue;
        v.push_back(make(3, "g" + std::to_string(i), "p", x > y, {x, y}));
    }
    const auto model = train_lreg(v, 100, 0, {5000, 1e-9});
    int correct = 0;
    for (const auto& i : v) correct += (model.margin(i.features) > 0) == i.label;
    CHECK(correct == static_cast<int>(v.size()));
    CHECK(model.weights[0] > 0);
    CHECK(model.weights[1] < 0);

    std::vector<PredictionInstance> one_label{make(3, "a", "p", true), make(3, "b", "p", true)};
    CHECK_THROWS_AS(train_lreg(one_label, 1, 0), DomainError);
    CHECK_THROWS_AS(train_lreg(v, 0, 0), DomainError);
}

TEST_CASE("gradient matches central differences") {
    gen::Rng rng(73);
    const auto data = random_instances(rng, 20, 3);
    for (int trial = 0; trial < 5; ++trial) {
        FeatureVector w;
        for (auto& x : w) x = gen::unit(rng) - 0.5;
        const double b = gen::unit(rng) - 0.5;
        const auto g = mean_logistic_gradient(data, w, b);
        const double h = 1e-6;
        for (std::size_t k = 0; k <= kFeatureCount; ++k) {
            auto wp = w, wm = w;
            double bp = b, bm = b;
            if (k < kFeatureCount) {
                wp[k] += h;
                wm[k] -= h;
            } else {
                bp += h;
                bm -= h;
            }
            const double fd = (mean_logistic_loss(data, wp, bp) - mean_logistic_loss(data, wm, bm)) / (2 * h);
            CHECK(std::abs(fd - g[k]) <= 1e-5 * std::max(std::abs(g[k]), 1e-3));
        }
    }
}

TEST_CASE("duplicated data with half the c gives the same model") {
    gen::Rng rng(74);
    const auto data = random_instances(rng, 25, 3);
    auto twice = data;
    twice.insert(twice.end(), data.begin(), data.end());
    const auto a = train_lreg(data, 10, 0);
    const auto b = train_lreg(twice, 5, 0);
    for (std::size_t k = 0; k < kFeatureCount; ++k) CHECK(a.weights[k] == doctest::Approx(b.weights[k]).epsilon(1e-6));
    CHECK(a.bias == doctest::Approx(b.bias).epsilon(1e-6));
    CHECK(lreg_objective(data, a.weights, a.bias, 10) == doctest::Approx(lreg_objective(twice, a.weights, a.bias, 5)));
}

TEST_CASE("training lowers the objective and sparsifies with small c") {
    gen::Rng rng(75);
    const auto data = random_instances(rng, 30, 3);
    const FeatureVector zero{};
    const auto strong = train_lreg(data, 1, 0);
    const auto weak = train_lreg(data, 100, 0);
    CHECK(lreg_objective(data, weak.weights, weak.bias, 100) < lreg_objective(data, zero, 0, 100));
    int nz_strong = 0, nz_weak = 0;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        nz_strong += strong.weights[k] != 0;
        nz_weak += weak.weights[k] != 0;
    }
    CHECK(nz_strong <= nz_weak);
    CHECK(strong.weights[0] > 0);
}

TEST_CASE("predict_winner") {
    std::vector<PredictionInstance> v{make(3, "a", "p2", false, {1}), make(3, "a", "p0", false, {3}),
                                      make(3, "a", "p1", true, {2})};
    const auto groups = group_instances(v);
    REQUIRE(groups.size() == 1);
    LinearModel m;
    CHECK(v[predict_winner(m, v, groups[0])].publisher == "p0");  // all tied
    m.weights[0] = 1;
    CHECK(v[predict_winner(m, v, groups[0])].publisher == "p0");
    m.weights[0] = -0.5;
    m.bias = 3;
    CHECK(v[predict_winner(m, v, groups[0])].publisher == "p2");
    InstanceGroup single{"a", 0, 3, {1}};
    CHECK(predict_winner(m, v, single) == 1);
}

TEST_CASE("property: winner is invariant under monotone rescaling") {
    gen::Rng rng(76);
    const auto data = random_instances(rng, 40, 3);
    const auto groups = group_instances(data);
    for (int trial = 0; trial < 20; ++trial) {
        LinearModel m;
        for (auto& x : m.weights) x = gen::unit(rng) - 0.5;
        LinearModel scaled = m;
        const double s = 0.1 + 5 * gen::unit(rng);
        for (auto& x : scaled.weights) x *= s;
        scaled.bias = 7 * gen::unit(rng);
        for (const auto& g : groups) CHECK(predict_winner(m, data, g) == predict_winner(scaled, data, g));
    }
}

TEST_CASE("group scores") {
    const auto w = score_group({true, true, true, true}, {false, true, false, false});
    CHECK(w.acc == doctest::Approx(0.25));
    CHECK(w.f1 == doctest::Approx(2.0 / 5.0));
    const auto l = score_group({false, false, false, false}, {false, true, false, false});
    CHECK(l.acc == doctest::Approx(0.75));
    CHECK(l.f1 == 0);
    const auto p = score_group({false, true, false}, {false, true, false});
    CHECK(p.acc == 1);
    CHECK(p.f1 == 1);
}

TEST_CASE("baselines") {
    const auto log = feature_log();
    const auto inst = build_instances(log, {{0, 0, 3}, {0, 1, 3}, {0, 2, 3}});
    const auto groups = group_instances(inst);
    REQUIRE(groups.size() == 3);

    const auto r1 = baseline_predictions(Baseline::random, log, inst, groups, 9);
    CHECK(r1 == baseline_predictions(Baseline::random, log, inst, groups, 9));
    for (const auto& g : r1) CHECK(std::count(g.begin(), g.end(), true) == 1);

    // Query 2: p2 won round 2 and is excluded; p0 won it in round 1.
    const auto qmaj = baseline_predictions(Baseline::query_majority, log, inst, groups, 1);
    CHECK(inst[groups[2].members[static_cast<std::size_t>(std::find(qmaj[2].begin(), qmaj[2].end(), true) - qmaj[2].begin())]].publisher == "p0");
    // Over all queries and rounds 1-2, p2 has two wins among query 0's candidates.
    const auto tmaj = baseline_predictions(Baseline::topic_majority, log, inst, groups, 1);
    CHECK(inst[groups[0].members[static_cast<std::size_t>(std::find(tmaj[0].begin(), tmaj[0].end(), true) - tmaj[0].begin())]].publisher == "p2");

    const auto allw = evaluate(baseline_predictions(Baseline::all_winners, log, inst, groups, 0), inst, groups);
    const auto alll = evaluate(baseline_predictions(Baseline::all_losers, log, inst, groups, 0), inst, groups);
    CHECK(allw.f1 == doctest::Approx(2.0 / 5.0));
    CHECK(allw.acc == doctest::Approx(1.0 / 4.0));
    CHECK(alll.f1 == 0);
    CHECK(alll.acc == doctest::Approx(3.0 / 4.0));
    CHECK(to_string(Baseline::query_majority) == "QMaj");
    CHECK(all_baselines().size() == 5);
}

TEST_CASE("query majority picks the repeat winner") {
    // The round l-1 winner is never a candidate, so p0's two early wins count at round 4.
    GameHistory t;
    t.topic_id = "t";
    t.queries = {"a", "b"};
    const std::vector<std::vector<Ranking>> rankings{{{"p0", "p1", "p2"}, {"p1", "p0", "p2"}},
                                                     {{"p0", "p1", "p2"}, {"p2", "p0", "p1"}},
                                                     {{"p1", "p0", "p2"}, {"p2", "p0", "p1"}},
                                                     {{"p2", "p1", "p0"}, {"p2", "p1", "p0"}}};
    for (int l = 1; l <= 4; ++l) {
        RoundRecord r;
        r.round = l;
        for (const char* p : {"p0", "p1", "p2"}) r.documents[p] = {"x", false};
        r.rankings = rankings[static_cast<std::size_t>(l - 1)];
        t.rounds.push_back(r);
    }
    CompetitionLog log;
    log.topics.push_back(t);
    const auto inst = build_instances(log, {{0, 0, 4}});
    const auto groups = group_instances(inst);
    REQUIRE(groups[0].members.size() == 2);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto pred = baseline_predictions(Baseline::query_majority, log, inst, groups, seed);
        for (std::size_t c = 0; c < groups[0].members.size(); ++c) {
            CHECK(pred[0][c] == (inst[groups[0].members[c]].publisher == "p0"));
        }
    }
    // Over both queries p0 and p2 have two wins each: a random tie-break.
    std::set<std::string> picked;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto pred = baseline_predictions(Baseline::topic_majority, log, inst, groups, seed);
        for (std::size_t c = 0; c < 2; ++c) {
            if (pred[0][c]) picked.insert(inst[groups[0].members[c]].publisher);
        }
    }
    CHECK(picked == std::set<std::string>{"p0", "p2"});
}

TEST_CASE("cross-validation follows the leave-one-round-out protocol") {
    const auto inst = synthetic_instances(3, 10, 5);
    std::set<int> rounds;
    for (const auto& i : inst) rounds.insert(i.round);
    REQUIRE(rounds == std::set<int>{3, 4, 5});

    CvOptions o;
    o.jobs = 1;
    const auto rep = cross_validate(inst, o);
    REQUIRE(rep.folds.size() == 3);

    const auto norm = normalize_per_query(inst);
    auto pick = [&](const std::set<int>& keep) {
        std::vector<PredictionInstance> out;
        for (const auto& i : norm) {
            if (keep.count(i.round)) out.push_back(i);
        }
        return out;
    };
    double acc = 0;
    for (std::size_t f = 0; f < 3; ++f) {
        const auto& fold = rep.folds[f];
        const int test = *std::next(rounds.begin(), static_cast<long>(f));
        CHECK(fold.test_round == test);
        std::set<int> train = rounds;
        train.erase(test);
        std::vector<double> val;
        for (double c : o.grid) {
            double sum = 0;
            for (int v : train) {
                std::set<int> inner = train;
                inner.erase(v);
                sum += accuracy_of(train_lreg(pick(inner), c, 0), pick({v}));
            }
            val.push_back(sum / 2);
        }
        REQUIRE(fold.validation_acc.size() == val.size());
        for (std::size_t k = 0; k < val.size(); ++k) CHECK(fold.validation_acc[k] == doctest::Approx(val[k]).epsilon(1e-12));
        const double selected = o.grid[static_cast<std::size_t>(std::max_element(val.begin(), val.end()) - val.begin())];
        CHECK(fold.selected_c == selected);
        const double test_acc = accuracy_of(train_lreg(pick(train), selected, 0), pick({test}));
        CHECK(fold.test.acc == doctest::Approx(test_acc).epsilon(1e-12));
        acc += test_acc / 3;
    }
    CHECK(rep.acc == doctest::Approx(acc).epsilon(1e-12));

    CvOptions par = o;
    par.jobs = 4;
    const auto rep2 = cross_validate(inst, par);
    CHECK(to_json(rep2) == to_json(rep));
}

TEST_CASE("cross-validation needs three rounds") {
    gen::Rng rng(77);
    const auto two = random_instances(rng, 10, 2);
    try {
        cross_validate(two);
        FAIL("expected an error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("insufficient rounds") != std::string::npos);
    }
}

TEST_CASE("per-round evaluation of fixed predictions") {
    std::vector<PredictionInstance> v{make(3, "a", "p0", true), make(3, "a", "p1", false), make(4, "b", "p0", false),
                                      make(4, "b", "p1", true), make(4, "c", "p0", true), make(4, "c", "p1", false)};
    const auto groups = group_instances(v);
    const GroupPredictions pred{{true, false}, {true, false}, {true, false}};
    const auto rep = evaluate_by_round(pred, v, groups);
    REQUIRE(rep.folds.size() == 2);
    CHECK(rep.folds[0].test.acc == 1);
    CHECK(rep.folds[1].test.acc == doctest::Approx(0.5));
    CHECK(rep.acc == doctest::Approx(0.75));
    CHECK(evaluate(pred, v, groups).acc == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("student t distribution against reference values") {
    const std::vector<std::tuple<double, double, double>> ref{
        {2.0, 4, 0.9419417382415922},   {-1.5, 3, 0.11529193262241141}, {0.5, 10, 0.6860531971285135},
        {3.2, 7, 0.9924670943287554},   {1.0, 1, 0.7500000000000002},   {-2.5, 30, 0.009057824534033353},
        {0.0, 5, 0.5},                  {4.0, 2, 0.9714045207910317}};
    for (const auto& [t, df, p] : ref) CHECK(student_t_cdf(t, df) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("paired t-test") {
    const auto a = paired_t_test({1, 2, 3, 4, 5}, {0.5, 1, 2.5, 3, 4});
    CHECK(a.t == doctest::Approx(6.531972647421809).epsilon(1e-12));
    CHECK(a.p == doctest::Approx(0.0028378459267344464).epsilon(1e-10));
    CHECK(a.df == 4);
    CHECK(a.significant);

    const auto b = paired_t_test({0.62, 0.71, 0.55, 0.80, 0.66, 0.59}, {0.60, 0.65, 0.58, 0.70, 0.61, 0.57});
    CHECK(b.t == doctest::Approx(2.035641328043417).epsilon(1e-12));
    CHECK(b.p == doctest::Approx(0.09740825600657538).epsilon(1e-10));
    CHECK_FALSE(b.significant);

    std::vector<double> d;
    for (int k = -2; k <= 2; ++k) d.push_back(1 + k / std::sqrt(2.0));
    const auto c = paired_t_test(d, std::vector<double>(5, 0.0));
    CHECK(c.t == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c.p == doctest::Approx(0.1161165235168155).epsilon(1e-10));

    const auto same = paired_t_test({1, 2, 3}, {1, 2, 3});
    CHECK(same.t == 0);
    CHECK(same.p == 1);
    CHECK_FALSE(same.significant);

    const auto shift = paired_t_test({2, 3, 4, 5}, {1, 2, 3, 4});
    CHECK(std::isinf(shift.t));
    CHECK(shift.p == 0);
    CHECK(shift.significant);
    CHECK(to_json(shift).at("t") == "inf");

    CHECK_THROWS_AS(paired_t_test({1}, {2}), InputError);
    CHECK_THROWS_AS(paired_t_test({1, 2}, {2}), InputError);
}

TEST_CASE("instance CSV round-trip") {
    gen::Rng rng(78);
    auto v = random_instances(rng, 10, 3);
    v[0].features[3] = 1e-300;
    v[1].features[4] = -0.1;
    std::stringstream ss;
    write_instances_csv(v, ss);
    const auto text = ss.str();
    CHECK(text.substr(0, text.find('\n')).find("micro_query_add_w,") == 0);
    CHECK(text.substr(0, text.find('\n')).find(",topic_id,query_index,round,publisher,label") != std::string::npos);
    std::stringstream in(text);
    const auto back = read_instances_csv(in);
    REQUIRE(back.size() == v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(back[i].features == v[i].features);
        CHECK(back[i].topic_id == v[i].topic_id);
        CHECK(back[i].query_index == v[i].query_index);
        CHECK(back[i].round == v[i].round);
        CHECK(back[i].publisher == v[i].publisher);
        CHECK(back[i].label == v[i].label);
    }
    std::stringstream bad("a,b\n");
    CHECK_THROWS_AS(read_instances_csv(bad), InputError);
    std::stringstream short_row(text.substr(0, text.find('\n') + 1) + "1,2\n");
    CHECK_THROWS_AS(read_instances_csv(short_row), InputError);
}
