#include "mqrank/prediction.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

#include <boost/math/special_functions/beta.hpp>

#include "mqrank/errors.hpp"

namespace mqrank {

const std::vector<FeatureSection>& feature_sections() {
    static const std::vector<FeatureSection> sections{{"micro", 0, 12},     {"macro", 12, 3},
                                                      {"topic_macro", 15, 2}, {"topic_rank", 17, 3},
                                                      {"query_rank", 20, 3},  {"prev_change", 23, 3},
                                                      {"len", 26, 1}};
    return sections;
}

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const char* group : {"query", "stop", "other"}) {
            for (const char* kind : {"add_w", "rmv_w", "add_nw", "rmv_nw"}) {
                out.push_back(std::string("micro_") + group + "_" + kind);
            }
        }
        for (const char* n : {"sim_d_pd", "sim_d_pw", "sim_pd_pw", "sim_d_pwc", "sim_pd_pwc", "best_prev_rank",
                              "median_prev_rank", "worst_prev_rank", "is_best", "is_median", "is_worst",
                              "min_prev_change", "median_prev_change", "max_prev_change", "len"}) {
            out.push_back(n);
        }
        return out;
    }();
    return names;
}

namespace {

// sorted[(k-1)/2]: the lower median for even k
template <typename T>
std::array<T, 3> min_median_max(std::vector<T> values) {
    std::sort(values.begin(), values.end());
    return {values.front(), values[(values.size() - 1) / 2], values.back()};
}

std::vector<PredictionInstance> build_triple(const CompetitionLog& log, const EligibleTriple& triple,
                                             const Stopwords& stopwords, std::string* warning) {
    std::vector<PredictionInstance> out;
    if (triple.topic >= log.topics.size()) {
        if (warning) *warning = "triple refers to missing topic " + std::to_string(triple.topic);
        return out;
    }
    const auto& topic = log.topics[triple.topic];
    const int l = triple.round;
    if (l < 3 || l > static_cast<int>(topic.rounds.size()) || triple.query >= topic.queries.size()) {
        if (warning) {
            *warning = "topic " + topic.topic_id + " query " + std::to_string(triple.query) + " round " +
                       std::to_string(l) + ": rounds l-2..l not all present, skipped";
        }
        return out;
    }
    const auto& cur = topic.round(l);
    const auto& prev = topic.round(l - 1);
    const auto& prev2 = topic.round(l - 2);
    const std::size_t q = triple.query;
    const std::size_t m = topic.queries.size();

    CorpusStats stats;
    for (int r = 1; r <= l; ++r) {
        for (const auto& [p, d] : topic.round(r).documents) stats.add(tokenize(d.text));
    }

    const std::string& winner_id = prev.winner(q);
    const auto winner_doc = tokenize(prev.documents.at(winner_id).text);
    const auto winner_vec = tfidf_vector(winner_doc, stats);
    std::vector<SparseVector> winners;
    for (std::size_t j = 0; j < m; ++j) {
        winners.push_back(tfidf_vector(tokenize(prev.documents.at(prev.winner(j)).text), stats));
    }
    const auto winners_centroid = centroid(winners);

    std::set<std::string> query_terms;
    for (const auto& t : unique_terms(tokenize(topic.queries[q]))) query_terms.insert(t);
    const std::set<std::string> winner_terms(winner_doc.tokens.begin(), winner_doc.tokens.end());

    for (const auto& [publisher, doc] : cur.documents) {
        if (publisher == winner_id) continue;
        PredictionInstance inst;
        inst.topic_id = topic.topic_id;
        inst.query_index = static_cast<int>(q);
        inst.round = l;
        inst.publisher = publisher;
        auto& f = inst.features;

        const auto d = tokenize(doc.text);
        const auto pd = tokenize(prev.documents.at(publisher).text);
        std::set<std::string> now(d.tokens.begin(), d.tokens.end());
        std::set<std::string> before(pd.tokens.begin(), pd.tokens.end());
        std::set<std::string> all = now;
        all.insert(before.begin(), before.end());
        for (const auto& t : all) {
            const bool added = now.count(t) && !before.count(t);
            const bool removed = before.count(t) && !now.count(t);
            if (!added && !removed) continue;
            const std::size_t group = query_terms.count(t) ? 0 : stopwords.count(t) ? 1 : 2;
            const std::size_t kind = (winner_terms.count(t) ? 0 : 2) + (added ? 0 : 1);
            f[group * 4 + kind] += 1;
        }

        const auto dv = tfidf_vector(d, stats);
        const auto pdv = tfidf_vector(pd, stats);
        f[12] = cosine(dv, pdv);
        f[13] = cosine(dv, winner_vec);
        f[14] = cosine(pdv, winner_vec);
        f[15] = cosine(dv, winners_centroid);
        f[16] = cosine(pdv, winners_centroid);

        std::vector<int> ranks;
        std::vector<double> changes;
        for (std::size_t j = 0; j < m; ++j) {
            const int r1 = prev.rank_of(j, publisher);
            const int r2 = prev2.rank_of(j, publisher);
            ranks.push_back(r1);
            changes.push_back(r2 == 1 ? 0.0 : static_cast<double>(r2 - r1) / static_cast<double>(r2 - 1));
        }
        const auto rank_stats = min_median_max(ranks);
        const int own = ranks[q];
        for (std::size_t k = 0; k < 3; ++k) {
            f[17 + k] = rank_stats[k];
            f[20 + k] = own == rank_stats[k] ? 1.0 : 0.0;
        }
        const auto change_stats = min_median_max(changes);
        for (std::size_t k = 0; k < 3; ++k) f[23 + k] = change_stats[k];
        f[26] = static_cast<double>(d.length());

        inst.label = cur.rank_of(q, publisher) == 1;
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<PredictionInstance> build(const CompetitionLog& log, const std::vector<EligibleTriple>& triples,
                                      const Stopwords& stopwords, int threads, std::vector<std::string>* warnings) {
    std::vector<std::vector<PredictionInstance>> parts(triples.size());
    std::vector<std::string> notes(triples.size());
    const long count = static_cast<long>(triples.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
    for (long i = 0; i < count; ++i) {
        parts[static_cast<std::size_t>(i)] =
            build_triple(log, triples[static_cast<std::size_t>(i)], stopwords, &notes[static_cast<std::size_t>(i)]);
    }
    std::vector<PredictionInstance> out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (warnings && !notes[i].empty()) warnings->push_back(notes[i]);
        for (auto& inst : parts[i]) out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace

std::vector<PredictionInstance> build_instances(const CompetitionLog& log, const std::vector<EligibleTriple>& triples,
                                                const Stopwords& stopwords, int jobs,
                                                std::vector<std::string>* warnings) {
    return build(log, triples, stopwords, jobs > 0 ? jobs : omp_get_max_threads(), warnings);
}

std::vector<PredictionInstance> build_instances_serial(const CompetitionLog& log,
                                                       const std::vector<EligibleTriple>& triples,
                                                       const Stopwords& stopwords,
                                                       std::vector<std::string>* warnings) {
    std::vector<PredictionInstance> out;
    for (const auto& t : triples) {
        std::string note;
        for (auto& inst : build_triple(log, t, stopwords, &note)) out.push_back(std::move(inst));
        if (warnings && !note.empty()) warnings->push_back(note);
    }
    return out;
}

std::vector<InstanceGroup> group_instances(const std::vector<PredictionInstance>& instances) {
    std::vector<InstanceGroup> groups;
    std::map<std::tuple<std::string, int, int>, std::size_t> index;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        const auto key = std::make_tuple(inst.topic_id, inst.query_index, inst.round);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, groups.size()).first;
            groups.push_back({inst.topic_id, inst.query_index, inst.round, {}});
        }
        groups[it->second].members.push_back(i);
    }
    return groups;
}

std::vector<PredictionInstance> normalize_per_query(std::vector<PredictionInstance> instances) {
    for (const auto& g : group_instances(instances)) {
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (auto i : g.members) {
                lo = std::min(lo, instances[i].features[k]);
                hi = std::max(hi, instances[i].features[k]);
            }
            for (auto i : g.members) {
                auto& x = instances[i].features[k];
                x = hi > lo ? (x - lo) / (hi - lo) : 0.0;
            }
        }
    }
    return instances;
}

std::vector<PredictionInstance> mask_sections(std::vector<PredictionInstance> instances,
                                              const std::set<std::string>& sections) {
    std::vector<bool> masked(kFeatureCount, false);
    for (const auto& name : sections) {
        const auto& all = feature_sections();
        const auto it = std::find_if(all.begin(), all.end(), [&](const auto& s) { return s.name == name; });
        if (it == all.end()) throw InputError("unknown feature section \"" + name + "\"");
        for (std::size_t k = 0; k < it->size; ++k) masked[it->offset + k] = true;
    }
    for (auto& inst : instances) {
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            if (masked[k]) inst.features[k] = 0;
        }
    }
    return instances;
}

// ---------------------------------------------------------------- learner

double LinearModel::margin(const FeatureVector& x) const {
    double s = bias;
    for (std::size_t k = 0; k < kFeatureCount; ++k) s += weights[k] * x[k];
    return s;
}

double LinearModel::probability(const FeatureVector& x) const { return 1.0 / (1.0 + std::exp(-margin(x))); }

namespace {

double dot(const FeatureVector& w, double b, const FeatureVector& x) {
    double s = b;
    for (std::size_t k = 0; k < kFeatureCount; ++k) s += w[k] * x[k];
    return s;
}

// log(1 + e^z) without overflow
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Largest eigenvalue of A^T A for A = [X 1], by power iteration.
double gram_spectral_norm(const std::vector<PredictionInstance>& data) {
    std::array<double, kFeatureCount + 1> v;
    v.fill(1.0);
    double lambda = 0;
    for (int it = 0; it < 200; ++it) {
        std::array<double, kFeatureCount + 1> next{};
        for (const auto& inst : data) {
            double s = v[kFeatureCount];
            for (std::size_t k = 0; k < kFeatureCount; ++k) s += inst.features[k] * v[k];
            for (std::size_t k = 0; k < kFeatureCount; ++k) next[k] += s * inst.features[k];
            next[kFeatureCount] += s;
        }
        double norm = 0;
        for (double x : next) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0) return 0;
        double vnorm = 0;
        for (double x : v) vnorm += x * x;
        const double estimate = norm / std::sqrt(vnorm);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = next[k] / norm;
        if (std::abs(estimate - lambda) <= 1e-12 * estimate) return estimate;
        lambda = estimate;
    }
    return lambda;
}

}  // namespace

double mean_logistic_loss(const std::vector<PredictionInstance>& instances, const FeatureVector& w, double b) {
    if (instances.empty()) return 0;
    double total = 0;
    for (const auto& inst : instances) {
        const double z = dot(w, b, inst.features);
        total += softplus(z) - (inst.label ? z : 0.0);
    }
    return total / static_cast<double>(instances.size());
}

std::array<double, kFeatureCount + 1> mean_logistic_gradient(const std::vector<PredictionInstance>& instances,
                                                             const FeatureVector& w, double b) {
    std::array<double, kFeatureCount + 1> g{};
    if (instances.empty()) return g;
    for (const auto& inst : instances) {
        const double r = sigmoid(dot(w, b, inst.features)) - (inst.label ? 1.0 : 0.0);
        for (std::size_t k = 0; k < kFeatureCount; ++k) g[k] += r * inst.features[k];
        g[kFeatureCount] += r;
    }
    for (auto& x : g) x /= static_cast<double>(instances.size());
    return g;
}

double lreg_objective(const std::vector<PredictionInstance>& instances, const FeatureVector& w, double b, double c) {
    double l1 = 0;
    for (double x : w) l1 += std::abs(x);
    return mean_logistic_loss(instances, w, b) + l1 / (c * static_cast<double>(instances.size()));
}

LinearModel train_lreg(const std::vector<PredictionInstance>& instances, double c, std::uint64_t seed,
                       const TrainOptions& options) {
    if (!(c > 0)) throw DomainError("regularization parameter must be positive");
    const bool any_pos = std::any_of(instances.begin(), instances.end(), [](const auto& i) { return i.label; });
    const bool any_neg = std::any_of(instances.begin(), instances.end(), [](const auto& i) { return !i.label; });
    if (!any_pos || !any_neg) throw DomainError("training needs at least one positive and one negative instance");

    const double n = static_cast<double>(instances.size());
    const double lipschitz = std::max(gram_spectral_norm(instances) / (4.0 * n), 1e-12);
    const double step = 1.0 / lipschitz;
    const double lambda = 1.0 / (c * n);

    LinearModel model;
    model.c = c;
    model.seed = seed;
    std::set<int> rounds;
    for (const auto& i : instances) rounds.insert(i.round);
    model.rounds.assign(rounds.begin(), rounds.end());

    FeatureVector w{}, yw{};
    double b = 0, yb = 0, t = 1;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        const auto g = mean_logistic_gradient(instances, yw, yb);
        FeatureVector nw;
        double delta = 0;
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            const double z = yw[k] - step * g[k];
            const double shrink = step * lambda;
            nw[k] = z > shrink ? z - shrink : z < -shrink ? z + shrink : 0.0;
            delta = std::max(delta, std::abs(nw[k] - w[k]));
        }
        const double nb = yb - step * g[kFeatureCount];
        delta = std::max(delta, std::abs(nb - b));
        const double nt = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double momentum = (t - 1.0) / nt;
        for (std::size_t k = 0; k < kFeatureCount; ++k) yw[k] = nw[k] + momentum * (nw[k] - w[k]);
        yb = nb + momentum * (nb - b);
        w = nw;
        b = nb;
        t = nt;
        if (delta < options.tolerance) {
            ++it;
            break;
        }
    }
    model.weights = w;
    model.bias = b;
    model.iterations = it;
    for (double x : w) {
        if (!std::isfinite(x)) throw DomainError("training diverged");
    }
    return model;
}

std::size_t predict_winner(const LinearModel& model, const std::vector<PredictionInstance>& instances,
                           const InstanceGroup& group) {
    if (group.members.empty()) throw InputError("empty instance group");
    std::size_t best = group.members.front();
    double best_score = model.margin(instances[best].features);
    for (auto i : group.members) {
        const double s = model.margin(instances[i].features);
        if (s > best_score || (s == best_score && instances[i].publisher < instances[best].publisher)) {
            best = i;
            best_score = s;
        }
    }
    return best;
}

// ---------------------------------------------------------------- baselines and metrics

const std::vector<Baseline>& all_baselines() {
    static const std::vector<Baseline> all{Baseline::random, Baseline::query_majority, Baseline::topic_majority,
                                           Baseline::all_winners, Baseline::all_losers};
    return all;
}

std::string to_string(Baseline b) {
    switch (b) {
        case Baseline::random: return "Rand";
        case Baseline::query_majority: return "QMaj";
        case Baseline::topic_majority: return "TMaj";
        case Baseline::all_winners: return "AllW";
        case Baseline::all_losers: return "AllL";
    }
    return "?";
}

GroupPredictions baseline_predictions(Baseline baseline, const CompetitionLog& log,
                                      const std::vector<PredictionInstance>& instances,
                                      const std::vector<InstanceGroup>& groups, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::map<std::string, const GameHistory*> topics;
    for (const auto& t : log.topics) topics[t.topic_id] = &t;

    GroupPredictions out;
    for (const auto& g : groups) {
        const std::size_t k = g.members.size();
        std::vector<bool> pred(k, baseline == Baseline::all_winners);
        if (baseline == Baseline::random) {
            pred[static_cast<std::size_t>(rng() % k)] = true;
        } else if (baseline == Baseline::query_majority || baseline == Baseline::topic_majority) {
            const auto it = topics.find(g.topic_id);
            if (it == topics.end()) throw InputError("instances refer to unknown topic " + g.topic_id);
            const auto& topic = *it->second;
            std::vector<int> wins(k, 0);
            for (int r = 1; r < g.round; ++r) {
                const auto& round = topic.round(r);
                for (std::size_t j = 0; j < topic.queries.size(); ++j) {
                    if (baseline == Baseline::query_majority && static_cast<int>(j) != g.query_index) continue;
                    for (std::size_t c = 0; c < k; ++c) wins[c] += round.winner(j) == instances[g.members[c]].publisher;
                }
            }
            const int top = *std::max_element(wins.begin(), wins.end());
            std::vector<std::size_t> tied;
            for (std::size_t c = 0; c < k; ++c) {
                if (wins[c] == top) tied.push_back(c);
            }
            pred[tied[static_cast<std::size_t>(rng() % tied.size())]] = true;
        }
        out.push_back(std::move(pred));
    }
    return out;
}

GroupPredictions model_predictions(const LinearModel& model, const std::vector<PredictionInstance>& instances,
                                   const std::vector<InstanceGroup>& groups) {
    GroupPredictions out;
    for (const auto& g : groups) {
        const auto chosen = predict_winner(model, instances, g);
        std::vector<bool> pred;
        for (auto i : g.members) pred.push_back(i == chosen);
        out.push_back(std::move(pred));
    }
    return out;
}

GroupScore score_group(const std::vector<bool>& predicted, const std::vector<bool>& labels) {
    if (predicted.size() != labels.size() || labels.empty()) throw InputError("prediction and label sizes differ");
    std::size_t correct = 0, tp = 0, pp = 0, ap = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        correct += predicted[i] == labels[i];
        tp += predicted[i] && labels[i];
        pp += predicted[i];
        ap += labels[i];
    }
    GroupScore s;
    s.acc = static_cast<double>(correct) / static_cast<double>(labels.size());
    if (pp > 0 && ap > 0 && tp > 0) {
        const double precision = static_cast<double>(tp) / static_cast<double>(pp);
        const double recall = static_cast<double>(tp) / static_cast<double>(ap);
        s.f1 = 2 * precision * recall / (precision + recall);
    }
    return s;
}

namespace {

std::vector<bool> group_labels(const std::vector<PredictionInstance>& instances, const InstanceGroup& g) {
    std::vector<bool> labels;
    for (auto i : g.members) labels.push_back(instances[i].label);
    return labels;
}

Metrics average(const std::vector<GroupScore>& scores) {
    Metrics m;
    m.groups = scores.size();
    for (const auto& s : scores) {
        m.acc += s.acc;
        m.f1 += s.f1;
    }
    if (!scores.empty()) {
        m.acc /= static_cast<double>(scores.size());
        m.f1 /= static_cast<double>(scores.size());
    }
    return m;
}

}  // namespace

Metrics evaluate(const GroupPredictions& predictions, const std::vector<PredictionInstance>& instances,
                 const std::vector<InstanceGroup>& groups) {
    if (predictions.size() != groups.size()) throw InputError("one prediction per group expected");
    std::vector<GroupScore> scores;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        scores.push_back(score_group(predictions[g], group_labels(instances, groups[g])));
    }
    return average(scores);
}

// ---------------------------------------------------------------- cross-validation

namespace {

std::vector<PredictionInstance> select_rounds(const std::vector<PredictionInstance>& instances,
                                              const std::set<int>& rounds) {
    std::vector<PredictionInstance> out;
    for (const auto& i : instances) {
        if (rounds.count(i.round)) out.push_back(i);
    }
    return out;
}

std::vector<GroupScore> score_model(const LinearModel& model, const std::vector<PredictionInstance>& data) {
    const auto groups = group_instances(data);
    const auto pred = model_predictions(model, data, groups);
    std::vector<GroupScore> out;
    for (std::size_t g = 0; g < groups.size(); ++g) out.push_back(score_group(pred[g], group_labels(data, groups[g])));
    return out;
}

void summarize(CvReport& report) {
    report.acc = report.f1 = 0;
    for (const auto& f : report.folds) {
        report.acc += f.test.acc;
        report.f1 += f.test.f1;
    }
    if (!report.folds.empty()) {
        report.acc /= static_cast<double>(report.folds.size());
        report.f1 /= static_cast<double>(report.folds.size());
    }
}

}  // namespace

CvReport cross_validate(const std::vector<PredictionInstance>& raw, const CvOptions& options) {
    if (options.grid.empty()) throw InputError("empty parameter grid");
    const auto instances = normalize_per_query(raw);
    std::set<int> rounds;
    for (const auto& i : instances) rounds.insert(i.round);
    if (rounds.size() < 3) {
        throw DomainError("insufficient rounds: cross-validation needs eligible data from at least 3 rounds, got " +
                          std::to_string(rounds.size()));
    }
    const std::vector<int> order(rounds.begin(), rounds.end());

    CvReport report;
    report.grid = options.grid;
    report.seed = options.seed;
    report.folds.resize(order.size());
    std::vector<std::string> errors(order.size());
    const int threads = options.jobs > 0 ? options.jobs : omp_get_max_threads();
    const long folds = static_cast<long>(order.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long fi = 0; fi < folds; ++fi) {
        const auto f = static_cast<std::size_t>(fi);
        try {
            const int test_round = order[f];
            std::set<int> train = rounds;
            train.erase(test_round);

            FoldReport fold;
            fold.test_round = test_round;
            for (double c : options.grid) {
                double sum = 0;
                for (int v : train) {
                    std::set<int> inner = train;
                    inner.erase(v);
                    const auto model = train_lreg(select_rounds(instances, inner), c, options.seed, options.train);
                    sum += average(score_model(model, select_rounds(instances, {v}))).acc;
                }
                fold.validation_acc.push_back(sum / static_cast<double>(train.size()));
            }
            const auto best = static_cast<std::size_t>(
                std::max_element(fold.validation_acc.begin(), fold.validation_acc.end()) - fold.validation_acc.begin());
            fold.selected_c = options.grid[best];
            const auto model = train_lreg(select_rounds(instances, train), fold.selected_c, options.seed, options.train);
            fold.group_scores = score_model(model, select_rounds(instances, {test_round}));
            fold.test = average(fold.group_scores);
            report.folds[f] = std::move(fold);
        } catch (const std::exception& e) {
            errors[f] = e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw DomainError(e);
    }
    summarize(report);
    return report;
}

CvReport evaluate_by_round(const GroupPredictions& predictions, const std::vector<PredictionInstance>& instances,
                           const std::vector<InstanceGroup>& groups) {
    if (predictions.size() != groups.size()) throw InputError("one prediction per group expected");
    std::map<int, FoldReport> by_round;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto& fold = by_round[groups[g].round];
        fold.test_round = groups[g].round;
        fold.group_scores.push_back(score_group(predictions[g], group_labels(instances, groups[g])));
    }
    CvReport report;
    for (auto& [r, fold] : by_round) {
        fold.test = average(fold.group_scores);
        report.folds.push_back(std::move(fold));
    }
    summarize(report);
    return report;
}

// ---------------------------------------------------------------- t-test

double student_t_cdf(double t, double df) {
    if (!(df > 0)) throw DomainError("degrees of freedom must be positive");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * boost::math::ibeta(df / 2, 0.5, x);
    return t >= 0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InputError("paired samples differ in length");
    if (a.size() < 2) throw InputError("paired t-test needs at least two pairs");
    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    double ss = 0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult r;
    r.df = static_cast<int>(n - 1);
    if (sd == 0) {
        if (mean == 0) return r;
        r.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        r.p = 0;
        r.significant = true;
        return r;
    }
    r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p = boost::math::ibeta(r.df / 2.0, 0.5, r.df / (r.df + r.t * r.t));
    r.significant = r.p <= 0.05;
    return r;
}

// ---------------------------------------------------------------- CSV

namespace {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void check_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") != std::string::npos) throw InputError("id \"" + s + "\" cannot be written to CSV");
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

template <typename T>
T parse_number(const std::string& s, int line) {
    T value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw InputError("line " + std::to_string(line) + ": bad number \"" + s + "\"");
    }
    return value;
}

}  // namespace

void write_instances_csv(const std::vector<PredictionInstance>& instances, std::ostream& out) {
    for (const auto& name : feature_names()) out << name << ',';
    out << "topic_id,query_index,round,publisher,label\n";
    for (const auto& inst : instances) {
        check_field(inst.topic_id);
        check_field(inst.publisher);
        for (double x : inst.features) out << format_double(x) << ',';
        out << inst.topic_id << ',' << inst.query_index << ',' << inst.round << ',' << inst.publisher << ','
            << (inst.label ? 1 : 0) << '\n';
    }
}

std::vector<PredictionInstance> read_instances_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty instance CSV");
    auto header = split_csv(line);
    std::vector<std::string> expected = feature_names();
    for (const char* c : {"topic_id", "query_index", "round", "publisher", "label"}) expected.push_back(c);
    if (header != expected) throw InputError("line 1: unexpected CSV header");
    std::vector<PredictionInstance> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv(line);
        if (cells.size() != expected.size()) {
            throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(expected.size()) +
                             " columns, got " + std::to_string(cells.size()));
        }
        PredictionInstance inst;
        for (std::size_t k = 0; k < kFeatureCount; ++k) inst.features[k] = parse_number<double>(cells[k], line_no);
        inst.topic_id = cells[kFeatureCount];
        inst.query_index = parse_number<int>(cells[kFeatureCount + 1], line_no);
        inst.round = parse_number<int>(cells[kFeatureCount + 2], line_no);
        inst.publisher = cells[kFeatureCount + 3];
        const int label = parse_number<int>(cells[kFeatureCount + 4], line_no);
        if (label != 0 && label != 1) throw InputError("line " + std::to_string(line_no) + ": label must be 0 or 1");
        inst.label = label == 1;
        out.push_back(std::move(inst));
    }
    return out;
}

// ---------------------------------------------------------------- JSON

nlohmann::json to_json(const LinearModel& model) {
    nlohmann::json weights = nlohmann::json::object();
    for (std::size_t k = 0; k < kFeatureCount; ++k) weights[feature_names()[k]] = model.weights[k];
    return {{"weights", weights},
            {"bias", model.bias},
            {"c", model.c},
            {"iterations", model.iterations},
            {"seed", model.seed},
            {"rounds", model.rounds}};
}

nlohmann::json to_json(const Metrics& metrics) {
    return {{"acc", metrics.acc}, {"f1", metrics.f1}, {"groups", metrics.groups}};
}

nlohmann::json to_json(const CvReport& report) {
    auto folds = nlohmann::json::array();
    for (const auto& f : report.folds) {
        nlohmann::json jf{{"test_round", f.test_round}, {"test", to_json(f.test)}};
        if (!f.validation_acc.empty()) {
            jf["selected_c"] = f.selected_c;
            jf["validation_acc"] = f.validation_acc;
        }
        folds.push_back(jf);
    }
    nlohmann::json out{{"folds", folds}, {"acc", report.acc}, {"f1", report.f1}};
    if (!report.grid.empty()) {
        out["grid"] = report.grid;
        out["seed"] = report.seed;
    }
    return out;
}

nlohmann::json to_json(const TTestResult& r) {
    auto number = [](double x) -> nlohmann::json {
        if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
        return x;
    };
    return {{"t", number(r.t)}, {"p", r.p}, {"df", r.df}, {"significant", r.significant}};
}

}  // namespace mqrank
