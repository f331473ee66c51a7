#pragma once

// Winner prediction: feature builder, L1 logistic regression, baselines,
// cross-validation over rounds and the paired t-test.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mqrank/competition_log.hpp"
#include "mqrank/text_features.hpp"

namespace mqrank {

inline constexpr std::size_t kFeatureCount = 27;
using FeatureVector = std::array<double, kFeatureCount>;

struct FeatureSection {
    std::string name;
    std::size_t offset;
    std::size_t size;
};

/// Micro(0,12) Macro(12,3) TopicMacro(15,2) TopicRank(17,3) QueryRank(20,3)
/// PrevChange(23,3) Len(26,1).
const std::vector<FeatureSection>& feature_sections();
const std::vector<std::string>& feature_names();

struct PredictionInstance {
    std::string topic_id;
    int query_index = 0;
    int round = 0;
    std::string publisher;
    FeatureVector features{};
    bool label = false;
};

/// Micro counts are grouped term-group-major: for each of [query terms,
/// stopwords, other terms], the unique terms of the previous winner added to
/// and removed from the candidate's document, then the same for terms the
/// winner lacks. A query term that is also a stopword counts as a query term.
/// Candidates are all publishers not ranked first for the query at l-1, in id
/// order. Parallel over triples when jobs != 1.
std::vector<PredictionInstance> build_instances(const CompetitionLog& log, const std::vector<EligibleTriple>& triples,
                                                const Stopwords& stopwords = default_stopwords(), int jobs = 0,
                                                std::vector<std::string>* warnings = nullptr);
std::vector<PredictionInstance> build_instances_serial(const CompetitionLog& log,
                                                       const std::vector<EligibleTriple>& triples,
                                                       const Stopwords& stopwords = default_stopwords(),
                                                       std::vector<std::string>* warnings = nullptr);

/// Instances sharing (topic, query, round), in order of first appearance.
struct InstanceGroup {
    std::string topic_id;
    int query_index = 0;
    int round = 0;
    std::vector<std::size_t> members;
};
std::vector<InstanceGroup> group_instances(const std::vector<PredictionInstance>& instances);

/// Min-max per group and feature; constant features become 0.
std::vector<PredictionInstance> normalize_per_query(std::vector<PredictionInstance> instances);

/// Zeroes every feature of the named sections. Throws InputError on an unknown name.
std::vector<PredictionInstance> mask_sections(std::vector<PredictionInstance> instances,
                                              const std::set<std::string>& sections);

struct LinearModel {
    FeatureVector weights{};
    double bias = 0;
    double c = 1;  // inverse regularization strength
    int iterations = 0;
    std::uint64_t seed = 0;
    std::vector<int> rounds;  // training rounds

    double margin(const FeatureVector& x) const;
    double probability(const FeatureVector& x) const;
};

struct TrainOptions {
    int max_iterations = 500;
    double tolerance = 1e-6;  // stop when the largest coefficient step falls below this
};

/// Minimizes mean log-loss + ||w||_1 / (c N) with an unpenalized bias by
/// FISTA. Scaling the data by k and c by 1/k leaves the objective unchanged.
/// Throws DomainError unless both labels occur.
LinearModel train_lreg(const std::vector<PredictionInstance>& instances, double c, std::uint64_t seed,
                       const TrainOptions& options = {});

double mean_logistic_loss(const std::vector<PredictionInstance>& instances, const FeatureVector& w, double b);
/// Gradient of mean_logistic_loss; the last entry is the bias.
std::array<double, kFeatureCount + 1> mean_logistic_gradient(const std::vector<PredictionInstance>& instances,
                                                             const FeatureVector& w, double b);
double lreg_objective(const std::vector<PredictionInstance>& instances, const FeatureVector& w, double b, double c);

/// Argmax of the decision score over the group; lowest publisher id on ties.
std::size_t predict_winner(const LinearModel& model, const std::vector<PredictionInstance>& instances,
                           const InstanceGroup& group);

enum class Baseline { random, query_majority, topic_majority, all_winners, all_losers };
const std::vector<Baseline>& all_baselines();
std::string to_string(Baseline b);

/// Per group, one flag per member: predicted winner or not.
using GroupPredictions = std::vector<std::vector<bool>>;

/// Majority baselines count rounds 1..l-1 won by each candidate, for the
/// query or for any query of the topic, with ties broken at random.
GroupPredictions baseline_predictions(Baseline baseline, const CompetitionLog& log,
                                      const std::vector<PredictionInstance>& instances,
                                      const std::vector<InstanceGroup>& groups, std::uint64_t seed);

GroupPredictions model_predictions(const LinearModel& model, const std::vector<PredictionInstance>& instances,
                                   const std::vector<InstanceGroup>& groups);

struct GroupScore {
    double acc = 0;
    double f1 = 0;
};

/// F1 is 0 when nothing is predicted positive.
GroupScore score_group(const std::vector<bool>& predicted, const std::vector<bool>& labels);

struct Metrics {
    double acc = 0;
    double f1 = 0;
    std::size_t groups = 0;
};

/// Mean over groups.
Metrics evaluate(const GroupPredictions& predictions, const std::vector<PredictionInstance>& instances,
                 const std::vector<InstanceGroup>& groups);

struct FoldReport {
    int test_round = 0;
    double selected_c = 0;
    std::vector<double> validation_acc;  // per grid entry
    Metrics test;
    std::vector<GroupScore> group_scores;  // test groups, in group order
};

struct CvReport {
    std::vector<double> grid;
    std::uint64_t seed = 0;
    std::vector<FoldReport> folds;
    double acc = 0;  // mean over folds
    double f1 = 0;
};

struct CvOptions {
    std::vector<double> grid{1, 10, 50, 100};
    std::uint64_t seed = 0;
    int jobs = 0;  // outer folds in parallel
    TrainOptions train;
};

/// Leave-one-round-out with an inner leave-one-round-out loop selecting c by
/// mean validation Acc (first grid entry on ties). Instances are normalized
/// per query first. Throws DomainError with fewer than three rounds.
CvReport cross_validate(const std::vector<PredictionInstance>& instances, const CvOptions& options = {});

/// Scores of fixed predictions under the same fold structure: per-round means,
/// averaged over rounds.
CvReport evaluate_by_round(const GroupPredictions& predictions, const std::vector<PredictionInstance>& instances,
                           const std::vector<InstanceGroup>& groups);

struct TTestResult {
    double t = 0;
    double p = 1;
    int df = 0;
    bool significant = false;  // p <= 0.05
};

/// Two-tailed paired t-test. Zero-variance differences with a nonzero mean give
/// t = +-inf and p = 0; all-zero differences give t = 0, p = 1.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// Student t CDF.
double student_t_cdf(double t, double df);

void write_instances_csv(const std::vector<PredictionInstance>& instances, std::ostream& out);
std::vector<PredictionInstance> read_instances_csv(std::istream& in);

nlohmann::json to_json(const LinearModel& model);
nlohmann::json to_json(const Metrics& metrics);
nlohmann::json to_json(const CvReport& report);
nlohmann::json to_json(const TTestResult& result);

}  // namespace mqrank
