#pragma once

// Lexical document features, tf.idf similarity and ranking similarity.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mqrank/errors.hpp"

namespace mqrank {

struct TokenizedDocument {
    std::vector<std::string> tokens;
    std::map<std::string, int> counts;

    std::size_t length() const { return tokens.size(); }
    int count(const std::string& term) const {
        const auto it = counts.find(term);
        return it == counts.end() ? 0 : it->second;
    }
};

/// Lowercases ASCII letters and splits on runs of non-alphanumeric bytes.
/// Bytes >= 0x80 are kept as token characters so UTF-8 words stay whole.
TokenizedDocument tokenize(std::string_view text);

/// Unique terms in first-occurrence order.
std::vector<std::string> unique_terms(const TokenizedDocument& doc);

class CorpusStats {
public:
    CorpusStats() = default;
    explicit CorpusStats(const std::vector<TokenizedDocument>& docs);

    void add(const TokenizedDocument& doc);

    std::size_t doc_count() const { return docs_; }
    int df(const std::string& term) const;
    long long cf(const std::string& term) const;
    long long total_terms() const { return total_; }
    double average_length() const { return docs_ == 0 ? 0.0 : static_cast<double>(total_) / docs_; }

private:
    std::size_t docs_ = 0;
    long long total_ = 0;
    std::unordered_map<std::string, int> df_;
    std::unordered_map<std::string, long long> cf_;
};

using Stopwords = std::set<std::string>;

/// A small English stopword list.
const Stopwords& default_stopwords();

/// One term per line; blank lines and lines starting with '#' are skipped.
Stopwords load_stopwords(const std::string& path);

struct FeatureParams {
    double k1 = 1.2;
    double b = 0.75;
    double mu = 1000.0;
    double entropy_base = 2.0;
};

struct DocumentFeatures {
    double tf = 0;
    double normtf = 0;
    double bm25 = 0;
    double lmir = 0;
    double len = 0;
    double fracstop = 0;
    double stopcover = 0;
    double ent = 0;
};

inline const std::vector<std::string>& document_feature_names() {
    static const std::vector<std::string> names{"tf", "normtf", "bm25", "lmir", "len", "fracstop", "stopcover", "ent"};
    return names;
}

/// Query terms are de-duplicated. BM25 uses idf = ln(1 + (N - df + 0.5)/(df + 0.5));
/// LMIR is sum over query terms of ln((tf + mu*Pc)/(len + mu)) with
/// Pc = max(cf, 0.5)/|C|. Throws DomainError on an empty stoplist.
DocumentFeatures compute_features(const TokenizedDocument& doc, const std::vector<std::string>& query,
                                  const CorpusStats& stats, const Stopwords& stopwords,
                                  const FeatureParams& params = {});

using SparseVector = std::map<std::string, double>;

/// tf * (ln((N+1)/(df+1)) + 1) per term.
SparseVector tfidf_vector(const TokenizedDocument& doc, const CorpusStats& stats);

/// Cosine in [0,1]; 0 when either vector is zero.
double cosine(const SparseVector& a, const SparseVector& b);

double tfidf_cosine(const TokenizedDocument& a, const TokenizedDocument& b, const CorpusStats& stats);

/// Mean of the vectors (empty input gives the zero vector).
SparseVector centroid(const std::vector<SparseVector>& vectors);

namespace detail {
double rbo_ext(const std::vector<long>& a, const std::vector<long>& b, double p);
}

/// Extrapolated rank-biased overlap of two duplicate-free rankings. Two empty
/// rankings are identical (1); one empty ranking shares nothing (0).
template <typename T>
double rbo(const std::vector<T>& a, const std::vector<T>& b, double p) {
    if (!(p > 0 && p < 1)) throw DomainError("rbo persistence must lie in (0,1)");
    std::map<T, long> ids;
    auto encode = [&](const std::vector<T>& list, const char* name) {
        std::vector<long> out;
        std::set<T> seen;
        for (const auto& x : list) {
            if (!seen.insert(x).second) throw InputError(std::string("duplicate item in ranking ") + name);
            out.push_back(ids.emplace(x, static_cast<long>(ids.size())).first->second);
        }
        return out;
    };
    const auto ea = encode(a, "a");
    const auto eb = encode(b, "b");
    return detail::rbo_ext(ea, eb, p);
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

/// Sum over lists of 1/(k + rank), rank 1-based. Result sorted by fused score
/// descending, then item ascending.
std::vector<std::pair<std::string, double>> rrf_fuse(const std::vector<std::vector<std::string>>& rank_lists,
                                                     double k = 60.0);

/// Pairwise similarity of candidate queries: every pair is ranked once by the
/// Jaccard similarity of their term sets and once by the RBO of their result
/// lists (equal scores share the better rank), and the two ranks are fused
/// with RRF. Returns a symmetric matrix with zeros on the diagonal.
std::vector<std::vector<double>> fused_query_similarity(const std::vector<std::set<std::string>>& terms,
                                                        const std::vector<std::vector<std::string>>& results,
                                                        double persistence = 0.9, double k = 60.0);

/// Starting from `seed`, repeatedly adds the candidate with the lowest mean
/// similarity to the already selected ones (lowest index on ties) until
/// `count` are selected (the seed counts).
std::vector<int> select_diverse_queries(const std::vector<std::vector<double>>& similarity, int seed, int count);

}  // namespace mqrank
