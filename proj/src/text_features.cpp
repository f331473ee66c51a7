#include "mqrank/text_features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>

namespace mqrank {

TokenizedDocument tokenize(std::string_view text) {
    TokenizedDocument doc;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        ++doc.counts[cur];
        doc.tokens.push_back(std::move(cur));
        cur.clear();
    };
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c >= 0x80 || std::isalnum(c)) {
            cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
        } else {
            flush();
        }
    }
    flush();
    return doc;
}

std::vector<std::string> unique_terms(const TokenizedDocument& doc) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& t : doc.tokens) {
        if (seen.insert(t).second) out.push_back(t);
    }
    return out;
}

CorpusStats::CorpusStats(const std::vector<TokenizedDocument>& docs) {
    for (const auto& d : docs) add(d);
}

void CorpusStats::add(const TokenizedDocument& doc) {
    ++docs_;
    total_ += static_cast<long long>(doc.length());
    for (const auto& [term, c] : doc.counts) {
        ++df_[term];
        cf_[term] += c;
    }
}

int CorpusStats::df(const std::string& term) const {
    const auto it = df_.find(term);
    return it == df_.end() ? 0 : it->second;
}

long long CorpusStats::cf(const std::string& term) const {
    const auto it = cf_.find(term);
    return it == cf_.end() ? 0 : it->second;
}

const Stopwords& default_stopwords() {
    static const Stopwords words{
        "a",       "about",  "above",   "after",   "again",  "against", "all",     "am",    "an",     "and",
        "any",     "are",    "as",      "at",      "be",     "because", "been",    "before", "being", "below",
        "between", "both",   "but",     "by",      "can",    "did",     "do",      "does",  "doing",  "don",
        "down",    "during", "each",    "few",     "for",    "from",    "further", "had",   "has",    "have",
        "having",  "he",     "her",     "here",    "hers",   "herself", "him",     "himself", "his",  "how",
        "i",       "if",     "in",      "into",    "is",     "it",      "its",     "itself", "just",  "me",
        "more",    "most",   "my",      "myself",  "no",     "nor",     "not",     "now",   "of",     "off",
        "on",      "once",   "only",    "or",      "other",  "our",     "ours",    "ourselves", "out", "over",
        "own",     "s",      "same",    "she",     "should", "so",      "some",    "such",  "t",      "than",
        "that",    "the",    "their",   "theirs",  "them",   "themselves", "then", "there", "these",  "they",
        "this",    "those",  "through", "to",      "too",    "under",   "until",   "up",    "very",   "was",
        "we",      "were",   "what",    "when",    "where",  "which",   "while",   "who",   "whom",   "why",
        "will",    "with",   "you",     "your",    "yours",  "yourself", "yourselves",
    };
    return words;
}

Stopwords load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read stopword file " + path);
    Stopwords out;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        std::string term = line.substr(first, last - first + 1);
        std::transform(term.begin(), term.end(), term.begin(),
                       [](unsigned char c) { return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c); });
        out.insert(term);
    }
    return out;
}

DocumentFeatures compute_features(const TokenizedDocument& doc, const std::vector<std::string>& query,
                                  const CorpusStats& stats, const Stopwords& stopwords,
                                  const FeatureParams& params) {
    if (stopwords.empty()) throw DomainError("stopword list is empty; stopcover is undefined");
    DocumentFeatures f;
    const double len = static_cast<double>(doc.length());
    const double n_docs = static_cast<double>(stats.doc_count());
    const double avgdl = stats.average_length();
    const double collection = static_cast<double>(std::max<long long>(stats.total_terms(), 1));

    const std::set<std::string> terms(query.begin(), query.end());
    for (const auto& t : terms) {
        const double tf = doc.count(t);
        f.tf += tf;

        const double df = stats.df(t);
        const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        const double norm = avgdl > 0 ? len / avgdl : 1.0;
        f.bm25 += idf * tf * (params.k1 + 1) / (tf + params.k1 * (1 - params.b + params.b * norm));

        const double pc = std::max(static_cast<double>(stats.cf(t)), 0.5) / collection;
        f.lmir += std::log((tf + params.mu * pc) / (len + params.mu));
    }
    f.normtf = len > 0 ? f.tf / len : 0.0;
    f.len = len;

    std::size_t stop_tokens = 0;
    std::size_t covered = 0;
    for (const auto& [term, c] : doc.counts) {
        if (stopwords.count(term)) {
            stop_tokens += static_cast<std::size_t>(c);
            ++covered;
        }
    }
    f.fracstop = len > 0 ? static_cast<double>(stop_tokens) / len : 0.0;
    f.stopcover = static_cast<double>(covered) / static_cast<double>(stopwords.size());

    const double log_base = std::log(params.entropy_base);
    for (const auto& [term, c] : doc.counts) {
        const double pt = c / len;
        f.ent -= pt * std::log(pt) / log_base;
    }
    if (f.ent == 0.0) f.ent = 0.0;  // normalize -0
    return f;
}

SparseVector tfidf_vector(const TokenizedDocument& doc, const CorpusStats& stats) {
    SparseVector out;
    const double n_docs = static_cast<double>(stats.doc_count());
    for (const auto& [term, c] : doc.counts) {
        const double idf = std::log((n_docs + 1) / (stats.df(term) + 1.0)) + 1.0;
        out[term] = c * idf;
    }
    return out;
}

double cosine(const SparseVector& a, const SparseVector& b) {
    double dot = 0;
    double na = 0;
    double nb = 0;
    for (const auto& [t, w] : a) {
        na += w * w;
        const auto it = b.find(t);
        if (it != b.end()) dot += w * it->second;
    }
    for (const auto& [t, w] : b) nb += w * w;
    if (na == 0 || nb == 0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double tfidf_cosine(const TokenizedDocument& a, const TokenizedDocument& b, const CorpusStats& stats) {
    return cosine(tfidf_vector(a, stats), tfidf_vector(b, stats));
}

SparseVector centroid(const std::vector<SparseVector>& vectors) {
    SparseVector out;
    if (vectors.empty()) return out;
    for (const auto& v : vectors) {
        for (const auto& [t, w] : v) out[t] += w;
    }
    for (auto& [t, w] : out) w /= static_cast<double>(vectors.size());
    return out;
}

namespace detail {

double rbo_ext(const std::vector<long>& a, const std::vector<long>& b, double p) {
    const auto& shorter = a.size() <= b.size() ? a : b;
    const auto& longer = a.size() <= b.size() ? b : a;
    const std::size_t s = shorter.size();
    const std::size_t l = longer.size();
    if (s == 0) return l == 0 ? 1.0 : 0.0;

    std::unordered_set<long> seen_short;
    std::unordered_set<long> seen_long;
    double overlap = 0;
    double weight = 1;  // p^d
    double sum = 0;
    for (std::size_t d = 1; d <= s; ++d) {
        const long x = shorter[d - 1];
        const long y = longer[d - 1];
        if (x == y) {
            overlap += 1;
        } else {
            if (seen_long.count(x)) overlap += 1;
            if (seen_short.count(y)) overlap += 1;
        }
        seen_short.insert(x);
        seen_long.insert(y);
        weight *= p;
        sum += overlap / static_cast<double>(d) * weight;
    }
    const double overlap_s = overlap;
    for (std::size_t d = s + 1; d <= l; ++d) {
        if (seen_short.count(longer[d - 1])) overlap += 1;
        weight *= p;
        const auto dd = static_cast<double>(d);
        const auto ss = static_cast<double>(s);
        sum += overlap / dd * weight + overlap_s * (dd - ss) / (ss * dd) * weight;
    }
    return (1 - p) / p * sum + ((overlap - overlap_s) / static_cast<double>(l) + overlap_s / static_cast<double>(s)) * weight;
}

}  // namespace detail

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& t : a) common += b.count(t);
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

std::vector<std::pair<std::string, double>> rrf_fuse(const std::vector<std::vector<std::string>>& rank_lists,
                                                     double k) {
    std::map<std::string, double> scores;
    for (const auto& list : rank_lists) {
        std::set<std::string> seen;
        for (std::size_t r = 0; r < list.size(); ++r) {
            if (!seen.insert(list[r]).second) throw InputError("duplicate item '" + list[r] + "' in a fused list");
            scores[list[r]] += 1.0 / (k + static_cast<double>(r + 1));
        }
    }
    std::vector<std::pair<std::string, double>> out(scores.begin(), scores.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    return out;
}

namespace {

// 1-based competition ranks by descending score.
std::vector<int> ranks_desc(const std::vector<double>& scores) {
    std::vector<int> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        int better = 0;
        for (double s : scores) better += s > scores[i];
        out[i] = better + 1;
    }
    return out;
}

}  // namespace

std::vector<std::vector<double>> fused_query_similarity(const std::vector<std::set<std::string>>& terms,
                                                        const std::vector<std::vector<std::string>>& results,
                                                        double persistence, double k) {
    if (terms.size() != results.size()) throw InputError("need one term set and one result list per query");
    const std::size_t n = terms.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<double> jac;
    std::vector<double> overlap;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            pairs.emplace_back(i, j);
            jac.push_back(jaccard(terms[i], terms[j]));
            overlap.push_back(rbo(results[i], results[j], persistence));
        }
    }
    const auto rj = ranks_desc(jac);
    const auto ro = ranks_desc(overlap);
    std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
    for (std::size_t x = 0; x < pairs.size(); ++x) {
        const double fused = 1.0 / (k + rj[x]) + 1.0 / (k + ro[x]);
        out[pairs[x].first][pairs[x].second] = fused;
        out[pairs[x].second][pairs[x].first] = fused;
    }
    return out;
}

std::vector<int> select_diverse_queries(const std::vector<std::vector<double>>& similarity, int seed, int count) {
    const int n = static_cast<int>(similarity.size());
    if (n == 0) throw DomainError("no candidate queries");
    for (const auto& row : similarity) {
        if (static_cast<int>(row.size()) != n) throw InputError("similarity matrix must be square");
    }
    if (seed < 0 || seed >= n) throw DomainError("seed query out of range");
    if (count < 1 || count > n) throw DomainError("count must lie in [1, number of candidates]");
    std::vector<int> selected{seed};
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    taken[static_cast<std::size_t>(seed)] = 1;
    while (static_cast<int>(selected.size()) < count) {
        int best = -1;
        double best_mean = 0;
        for (int c = 0; c < n; ++c) {
            if (taken[static_cast<std::size_t>(c)]) continue;
            double total = 0;
            for (int s : selected) total += similarity[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)];
            const double mean = total / static_cast<double>(selected.size());
            if (best < 0 || mean < best_mean) {
                best = c;
                best_mean = mean;
            }
        }
        taken[static_cast<std::size_t>(best)] = 1;
        selected.push_back(best);
    }
    return selected;
}

}  // namespace mqrank
