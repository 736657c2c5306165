#pragma once

// Independent reference implementations used by the unit tests and the
// acceptance runner. Deliberately naive; none of them call into the library's
// algorithms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "drmine/matrix.hpp"
#include "drmine/textprep.hpp"

namespace oracle {

using Points = std::vector<std::vector<double>>;

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// Textbook silhouette, straight from the definition.
inline double silhouette(const Points& x, const std::vector<std::size_t>& label) {
    const std::size_t n = x.size();
    std::set<std::size_t> clusters(label.begin(), label.end());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::map<std::size_t, double> sum;
        std::map<std::size_t, std::size_t> size;
        for (std::size_t j = 0; j < n; ++j) {
            size[label[j]]++;
            if (j != i) sum[label[j]] += dist(x[i], x[j]);
        }
        if (size[label[i]] == 1) continue;  // singleton scores 0
        const double a = sum[label[i]] / static_cast<double>(size[label[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (auto c : clusters) {
            if (c != label[i]) b = std::min(b, sum[c] / static_cast<double>(size[c]));
        }
        const double m = std::max(a, b);
        total += m == 0.0 ? 0.0 : (b - a) / m;
    }
    return total / static_cast<double>(n);
}

inline double sse(const Points& x, const std::vector<std::size_t>& label, std::size_t k) {
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> mean(x.front().size(), 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (label[i] != c) continue;
            ++count;
            for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += x[i][d];
        }
        if (count == 0) continue;
        for (auto& m : mean) m /= static_cast<double>(count);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (label[i] == c) total += dist(x[i], mean) * dist(x[i], mean);
        }
    }
    return total;
}

// Best partition into exactly k non-empty groups by brute force (k^n labelings).
inline std::vector<std::size_t> best_partition(const Points& x, std::size_t k) {
    const std::size_t n = x.size();
    std::vector<std::size_t> label(n, 0), best;
    double best_sse = std::numeric_limits<double>::infinity();
    std::size_t states = 1;
    for (std::size_t i = 0; i < n; ++i) states *= k;
    for (std::size_t s = 0; s < states; ++s) {
        std::size_t v = s;
        std::set<std::size_t> used;
        for (std::size_t i = 0; i < n; ++i) {
            label[i] = v % k;
            v /= k;
            used.insert(label[i]);
        }
        if (used.size() != k) continue;
        const double e = sse(x, label, k);
        if (e < best_sse - 1e-12) {
            best_sse = e;
            best = label;
        }
    }
    return best;
}

// Same partition up to relabeling.
inline bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
        }
    }
    return true;
}

// Adjusted Rand index from explicit pair counting.
inline double ari(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    const std::size_t n = a.size();
    double both = 0, only_a = 0, only_b = 0, neither = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool sa = a[i] == a[j], sb = b[i] == b[j];
            if (sa && sb) both++;
            else if (sa) only_a++;
            else if (sb) only_b++;
            else neither++;
        }
    }
    const double pairs = both + only_a + only_b + neither;
    const double ra = both + only_a, rb = both + only_b;
    const double expected = ra * rb / pairs;
    const double max_index = (ra + rb) / 2.0;
    if (max_index == expected) return 1.0;
    return (both - expected) / (max_index - expected);
}

// Unnormalized log posterior of a full topic assignment under collapsed LDA.
// docs[d] lists word ids; z[d] the topic of each token.
inline double collapsed_log_joint(const std::vector<std::vector<std::size_t>>& docs,
                                  const std::vector<std::vector<std::size_t>>& z, std::size_t K, std::size_t V,
                                  double alpha, double beta) {
    std::vector<std::vector<double>> ndk(docs.size(), std::vector<double>(K, 0.0));
    std::vector<std::vector<double>> nkw(K, std::vector<double>(V, 0.0));
    std::vector<double> nk(K, 0.0);
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (std::size_t t = 0; t < docs[d].size(); ++t) {
            ndk[d][z[d][t]]++;
            nkw[z[d][t]][docs[d][t]]++;
            nk[z[d][t]]++;
        }
    }
    double lp = 0.0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (std::size_t k = 0; k < K; ++k) lp += std::lgamma(ndk[d][k] + alpha) - std::lgamma(alpha);
        lp -= std::lgamma(static_cast<double>(docs[d].size()) + K * alpha) - std::lgamma(K * alpha);
    }
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t w = 0; w < V; ++w) lp += std::lgamma(nkw[k][w] + beta) - std::lgamma(beta);
        lp -= std::lgamma(nk[k] + V * beta) - std::lgamma(V * beta);
    }
    return lp;
}

// Gaussian blobs around centers spaced `spacing` apart along distinct axes.
struct Blobs {
    Points points;
    std::vector<std::size_t> labels;
};

inline Blobs gaussian_blobs(std::size_t clusters, std::size_t per_cluster, std::size_t dim, double sigma,
                            double spacing, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    Blobs b;
    for (std::size_t c = 0; c < clusters; ++c) {
        std::vector<double> center(dim, 0.0);
        center[c % dim] = spacing * static_cast<double>(c / dim + 1);
        for (std::size_t i = 0; i < per_cluster; ++i) {
            std::vector<double> p(dim);
            for (std::size_t d = 0; d < dim; ++d) p[d] = center[d] + noise(gen);
            b.points.push_back(p);
            b.labels.push_back(c);
        }
    }
    return b;
}

inline drmine::Matrix to_matrix(const Points& p) { return drmine::Matrix::from_rows(p); }

inline Points from_matrix(const drmine::Matrix& m) {
    Points p(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) p[i][j] = m(i, j);
    }
    return p;
}

// Two groups of documents over disjoint 5-word vocabularies.
struct PlantedCorpus {
    std::vector<drmine::textprep::BowDoc> corpus;
    drmine::textprep::Vocabulary vocabulary;
};

inline PlantedCorpus planted_corpus(std::uint64_t seed, std::size_t docs_per_group = 10,
                                    std::size_t tokens_per_doc = 30) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::size_t> pick(0, 4);
    std::vector<drmine::textprep::TokenizedDoc> docs;
    for (std::size_t g = 0; g < 2; ++g) {
        for (std::size_t d = 0; d < docs_per_group; ++d) {
            drmine::textprep::TokenizedDoc doc{docs.size(), {}};
            for (std::size_t t = 0; t < tokens_per_doc; ++t) {
                doc.tokens.push_back(std::string(1, static_cast<char>((g == 0 ? 'a' : 'p') + pick(gen))) + "w");
            }
            docs.push_back(doc);
        }
    }
    PlantedCorpus pc{{}, drmine::textprep::build_vocabulary(docs)};
    for (const auto& d : docs) pc.corpus.push_back(drmine::textprep::to_bow(d.tokens, pc.vocabulary, d.description_id));
    return pc;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

// Every regular file below dir (relative path -> bytes).
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files[std::filesystem::relative(e.path(), dir).string()] = slurp(e.path());
    }
    return files;
}

// Fresh empty scratch directory.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("drmine-test-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace oracle
