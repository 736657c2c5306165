#include "drmine/topicmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "drmine/digest.hpp"
#include "drmine/error.hpp"
#include "drmine/random.hpp"

namespace drmine::topicmodel {

void LdaConfig::validate() const {
    if (num_topics < 1) throw DataError("LDA: number of topics must be at least 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DataError("LDA: beta must be positive");
    if (!std::isfinite(alpha)) throw DataError("LDA: alpha must be finite");
    if (iterations < 1) throw DataError("LDA: iterations must be at least 1");
}

LdaModel fit_lda(std::span<const textprep::BowDoc> corpus, const textprep::Vocabulary& vocab,
                 const LdaConfig& config) {
    config.validate();
    if (vocab.empty()) throw DataError("LDA: vocabulary is empty");
    if (corpus.empty()) throw DataError("LDA: corpus is empty");

    const std::size_t K = config.num_topics;
    const std::size_t V = vocab.size();
    const std::size_t D = corpus.size();
    const double alpha = config.effective_alpha();
    const double beta = config.beta;
    const double v_beta = static_cast<double>(V) * beta;

    std::vector<std::vector<std::size_t>> words(D);
    std::size_t total_tokens = 0;
    for (std::size_t d = 0; d < D; ++d) {
        for (const auto& [w, c] : corpus[d].counts) {
            if (w >= V) throw DataError("LDA: word id outside vocabulary");
            words[d].insert(words[d].end(), c, w);
        }
        total_tokens += words[d].size();
    }
    if (total_tokens == 0) throw DataError("LDA: corpus contains no tokens");

    // Count tables: n_dk (D x K), n_kw (K x V), n_k (K).
    std::vector<std::size_t> n_dk(D * K, 0), n_kw(K * V, 0), n_k(K, 0);
    std::vector<std::vector<std::size_t>> z(D);
    Rng rng(config.seed);
    for (std::size_t d = 0; d < D; ++d) {
        z[d].resize(words[d].size());
        for (std::size_t i = 0; i < words[d].size(); ++i) {
            const std::size_t k = rng.index(K);
            z[d][i] = k;
            ++n_dk[d * K + k];
            ++n_kw[k * V + words[d][i]];
            ++n_k[k];
        }
    }

    std::vector<double> cumulative(K);
    for (std::size_t sweep = 0; sweep < config.iterations; ++sweep) {
        for (std::size_t d = 0; d < D; ++d) {
            for (std::size_t i = 0; i < words[d].size(); ++i) {
                const std::size_t w = words[d][i];
                std::size_t k = z[d][i];
                --n_dk[d * K + k];
                --n_kw[k * V + w];
                --n_k[k];

                double total = 0.0;
                for (std::size_t t = 0; t < K; ++t) {
                    total += (static_cast<double>(n_dk[d * K + t]) + alpha) *
                             (static_cast<double>(n_kw[t * V + w]) + beta) /
                             (static_cast<double>(n_k[t]) + v_beta);
                    cumulative[t] = total;
                }
                const double u = rng.uniform() * total;
                k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                             cumulative.begin());
                if (k >= K) k = K - 1;

                z[d][i] = k;
                ++n_dk[d * K + k];
                ++n_kw[k * V + w];
                ++n_k[k];
            }
        }
    }

    LdaModel model;
    model.config = config;
    model.config.alpha = alpha;
    model.vocabulary = vocab;
    model.theta = Matrix(D, K);
    model.phi = Matrix(K, V);
    const double k_alpha = static_cast<double>(K) * alpha;
    for (std::size_t d = 0; d < D; ++d) {
        const double denom = static_cast<double>(words[d].size()) + k_alpha;
        for (std::size_t k = 0; k < K; ++k) {
            model.theta(d, k) = (static_cast<double>(n_dk[d * K + k]) + alpha) / denom;
        }
    }
    for (std::size_t k = 0; k < K; ++k) {
        const double denom = static_cast<double>(n_k[k]) + v_beta;
        for (std::size_t w = 0; w < V; ++w) {
            model.phi(k, w) = (static_cast<double>(n_kw[k * V + w]) + beta) / denom;
        }
    }
    model.description_ids.reserve(D);
    for (const auto& doc : corpus) model.description_ids.push_back(doc.description_id);
    model.assignments = std::move(z);
    return model;
}

const Matrix& doc_topic_matrix(const LdaModel& model) { return model.theta; }

std::size_t dominant_topic(std::span<const double> distribution) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < distribution.size(); ++k) {
        if (distribution[k] > distribution[best]) best = k;
    }
    return best;
}

std::string format_percent(double value) {
    // The small offset keeps values such as 0.5027 (stored as 0.50269999...)
    // on the decimal side they were written as.
    const double scaled = std::floor(value * 10000.0 + 0.5 + 1e-7);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", scaled / 100.0);
    return buf;
}

std::vector<std::size_t> top_word_ids(std::span<const double> distribution, std::size_t top_n) {
    std::vector<std::size_t> ids(distribution.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    const std::size_t n = std::min(top_n, ids.size());
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (distribution[a] != distribution[b]) return distribution[a] > distribution[b];
                          return a < b;
                      });
    ids.resize(n);
    return ids;
}

TopicSummary summarize_topics(const LdaModel& model, std::size_t description_id, std::size_t top_n) {
    const auto it = std::find(model.description_ids.begin(), model.description_ids.end(), description_id);
    if (it == model.description_ids.end()) {
        throw DataError("topic summary: description " + std::to_string(description_id) +
                        " is not part of the model (" + std::to_string(model.theta.rows()) + " documents)");
    }
    const auto row = static_cast<std::size_t>(it - model.description_ids.begin());
    TopicSummary summary;
    summary.description_id = description_id;
    const auto dist = model.theta.row(row);
    summary.dominant_topic = dominant_topic(dist);
    summary.percent_contribution = format_percent(dist[summary.dominant_topic]);
    if (summary.dominant_topic < model.phi.rows()) {
        for (const auto id : top_word_ids(model.phi.row(summary.dominant_topic), top_n)) {
            summary.keywords.push_back(model.vocabulary.word(id));
        }
    }
    return summary;
}

std::string vocabulary_hash(const textprep::Vocabulary& vocab) {
    std::string buffer;
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        buffer += vocab.word(id);
        buffer.push_back('\t');
        buffer += std::to_string(vocab.doc_freq(id));
        buffer.push_back('\n');
    }
    buffer += "D=" + std::to_string(vocab.num_docs());
    return sha256_hex(buffer);
}

nlohmann::json model_to_json(const LdaModel& model, std::size_t phi_top_n) {
    auto theta = nlohmann::json::array();
    for (std::size_t d = 0; d < model.theta.rows(); ++d) {
        const auto r = model.theta.row(d);
        theta.push_back(std::vector<double>(r.begin(), r.end()));
    }
    auto phi = nlohmann::json::array();
    for (std::size_t k = 0; k < model.phi.rows(); ++k) {
        const auto r = model.phi.row(k);
        if (phi_top_n == 0) {
            phi.push_back(std::vector<double>(r.begin(), r.end()));
            continue;
        }
        auto top = nlohmann::json::array();
        for (const auto id : top_word_ids(r, phi_top_n)) {
            top.push_back({{"word", model.vocabulary.word(id)}, {"probability", r[id]}});
        }
        phi.push_back(std::move(top));
    }
    return {
        {"config",
         {{"num_topics", model.config.num_topics},
          {"alpha", model.config.effective_alpha()},
          {"beta", model.config.beta},
          {"iterations", model.config.iterations},
          {"seed", model.config.seed}}},
        {"vocabulary_hash", vocabulary_hash(model.vocabulary)},
        {"vocabulary_size", model.vocabulary.size()},
        {"description_ids", model.description_ids},
        {"theta", std::move(theta)},
        {"phi", std::move(phi)},
        {"phi_truncated_to", phi_top_n},
    };
}

}  // namespace drmine::topicmodel
