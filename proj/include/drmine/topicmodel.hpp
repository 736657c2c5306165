#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "drmine/matrix.hpp"
#include "drmine/textprep.hpp"

namespace drmine::topicmodel {

struct LdaConfig {
    std::size_t num_topics = 10;
    double alpha = 0.0;  // symmetric doc-topic prior; <= 0 means 1 / num_topics
    double beta = 0.01;  // symmetric topic-word prior
    std::size_t iterations = 1000;
    std::uint64_t seed = 42;

    double effective_alpha() const { return alpha > 0.0 ? alpha : 1.0 / static_cast<double>(num_topics); }
    void validate() const;
};

struct LdaModel {
    Matrix theta;  // D x K, rows sum to 1
    Matrix phi;    // K x V, rows sum to 1
    LdaConfig config;
    textprep::Vocabulary vocabulary;
    std::vector<std::size_t> description_ids;  // row d of theta belongs to description_ids[d]
    // Final-sweep topic of every token, per document, in token order.
    std::vector<std::vector<std::size_t>> assignments;
};

// Collapsed Gibbs sampling. Tokens are laid out per document in ascending
// word-id order; each sweep visits documents in order, then tokens in order,
// resampling each token from
//   p(z = k) ∝ (n_dk + α) (n_kw + β) / (n_k + Vβ)
// with the token's own assignment removed from the counts. Estimates use
// the final sweep's counts only:
//   theta[d][k] = (n_dk + α) / (n_d + Kα),  phi[k][w] = (n_kw + β) / (n_k + Vβ).
LdaModel fit_lda(std::span<const textprep::BowDoc> corpus, const textprep::Vocabulary& vocab,
                 const LdaConfig& config);

const Matrix& doc_topic_matrix(const LdaModel& model);

struct TopicSummary {
    std::size_t description_id = 0;
    std::size_t dominant_topic = 0;
    std::string percent_contribution;  // "NN.NN%"
    std::vector<std::string> keywords;
};

// Dominant topic, its rendered share and the top_n words of that topic.
// Throws DataError for a description id the model does not contain.
TopicSummary summarize_topics(const LdaModel& model, std::size_t description_id, std::size_t top_n = 10);

// Argmax with ties to the lowest index.
std::size_t dominant_topic(std::span<const double> distribution);
// value * 100 rounded half-up to two decimals, with a '%' suffix.
std::string format_percent(double value);
// Ids of the top_n largest entries; ties go to the lower id.
std::vector<std::size_t> top_word_ids(std::span<const double> distribution, std::size_t top_n);

// SHA-256 over the vocabulary words and document frequencies.
std::string vocabulary_hash(const textprep::Vocabulary& vocab);

// phi_top_n == 0 dumps every word.
nlohmann::json model_to_json(const LdaModel& model, std::size_t phi_top_n = 0);

}  // namespace drmine::topicmodel
