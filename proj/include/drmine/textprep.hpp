#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

namespace drmine::textprep {

using StopwordSet = std::unordered_set<std::string>;

// Plain-text list, one word per line; '#' starts a comment. Words are
// lowercased.
StopwordSet parse_stopwords(std::string_view text);
StopwordSet load_stopwords(const std::string& path);
const StopwordSet& default_stopwords();

struct TokenizedDoc {
    std::size_t description_id = 0;
    std::vector<std::string> tokens;
    friend bool operator==(const TokenizedDoc&, const TokenizedDoc&) = default;
};

// Distinct pieces dropped only because they contain non-ASCII letters.
using RejectLog = std::set<std::string>;

// Split on Unicode whitespace, strip leading/trailing non-letters from each
// piece, drop pieces that are empty or still contain anything other than
// ASCII letters, lowercase, drop stopwords. Order is preserved.
std::vector<std::string> tokenize_normalize(std::string_view text, const StopwordSet& stopwords,
                                            RejectLog* rejected = nullptr);

class Vocabulary {
public:
    Vocabulary() = default;
    // words must be sorted and distinct; doc_freq aligned with words.
    Vocabulary(std::vector<std::string> words, std::vector<std::size_t> doc_freq, std::size_t num_docs);

    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }
    std::size_t num_docs() const { return num_docs_; }
    const std::string& word(std::size_t id) const { return words_.at(id); }
    std::size_t doc_freq(std::size_t id) const { return doc_freq_.at(id); }
    std::optional<std::size_t> id(std::string_view word) const;
    const std::vector<std::string>& words() const { return words_; }
    const std::vector<std::size_t>& doc_freqs() const { return doc_freq_; }

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

private:
    std::vector<std::string> words_;
    std::vector<std::size_t> doc_freq_;
    std::size_t num_docs_ = 0;
};

// Ids in ascending lexicographic word order; df counts a doc once per word.
Vocabulary build_vocabulary(std::span<const TokenizedDoc> docs);

// Keeps words with min_doc_count <= df <= floor(max_doc_fraction * D); ids are
// reassigned over the survivors. D is unchanged.
Vocabulary filter_vocabulary(const Vocabulary& vocab, std::size_t min_doc_count = 1,
                             double max_doc_fraction = 0.5);

struct BowDoc {
    std::size_t description_id = 0;
    std::vector<std::pair<std::size_t, std::size_t>> counts;  // (word_id, count), word_id ascending

    std::size_t total() const;
    friend bool operator==(const BowDoc&, const BowDoc&) = default;
};

// Out-of-vocabulary tokens are dropped.
BowDoc to_bow(std::span<const std::string> tokens, const Vocabulary& vocab, std::size_t description_id = 0);

nlohmann::json tokens_to_json(std::span<const TokenizedDoc> docs);
std::vector<TokenizedDoc> tokens_from_json(const nlohmann::json& j);
nlohmann::json vocabulary_to_json(const Vocabulary& vocab);
Vocabulary vocabulary_from_json(const nlohmann::json& j);
nlohmann::json corpus_to_json(std::span<const BowDoc> corpus);
std::vector<BowDoc> corpus_from_json(const nlohmann::json& j);

}  // namespace drmine::textprep
