#include "drmine/textprep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "drmine/error.hpp"
#include "drmine/resources.hpp"

namespace drmine::textprep {
namespace {

struct CodePoint {
    char32_t value;
    std::size_t length;
};

// Lenient UTF-8 decode; invalid bytes decode as U+FFFD, one byte each.
CodePoint decode(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return {b0, 1};
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {0xFFFD, 1};
    }
    if (pos + len > s.size()) return {0xFFFD, 1};
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len};
}

bool is_unicode_space(char32_t c) {
    switch (c) {
        case U' ': case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200A;
    }
}

bool is_ascii_letter(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }

// Letter test used only for stripping piece edges. Non-ASCII code points are
// letters unless they fall in the punctuation/symbol blocks that show up in
// vendor-exported text (curly quotes, dashes, NBSP-range symbols).
bool is_letter_like(char32_t c) {
    if (c < 0x80) return is_ascii_letter(c);
    if (c == 0xFFFD) return false;
    if (c <= 0xBF || c == 0xD7 || c == 0xF7) return false;
    if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, symbols, arrows, shapes
    if (c >= 0x3000 && c <= 0x303F) return false;
    if (c >= 0xFE30 && c <= 0xFE4F) return false;
    if (c >= 0xFF00 && c <= 0xFF20) return false;
    if (c >= 0x1F000) return false;  // emoji and pictographs
    return true;
}

void process_piece(std::string_view piece, const StopwordSet& stopwords, RejectLog* rejected,
                   std::vector<std::string>& out) {
    // Strip non-letter code points from both ends.
    std::vector<CodePoint> cps;
    std::vector<std::size_t> offsets;
    for (std::size_t pos = 0; pos < piece.size();) {
        const auto cp = decode(piece, pos);
        cps.push_back(cp);
        offsets.push_back(pos);
        pos += cp.length;
    }
    std::size_t first = 0;
    std::size_t last = cps.size();
    while (first < last && !is_letter_like(cps[first].value)) ++first;
    while (last > first && !is_letter_like(cps[last - 1].value)) --last;
    if (first == last) return;

    bool ascii_only = true;
    bool all_letters = true;
    for (std::size_t i = first; i < last; ++i) {
        if (cps[i].value >= 0x80) ascii_only = false;
        if (!is_ascii_letter(cps[i].value)) all_letters = false;
    }
    const auto begin = offsets[first];
    const auto end = offsets[last - 1] + cps[last - 1].length;
    if (!all_letters) {
        if (!ascii_only && rejected) rejected->insert(std::string(piece.substr(begin, end - begin)));
        return;
    }
    std::string word;
    word.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        const char c = piece[i];
        word.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
    if (stopwords.contains(word)) return;
    out.push_back(std::move(word));
}

}  // namespace

StopwordSet parse_stopwords(std::string_view text) {
    StopwordSet words;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        std::string word = line.substr(first, last - first + 1);
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        words.insert(std::move(word));
    }
    return words;
}

StopwordSet load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open stopword file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_stopwords(buffer.str());
}

const StopwordSet& default_stopwords() {
    static const StopwordSet words = parse_stopwords(resources::default_stopwords_text());
    return words;
}

std::vector<std::string> tokenize_normalize(std::string_view text, const StopwordSet& stopwords,
                                            RejectLog* rejected) {
    std::vector<std::string> tokens;
    std::size_t piece_start = 0;
    bool in_piece = false;
    for (std::size_t pos = 0; pos < text.size();) {
        const auto cp = decode(text, pos);
        if (is_unicode_space(cp.value)) {
            if (in_piece) process_piece(text.substr(piece_start, pos - piece_start), stopwords, rejected, tokens);
            in_piece = false;
        } else if (!in_piece) {
            in_piece = true;
            piece_start = pos;
        }
        pos += cp.length;
    }
    if (in_piece) process_piece(text.substr(piece_start), stopwords, rejected, tokens);
    return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::size_t> doc_freq, std::size_t num_docs)
    : words_(std::move(words)), doc_freq_(std::move(doc_freq)), num_docs_(num_docs) {
    if (words_.size() != doc_freq_.size()) throw DataError("vocabulary: words and frequencies differ in length");
    for (std::size_t i = 1; i < words_.size(); ++i) {
        if (!(words_[i - 1] < words_[i])) throw DataError("vocabulary: words must be sorted and distinct");
    }
    for (const auto df : doc_freq_) {
        if (df > num_docs_) throw DataError("vocabulary: document frequency exceeds the document count");
    }
}

std::optional<std::size_t> Vocabulary::id(std::string_view word) const {
    const auto it = std::lower_bound(words_.begin(), words_.end(), word);
    if (it == words_.end() || *it != word) return std::nullopt;
    return static_cast<std::size_t>(it - words_.begin());
}

Vocabulary build_vocabulary(std::span<const TokenizedDoc> docs) {
    std::map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        std::vector<std::string_view> distinct(doc.tokens.begin(), doc.tokens.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (const auto w : distinct) ++df[std::string(w)];
    }
    std::vector<std::string> words;
    std::vector<std::size_t> freqs;
    words.reserve(df.size());
    freqs.reserve(df.size());
    for (auto& [w, f] : df) {
        words.push_back(w);
        freqs.push_back(f);
    }
    return Vocabulary(std::move(words), std::move(freqs), docs.size());
}

Vocabulary filter_vocabulary(const Vocabulary& vocab, std::size_t min_doc_count, double max_doc_fraction) {
    if (!(max_doc_fraction >= 0.0 && max_doc_fraction <= 1.0)) {
        throw DataError("max_doc_fraction must lie in [0, 1]");
    }
    // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
    const auto max_df = static_cast<std::size_t>(
        std::floor(max_doc_fraction * static_cast<double>(vocab.num_docs()) + 1e-9));
    std::vector<std::string> words;
    std::vector<std::size_t> freqs;
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        const auto df = vocab.doc_freq(id);
        if (df >= min_doc_count && df <= max_df) {
            words.push_back(vocab.word(id));
            freqs.push_back(df);
        }
    }
    return Vocabulary(std::move(words), std::move(freqs), vocab.num_docs());
}

std::size_t BowDoc::total() const {
    std::size_t sum = 0;
    for (const auto& [id, c] : counts) sum += c;
    return sum;
}

BowDoc to_bow(std::span<const std::string> tokens, const Vocabulary& vocab, std::size_t description_id) {
    std::map<std::size_t, std::size_t> counts;
    for (const auto& t : tokens) {
        if (const auto id = vocab.id(t)) ++counts[*id];
    }
    BowDoc doc{description_id, {}};
    doc.counts.assign(counts.begin(), counts.end());
    return doc;
}

nlohmann::json tokens_to_json(std::span<const TokenizedDoc> docs) {
    auto out = nlohmann::json::array();
    for (const auto& d : docs) out.push_back({{"description_id", d.description_id}, {"tokens", d.tokens}});
    return out;
}

std::vector<TokenizedDoc> tokens_from_json(const nlohmann::json& j) {
    std::vector<TokenizedDoc> docs;
    for (const auto& d : j) {
        docs.push_back({d.at("description_id").get<std::size_t>(), d.at("tokens").get<std::vector<std::string>>()});
    }
    return docs;
}

nlohmann::json vocabulary_to_json(const Vocabulary& vocab) {
    auto words = nlohmann::json::array();
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        words.push_back({{"id", id}, {"word", vocab.word(id)}, {"doc_freq", vocab.doc_freq(id)}});
    }
    return {{"num_docs", vocab.num_docs()}, {"words", std::move(words)}};
}

Vocabulary vocabulary_from_json(const nlohmann::json& j) {
    std::vector<std::string> words;
    std::vector<std::size_t> freqs;
    for (const auto& w : j.at("words")) {
        if (w.at("id").get<std::size_t>() != words.size()) throw DataError("vocabulary: ids must be contiguous");
        words.push_back(w.at("word").get<std::string>());
        freqs.push_back(w.at("doc_freq").get<std::size_t>());
    }
    return Vocabulary(std::move(words), std::move(freqs), j.at("num_docs").get<std::size_t>());
}

nlohmann::json corpus_to_json(std::span<const BowDoc> corpus) {
    auto out = nlohmann::json::array();
    for (const auto& d : corpus) {
        auto counts = nlohmann::json::array();
        for (const auto& [id, c] : d.counts) counts.push_back({id, c});
        out.push_back({{"description_id", d.description_id}, {"counts", std::move(counts)}});
    }
    return out;
}

std::vector<BowDoc> corpus_from_json(const nlohmann::json& j) {
    std::vector<BowDoc> corpus;
    for (const auto& d : j) {
        BowDoc doc{d.at("description_id").get<std::size_t>(), {}};
        for (const auto& pair : d.at("counts")) {
            doc.counts.emplace_back(pair.at(0).get<std::size_t>(), pair.at(1).get<std::size_t>());
        }
        corpus.push_back(std::move(doc));
    }
    return corpus;
}

}  // namespace drmine::textprep
