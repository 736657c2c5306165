#include <doctest.h>

#include <map>
#include <random>

#include "drmine/error.hpp"
#include "drmine/textprep.hpp"

using namespace drmine;
using namespace drmine::textprep;

namespace {

std::vector<std::string> tok(std::string_view text) { return tokenize_normalize(text, default_stopwords()); }

std::vector<TokenizedDoc> docs_of(const std::vector<std::vector<std::string>>& tokens) {
    std::vector<TokenizedDoc> docs;
    for (const auto& t : tokens) docs.push_back({docs.size(), t});
    return docs;
}

Vocabulary vocab_with_df(std::size_t df, std::size_t num_docs) {
    return Vocabulary({"w"}, {df}, num_docs);
}

}  // namespace

TEST_CASE("reference preprocessing example") {
    const std::vector<std::string> expected{
        "safety", "driver", "disengaged", "autonomous", "mode",    "upon",       "judging", "vehicle",
        "close",  "boundary", "root",     "cause",      "object",  "lane",       "detection", "issue",
        "conditions", "weather", "dry",   "roads",      "factors", "involved"};
    CHECK(tok("Safety Driver disengaged autonomous mode upon judging that vehicle was too close to road/lane "
              "boundary. Root cause: object, lane detection or other issue. Conditions: Non-inclement weather, "
              "dry roads, no other factors involved.") == expected);
}

TEST_CASE("empty and all-stopword inputs") {
    CHECK(tok("").empty());
    CHECK(tok("The the THE is").empty());
    CHECK(tok(" \t\n ").empty());
}

TEST_CASE("edges are stripped, inner non-letters reject the piece") {
    CHECK(tok("(lidar), \"camera\"...") == std::vector<std::string>{"lidar", "camera"});
    CHECK(tok("3rd lane-change x2 e.g. l1dar 42") == std::vector<std::string>{"rd", "x"});
    RejectLog rejected;
    CHECK(tokenize_normalize("caf\xC3\xA9 radar", default_stopwords(), &rejected) ==
          std::vector<std::string>{"radar"});
    CHECK(rejected == RejectLog{"café"});
    // a no-break space separates words too
    CHECK(tok("brake\xC2\xA0pedal") == std::vector<std::string>{"brake", "pedal"});
}

TEST_CASE("default stopword list") {
    const auto& sw = default_stopwords();
    CHECK(sw.size() == 179);
    CHECK(sw.contains("the"));
    CHECK(sw.contains("wouldn't"));
    CHECK_FALSE(sw.contains("vehicle"));
    const auto custom = parse_stopwords("# comment\nFoo\n\n bar \n");
    CHECK(custom == StopwordSet{"foo", "bar"});
    CHECK(tokenize_normalize("foo baz BAR", custom) == std::vector<std::string>{"baz"});
}

TEST_CASE("tokens are always lowercase ASCII non-stopwords") {
    std::mt19937_64 gen(5);
    const std::vector<std::string> pieces{"The", "LIDAR", "a", "x-ray", "(b)", "--", "\xC3\xA9t\xC3\xA9", "ok.",
                                          "9", " ", "\t", "\n", "Was", "ran,", "it's"};
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        for (std::size_t n = gen() % 20; n > 0; --n) text += pieces[gen() % pieces.size()] + (gen() % 2 ? " " : "");
        for (const auto& t : tok(text)) {
            CHECK_FALSE(t.empty());
            CHECK_FALSE(default_stopwords().contains(t));
            for (char c : t) CHECK((c >= 'a' && c <= 'z'));
        }
    }
}

TEST_CASE("vocabulary ids and document frequencies") {
    const auto v = build_vocabulary(docs_of({{"b", "a"}, {"b"}}));
    REQUIRE(v.size() == 2);
    CHECK(v.id("a") == 0u);
    CHECK(v.id("b") == 1u);
    CHECK(v.doc_freq(0) == 1);
    CHECK(v.doc_freq(1) == 2);
    CHECK(v.num_docs() == 2);
    CHECK_FALSE(v.id("c").has_value());

    const auto empty = build_vocabulary(std::vector<TokenizedDoc>{});
    CHECK(empty.empty());
    CHECK(empty.num_docs() == 0);

    CHECK(build_vocabulary(docs_of({{"b", "b", "b"}})).doc_freq(0) == 1);
}

TEST_CASE("frequency filter boundaries") {
    CHECK(filter_vocabulary(vocab_with_df(6, 10), 1, 0.5).empty());
    CHECK(filter_vocabulary(vocab_with_df(5, 10), 1, 0.5).size() == 1);
    CHECK(filter_vocabulary(vocab_with_df(2, 4), 1, 0.5).size() == 1);
    CHECK(filter_vocabulary(vocab_with_df(1, 4), 2, 0.5).empty());
    CHECK(filter_vocabulary(vocab_with_df(1, 4), 1, 0.5).num_docs() == 4);

    const auto filtered = filter_vocabulary(build_vocabulary(docs_of({{"a", "z"}, {"b", "z"}, {"c"}})), 1, 0.5);
    CHECK(filtered.words() == std::vector<std::string>{"a", "b", "c"});
    CHECK(filtered.id("c") == 2u);
}

TEST_CASE("vocabulary constructor validates") {
    CHECK_THROWS(Vocabulary({"b", "a"}, {1, 1}, 2));
    CHECK_THROWS(Vocabulary({"a"}, {3}, 2));
    CHECK_THROWS(Vocabulary({"a"}, {}, 2));
}

TEST_CASE("bag of words") {
    const auto v = build_vocabulary(docs_of({{"a", "b"}}));
    const std::vector<std::string> aba{"a", "b", "a"};
    const auto bow = to_bow(aba, v, 7);
    CHECK(bow.description_id == 7);
    CHECK(bow.counts == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {1, 1}});
    CHECK(bow.total() == 3);
    const std::vector<std::string> z{"z"};
    CHECK(to_bow(z, v).counts.empty());
    CHECK(to_bow(std::vector<std::string>{}, v).counts.empty());
}

TEST_CASE("bag of words matches a direct count") {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<std::string>> tokens(1 + gen() % 8);
        for (auto& t : tokens) {
            for (std::size_t n = gen() % 12; n > 0; --n) t.push_back(std::string(1, static_cast<char>('a' + gen() % 10)));
        }
        const auto docs = docs_of(tokens);
        const auto v = filter_vocabulary(build_vocabulary(docs));
        CHECK(v.size() <= build_vocabulary(docs).size());
        for (const auto& d : docs) {
            std::map<std::string, std::size_t> direct;
            for (const auto& t : d.tokens) {
                if (v.id(t)) direct[t]++;
            }
            const auto bow = to_bow(d.tokens, v, d.description_id);
            std::map<std::string, std::size_t> got;
            for (const auto& [id, count] : bow.counts) got[v.word(id)] = count;
            CHECK(got == direct);
        }
        CHECK(vocabulary_from_json(vocabulary_to_json(v)) == v);
        CHECK(tokens_from_json(tokens_to_json(docs)) == docs);
    }
}
