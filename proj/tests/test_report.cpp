#include <doctest.h>

#include "criteria.hpp"
#include "drmine/error.hpp"
#include "drmine/report.hpp"
#include "drmine/rules.hpp"

using namespace drmine;
using namespace drmine::report;

namespace {

std::vector<textprep::TokenizedDoc> docs_of(const std::vector<std::vector<std::string>>& tokens) {
    std::vector<textprep::TokenizedDoc> docs;
    for (const auto& t : tokens) docs.push_back({docs.size(), t});
    return docs;
}

// Reference word counts per cluster (30 words, 8 clusters).
ClusterWordHeatmap reference_heatmap() {
    const std::vector<std::pair<std::string, std::vector<std::size_t>>> rows{
        {"vehicle", {12, 112, 11, 9, 16, 31, 10, 40}},
        {"driver", {30, 97, 12, 2, 3, 40, 15, 28}},
        {"took", {0, 85, 10, 0, 0, 5, 3, 25}},
        {"velocity", {0, 76, 2, 0, 0, 0, 0, 25}},
        {"pedal", {0, 76, 0, 0, 0, 0, 0, 25}},
        {"pressed", {0, 76, 0, 0, 0, 0, 0, 25}},
        {"increase", {0, 41, 0, 0, 0, 0, 0, 24}},
        {"accelerator", {0, 41, 0, 0, 0, 0, 0, 24}},
        {"reduce", {1, 35, 0, 0, 0, 0, 0, 1}},
        {"brake", {0, 35, 0, 0, 0, 0, 0, 1}},
        {"safety", {31, 0, 0, 0, 3, 22, 19, 0}},
        {"disengaged", {31, 11, 1, 2, 6, 18, 6, 1}},
        {"system", {3, 0, 18, 31, 3, 10, 1, 0}},
        {"issue", {28, 0, 1, 0, 3, 4, 0, 0}},
        {"due", {25, 22, 5, 2, 6, 18, 8, 7}},
        {"braking", {6, 25, 2, 0, 1, 10, 0, 4}},
        {"module", {1, 0, 0, 25, 5, 2, 0, 0}},
        {"planning", {3, 1, 0, 5, 24, 9, 1, 1}},
        {"software", {1, 0, 3, 24, 4, 0, 0, 0}},
        {"lane", {10, 22, 9, 14, 5, 5, 4, 23}},
        {"av", {2, 0, 19, 9, 2, 23, 2, 0}},
        {"turn", {3, 22, 0, 1, 1, 1, 0, 0}},
        {"weather", {21, 0, 0, 21, 2, 0, 5, 0}},
        {"failure", {0, 7, 0, 21, 1, 0, 0, 1}},
        {"perception", {9, 0, 3, 19, 4, 9, 0, 0}},
        {"change", {4, 6, 0, 2, 2, 1, 0, 19}},
        {"control", {1, 0, 13, 0, 0, 19, 0, 0}},
        {"logic", {0, 0, 0, 0, 19, 3, 0, 0}},
        {"left", {0, 18, 0, 1, 1, 2, 0, 0}},
        {"test", {11, 0, 17, 5, 0, 2, 1, 0}},
    };
    ClusterWordHeatmap h;
    h.num_clusters = 8;
    for (const auto& [word, counts] : rows) {
        h.words.push_back(word);
        h.counts.push_back(counts);
    }
    return h;
}

}  // namespace

TEST_CASE("heatmap over a single cluster") {
    const auto h = heatmap_counts(docs_of({{"a", "a", "b"}, {"b"}}), {{0, 0}, {1, 0}});
    CHECK(h.words == std::vector<std::string>{"a", "b"});
    CHECK(h.counts == std::vector<std::vector<std::size_t>>{{2}, {2}});
    CHECK(h.num_clusters == 1);
}

TEST_CASE("heatmap rows, limits and column sums") {
    const auto docs = docs_of({{"x", "y", "y", "z"}, {"y", "w"}, {"x", "x"}});
    const Assignments a{{0, 1}, {1, 0}, {2, 1}};
    const auto all = heatmap_counts(docs, a, 100);
    CHECK(all.words == std::vector<std::string>{"x", "y", "w", "z"});
    CHECK(all.counts[0] == std::vector<std::size_t>{0, 3});
    CHECK(all.counts[1] == std::vector<std::size_t>{1, 2});
    std::vector<std::size_t> column(2, 0);
    for (const auto& row : all.counts) {
        for (std::size_t c = 0; c < 2; ++c) column[c] += row[c];
    }
    CHECK(column == std::vector<std::size_t>{2, 6});

    const auto top = heatmap_counts(docs, a, 2);
    CHECK(top.words == std::vector<std::string>{"x", "y"});
    CHECK(top.top_words(0) == std::vector<std::string>{"y"});

    CHECK_THROWS_AS(heatmap_counts(docs, {{0, 0}}, 5), DataError);
}

TEST_CASE("weighted heatmap multiplies by occurrences") {
    std::vector<ingest::ReportRecord> records;
    for (const char* d : {"one", "one", "one", "two"}) records.push_back(criteria::record_with(d));
    const auto table = ingest::extract_unique(records);
    const auto docs = docs_of({{"p", "q"}, {"q"}});
    const auto h = heatmap_counts(docs, {{0, 0}, {1, 0}}, 30, &table);
    CHECK(h.words == std::vector<std::string>{"q", "p"});
    CHECK(h.counts == std::vector<std::vector<std::size_t>>{{4}, {3}});
}

TEST_CASE("merge-back") {
    std::vector<ingest::ReportRecord> records(9, criteria::record_with("same text"));
    const auto table = ingest::extract_unique(records);
    const auto f = merge_back(records, table, {{0, 3}});
    CHECK(f.counts == std::vector<std::size_t>{0, 0, 0, 9});
    CHECK(f.total == 9);

    const std::vector<ingest::ReportRecord> stranger{criteria::record_with("unknown")};
    CHECK_THROWS_AS(merge_back(stranger, table, {{0, 3}}), DataError);
}

TEST_CASE("merge-back and drill-down conserve records") {
    CHECK(criteria::conservation_failures(1000) == 0);
}

TEST_CASE("categorization rules") {
    const auto h = heatmap_counts(docs_of({{"braking", "late"}, {"map", "stale"}}), {{0, 0}, {1, 1}});
    CHECK(categorize_clusters(h, {}) == std::vector<std::string>{kUncategorized, kUncategorized});

    const auto one = parse_rules("name: Perception and Timing Failures\npatterns: perception, braking\n");
    CHECK(categorize_clusters(h, one) == std::vector<std::string>{"Perception and Timing Failures", kUncategorized});

    const auto two = parse_rules("name: First\npatterns: late\n\nname: Second\npatterns: braking, stale\n");
    CHECK(categorize_clusters(h, two) == std::vector<std::string>{"First", "Second"});
    CHECK(categorize_clusters(h, two) == categorize_clusters(h, two));
}

TEST_CASE("bundled cluster rules name the reference clusters") {
    const std::vector<std::string> expected{
        "Perception and Timing Failures",  "Complex Navigation Difficulties",
        "Sensor and Tracking Malfunctions", "Adverse Condition System Failures",
        "Multifactorial Incident Spectrum", "Safety Protocol Deviations",
        "Varied Navigation and Control Issues", "Specific Navigation Challenges"};
    CHECK(categorize_clusters(reference_heatmap(), default_cluster_rules()) == expected);
}

TEST_CASE("rules file parsing") {
    const auto r = parse_rules("# c\nhybrid: false\n\nname: A\npatterns: Foo, bar baz\npatterns: qux\n");
    REQUIRE(r.rules.size() == 1);
    CHECK_FALSE(r.hybrid_enabled);
    CHECK(r.rules[0].patterns == std::vector<std::string>{"foo", "bar baz", "qux"});
    CHECK(r.match("A BAR BAZ thing") == std::vector<std::string>{"A"});
    CHECK(r.match("nothing").empty());

    CHECK_THROWS_AS(parse_rules("name: A\n"), DataError);
    CHECK_THROWS_AS(parse_rules("name: A\npatterns: x\nname: A\npatterns: y\n"), DataError);
    CHECK_THROWS_AS(parse_rules("colour: red\n"), DataError);
    CHECK_THROWS_AS(parse_rules("patterns: x\n"), DataError);
    CHECK(parse_rules("").rules.empty());
    CHECK(default_drill_rules().rules.size() == 10);
    CHECK(default_cluster_rules().rules.size() == 8);
}

TEST_CASE("drill-down hybrids") {
    std::vector<ingest::ReportRecord> records;
    for (int i = 0; i < 5; ++i) records.push_back(criteria::record_with("Wrong prediction fed the motion plan."));
    records.push_back(criteria::record_with("Lidar perception dropout."));
    records.push_back(criteria::record_with("Driver preference."));
    records.push_back(criteria::record_with("Other cluster."));
    const auto table = ingest::extract_unique(records);
    const Assignments a{{0, 0}, {1, 0}, {2, 0}, {3, 1}};

    const auto d = drill_down(0, records, table, a, default_drill_rules());
    CHECK(d.total == 7);
    CHECK(d.uncategorized == 1);
    const std::vector<std::string> combo{"Incorrect Predictions", "Motion Planning and Control Issues"};
    REQUIRE(d.hybrid_counts.count(combo) == 1);
    CHECK(d.hybrid_counts.at(combo) == 5);
    CHECK(hybrid_label(combo) == "Incorrect Predictions + Motion Planning and Control Issues");
    std::size_t perception = 0;
    for (const auto& [name, n] : d.category_counts) {
        if (name == "Perception Issues") perception = n;
    }
    CHECK(perception == 1);
    CHECK(d.category_counts.size() == 10);

    const auto none = drill_down(0, records, table, a, {});
    CHECK(none.uncategorized == 7);
    CHECK(none.total == 7);

    try {
        drill_down(99, records, table, a, default_drill_rules());
        FAIL("expected an error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("cluster 99") != std::string::npos);
    }
}

TEST_CASE("first match wins when hybrids are off") {
    std::vector<ingest::ReportRecord> records{criteria::record_with("prediction and motion plan")};
    const auto table = ingest::extract_unique(records);
    auto rules = default_drill_rules();
    rules.hybrid_enabled = false;
    const auto d = drill_down(0, records, table, {{0, 0}}, rules);
    CHECK(d.hybrid_counts.empty());
    CHECK(d.category_counts[1] == std::pair<std::string, std::size_t>{"Motion Planning and Control Issues", 1});
}
