#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "drmine/ingest.hpp"
#include "drmine/rules.hpp"
#include "drmine/textprep.hpp"

namespace drmine::report {

// description_id -> cluster id
using Assignments = std::map<std::size_t, std::size_t>;

// Number of cluster columns: highest assigned cluster id + 1.
std::size_t cluster_count(const Assignments& assignments);

struct ClusterWordHeatmap {
    std::vector<std::string> words;  // descending total frequency, ties lexicographic
    std::vector<std::vector<std::size_t>> counts;  // counts[word][cluster]
    std::size_t num_clusters = 0;

    // Up to n non-zero words of one cluster by count (ties keep heatmap row order).
    std::vector<std::string> top_words(std::size_t cluster, std::size_t n = 10) const;
};

// Token occurrences of the top_n most frequent words, split by the cluster of
// each description. With weights, a description counts occurrence_count
// times. Throws DataError when a document has no assignment.
ClusterWordHeatmap heatmap_counts(std::span<const textprep::TokenizedDoc> docs, const Assignments& assignments,
                                  std::size_t top_n = 30,
                                  const ingest::UniqueDescriptionTable* weights = nullptr);

struct ClusterFrequency {
    std::vector<std::size_t> counts;  // per cluster
    std::size_t total = 0;
};

// Each record inherits the cluster of its description. Throws DataError for a
// record whose description is not in the table or for an unassigned entry.
ClusterFrequency merge_back(std::span<const ingest::ReportRecord> records,
                            const ingest::UniqueDescriptionTable& table, const Assignments& assignments);

inline constexpr const char* kUncategorized = "uncategorized";

// Label per cluster: the first rule matching one of the cluster's top-10
// heatmap words, else "uncategorized".
std::vector<std::string> categorize_clusters(const ClusterWordHeatmap& heatmap, const CategoryRules& rules);

struct DrillMatch {
    std::size_t description_id = 0;
    std::size_t records = 0;
    std::vector<std::string> categories;  // sorted
};

struct DrillReport {
    std::size_t cluster_id = 0;
    std::vector<std::pair<std::string, std::size_t>> category_counts;  // rule order, zeros kept
    std::map<std::vector<std::string>, std::size_t> hybrid_counts;    // key: sorted category names
    std::size_t uncategorized = 0;
    std::size_t total = 0;  // records in the cluster
    std::vector<DrillMatch> matches;
};

// Categorizes every description of one cluster by matching its raw text,
// weighting by the number of records carrying it. Multiple matches go to a
// hybrid bucket (or, when hybrids are disabled, to the first matching rule).
DrillReport drill_down(std::size_t cluster_id, std::span<const ingest::ReportRecord> records,
                       const ingest::UniqueDescriptionTable& table, const Assignments& assignments,
                       const CategoryRules& rules);

std::string hybrid_label(const std::vector<std::string>& categories);

}  // namespace drmine::report
