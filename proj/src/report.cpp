#include "drmine/report.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "drmine/error.hpp"

namespace drmine::report {
namespace {

std::unordered_map<std::string, std::size_t> key_index(const ingest::UniqueDescriptionTable& table) {
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& e : table.entries) index.emplace(e.text, e.description_id);
    return index;
}

std::size_t cluster_of(const Assignments& assignments, std::size_t description_id) {
    const auto it = assignments.find(description_id);
    if (it == assignments.end()) {
        throw DataError("description " + std::to_string(description_id) + " has no cluster assignment");
    }
    return it->second;
}

}  // namespace

std::size_t cluster_count(const Assignments& assignments) {
    std::size_t k = 0;
    for (const auto& [id, c] : assignments) k = std::max(k, c + 1);
    return k;
}

std::vector<std::string> ClusterWordHeatmap::top_words(std::size_t cluster, std::size_t n) const {
    std::vector<std::size_t> order(words.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return counts[a][cluster] > counts[b][cluster]; });
    std::vector<std::string> top;
    for (const auto i : order) {
        if (top.size() == n || counts[i][cluster] == 0) break;
        top.push_back(words[i]);
    }
    return top;
}

ClusterWordHeatmap heatmap_counts(std::span<const textprep::TokenizedDoc> docs, const Assignments& assignments,
                                  std::size_t top_n, const ingest::UniqueDescriptionTable* weights) {
    ClusterWordHeatmap heatmap;
    heatmap.num_clusters = cluster_count(assignments);

    std::map<std::string, std::vector<std::size_t>> per_word;
    for (const auto& doc : docs) {
        const std::size_t c = cluster_of(assignments, doc.description_id);
        std::size_t w = 1;
        if (weights) {
            if (doc.description_id >= weights->entries.size()) {
                throw DataError("description " + std::to_string(doc.description_id) + " missing from weight table");
            }
            w = weights->entries[doc.description_id].occurrence_count;
        }
        for (const auto& token : doc.tokens) {
            auto& row = per_word[token];
            if (row.empty()) row.assign(heatmap.num_clusters, 0);
            row[c] += w;
        }
    }

    std::vector<std::pair<std::size_t, const std::string*>> totals;
    for (const auto& [word, row] : per_word) {
        totals.emplace_back(std::accumulate(row.begin(), row.end(), std::size_t{0}), &word);
    }
    // per_word iterates lexicographically, so a stable sort keeps ties in word order.
    std::stable_sort(totals.begin(), totals.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t n = std::min(top_n, totals.size());
    for (std::size_t i = 0; i < n; ++i) {
        heatmap.words.push_back(*totals[i].second);
        heatmap.counts.push_back(per_word[*totals[i].second]);
    }
    return heatmap;
}

ClusterFrequency merge_back(std::span<const ingest::ReportRecord> records,
                            const ingest::UniqueDescriptionTable& table, const Assignments& assignments) {
    const auto index = key_index(table);
    ClusterFrequency freq;
    freq.counts.assign(cluster_count(assignments), 0);
    for (const auto& rec : records) {
        const auto it = index.find(ingest::dedup_key(rec.description));
        if (it == index.end()) {
            throw DataError("record " + rec.source.file + ":" + std::to_string(rec.source.row) +
                            " has a description missing from the unique-description table");
        }
        ++freq.counts[cluster_of(assignments, it->second)];
        ++freq.total;
    }
    return freq;
}

std::vector<std::string> categorize_clusters(const ClusterWordHeatmap& heatmap, const CategoryRules& rules) {
    std::vector<std::string> labels(heatmap.num_clusters, kUncategorized);
    for (std::size_t c = 0; c < heatmap.num_clusters; ++c) {
        const auto top = heatmap.top_words(c, 10);
        for (const auto& rule : rules.rules) {
            const bool hit = std::any_of(top.begin(), top.end(), [&](const std::string& word) {
                return std::any_of(rule.patterns.begin(), rule.patterns.end(),
                                   [&](const std::string& p) { return word.find(p) != std::string::npos; });
            });
            if (hit) {
                labels[c] = rule.name;
                break;
            }
        }
    }
    return labels;
}

std::string hybrid_label(const std::vector<std::string>& categories) {
    std::string label;
    for (const auto& c : categories) {
        if (!label.empty()) label += " + ";
        label += c;
    }
    return label;
}

DrillReport drill_down(std::size_t cluster_id, std::span<const ingest::ReportRecord> records,
                       const ingest::UniqueDescriptionTable& table, const Assignments& assignments,
                       const CategoryRules& rules) {
    const bool exists = std::any_of(assignments.begin(), assignments.end(),
                                    [&](const auto& kv) { return kv.second == cluster_id; });
    if (!exists) {
        throw DataError("cluster " + std::to_string(cluster_id) + " does not exist (clusters are 0.." +
                        std::to_string(cluster_count(assignments) == 0 ? 0 : cluster_count(assignments) - 1) + ")");
    }

    const auto index = key_index(table);
    std::vector<std::size_t> record_counts(table.entries.size(), 0);
    for (const auto& rec : records) {
        const auto it = index.find(ingest::dedup_key(rec.description));
        if (it == index.end()) {
            throw DataError("record " + rec.source.file + ":" + std::to_string(rec.source.row) +
                            " has a description missing from the unique-description table");
        }
        ++record_counts[it->second];
    }

    DrillReport report;
    report.cluster_id = cluster_id;
    std::map<std::string, std::size_t> by_name;
    for (const auto& rule : rules.rules) by_name[rule.name] = 0;

    for (const auto& entry : table.entries) {
        if (cluster_of(assignments, entry.description_id) != cluster_id) continue;
        const std::size_t weight = record_counts[entry.description_id];
        report.total += weight;
        auto matched = rules.match(entry.text);
        if (matched.empty()) {
            report.uncategorized += weight;
        } else if (matched.size() == 1 || !rules.hybrid_enabled) {
            by_name[matched.front()] += weight;
        } else {
            std::sort(matched.begin(), matched.end());
            report.hybrid_counts[matched] += weight;
        }
        std::sort(matched.begin(), matched.end());
        report.matches.push_back({entry.description_id, weight, std::move(matched)});
    }
    for (const auto& rule : rules.rules) report.category_counts.emplace_back(rule.name, by_name[rule.name]);
    return report;
}

}  // namespace drmine::report
