#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace drmine::report {

struct CategoryRule {
    std::string name;
    std::vector<std::string> patterns;  // lowercase substrings
};

struct CategoryRules {
    std::vector<CategoryRule> rules;
    bool hybrid_enabled = true;

    // Names of rules with at least one pattern occurring in text
    // (case-insensitive), in rule order.
    std::vector<std::string> match(std::string_view text) const;
};

// Rules file format:
//
//   # comment
//   hybrid: true
//
//   name: Perception Issues
//   patterns: perception, detection
//
// Every "name:" opens an entry; "patterns:" lines append comma-separated
// patterns to the open entry. Throws DataError on duplicate names, entries
// without patterns, or unknown keys.
CategoryRules parse_rules(std::string_view text);
CategoryRules load_rules(const std::filesystem::path& path);

const CategoryRules& default_cluster_rules();
const CategoryRules& default_drill_rules();

}  // namespace drmine::report
