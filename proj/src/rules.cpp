#include "drmine/rules.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "drmine/error.hpp"
#include "drmine/resources.hpp"

namespace drmine::report {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

std::vector<std::string> CategoryRules::match(std::string_view text) const {
    const std::string haystack = lower(std::string(text));
    std::vector<std::string> matched;
    for (const auto& rule : rules) {
        const bool hit = std::any_of(rule.patterns.begin(), rule.patterns.end(), [&](const std::string& p) {
            return haystack.find(p) != std::string::npos;
        });
        if (hit) matched.push_back(rule.name);
    }
    return matched;
}

CategoryRules parse_rules(std::string_view text) {
    CategoryRules out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& message) {
        throw DataError("rules, line " + std::to_string(line_no) + ": " + message);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string content = trim(line);
        if (content.empty()) continue;
        const auto colon = content.find(':');
        if (colon == std::string::npos) fail("expected 'key: value'");
        const std::string key = lower(trim(std::string_view(content).substr(0, colon)));
        const std::string value = trim(std::string_view(content).substr(colon + 1));
        if (key == "name") {
            if (value.empty()) fail("empty category name");
            out.rules.push_back({value, {}});
        } else if (key == "patterns") {
            if (out.rules.empty()) fail("'patterns' before any 'name'");
            std::size_t start = 0;
            while (start <= value.size()) {
                auto comma = value.find(',', start);
                if (comma == std::string::npos) comma = value.size();
                const std::string pattern = lower(trim(std::string_view(value).substr(start, comma - start)));
                if (pattern.empty()) fail("empty pattern");
                out.rules.back().patterns.push_back(pattern);
                start = comma + 1;
            }
        } else if (key == "hybrid") {
            const std::string v = lower(value);
            if (v == "true" || v == "yes") {
                out.hybrid_enabled = true;
            } else if (v == "false" || v == "no") {
                out.hybrid_enabled = false;
            } else {
                fail("hybrid must be true or false");
            }
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    std::set<std::string> names;
    for (const auto& rule : out.rules) {
        if (rule.patterns.empty()) throw DataError("rules: category '" + rule.name + "' has no patterns");
        if (!names.insert(rule.name).second) throw DataError("rules: duplicate category '" + rule.name + "'");
    }
    return out;
}

CategoryRules load_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open rules file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_rules(buffer.str());
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

const CategoryRules& default_cluster_rules() {
    static const CategoryRules rules = parse_rules(resources::default_cluster_rules_text());
    return rules;
}

const CategoryRules& default_drill_rules() {
    static const CategoryRules rules = parse_rules(resources::default_drill_rules_text());
    return rules;
}

}  // namespace drmine::report
