#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

// Synthetic disengagement-report corpus with planted themes. Each theme owns
// a vocabulary no other theme uses; every description shares a fixed opening
// sentence whose words are too common to survive frequency filtering.
namespace drmine::fixture {

struct FixtureConfig {
    std::size_t descriptions_per_theme = 10;
    // Records per theme; the number of themes is the size of this list (at most 4).
    std::vector<std::size_t> theme_records = {240, 180, 120, 60};
    std::uint64_t seed = 42;
};

struct PlantedDescription {
    std::string text;  // trimmed; the dedup key
    std::size_t theme = 0;
    std::size_t occurrences = 0;
};

struct CsvFile {
    std::string name;
    std::string contents;
};

struct Fixture {
    std::vector<CsvFile> files;  // three report files, as the regulator publishes them
    std::vector<PlantedDescription> descriptions;
    std::vector<std::string> theme_names;
    std::vector<std::size_t> theme_record_counts;

    std::size_t total_records() const;
    // Ground truth for a description text (trimmed match); throws if unknown.
    std::size_t theme_of(const std::string& text) const;
    nlohmann::json ground_truth() const;
};

Fixture generate(const FixtureConfig& config = {});

// Writes the report CSVs and ground_truth.json into dir; returns the CSV paths.
std::vector<std::filesystem::path> write(const Fixture& fixture, const std::filesystem::path& dir);

}  // namespace drmine::fixture
