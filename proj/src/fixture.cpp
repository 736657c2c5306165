#include "drmine/fixture.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "drmine/csv.hpp"
#include "drmine/error.hpp"
#include "drmine/ingest.hpp"
#include "drmine/random.hpp"

namespace drmine::fixture {
namespace {

struct Theme {
    const char* name;
    std::array<const char*, 4> core;
    std::array<const char*, 8> variable;
};

constexpr std::array<Theme, 4> kThemes = {{
    {"perception",
     {"perception", "detection", "pedestrian", "camera"},
     {"lidar", "obstacle", "misclassified", "occluded", "crosswalk", "cyclist", "glare", "tracking"}},
    {"prediction and motion planning",
     {"prediction", "motion", "plan", "trajectory"},
     {"incorrect", "yield", "merge", "maneuver", "undesired", "cut", "oncoming", "gap"}},
    {"system failure",
     {"software", "module", "failure", "hardware"},
     {"diagnostic", "fault", "restart", "latency", "compute", "error", "reboot", "watchdog"}},
    {"driver takeover",
     {"pedal", "accelerator", "velocity", "pressed"},
     {"increase", "reduce", "brake", "took", "steering", "wheel", "speed", "manual"}},
}};

constexpr std::array<const char*, 6> kConnectors = {"the", "a", "with the", "and", "due to", "of the"};
constexpr const char* kOpening = "Vehicle disengaged from autonomous mode.";

constexpr std::array<const char*, 5> kManufacturers = {
    "Alder Autonomy", "Birch Robotics", "Cedar Mobility", "Dogwood Drive", "Elm Automation"};
constexpr std::array<const char*, 4> kInitiators = {"AV System", "Test Driver", "Remote Operator", "Passenger"};
constexpr std::array<const char*, 6> kLocations = {"Interstate", "Freeway", "Highway",
                                                    "Rural Road", "Street", "Parking Facility"};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
}

std::string describe(const Theme& theme, Rng& rng) {
    std::vector<std::string> words(theme.core.begin(), theme.core.end());
    // Two core words appear twice, which keeps each theme's topic dominant.
    words.push_back(theme.core[rng.index(4)]);
    words.push_back(theme.core[rng.index(4)]);
    std::vector<std::string> pool(theme.variable.begin(), theme.variable.end());
    shuffle(pool, rng);
    words.insert(words.end(), pool.begin(), pool.begin() + 3);
    shuffle(words, rng);

    std::string text = kOpening;
    for (std::size_t i = 0; i < words.size(); i += 3) {
        std::string sentence = kConnectors[rng.index(kConnectors.size())];
        for (std::size_t j = i; j < std::min(i + 3, words.size()); ++j) sentence += " " + words[j];
        sentence[0] = static_cast<char>(sentence[0] - 'a' + 'A');
        text += " " + sentence + (i + 3 < words.size() && rng.uniform() < 0.3 ? "," : ".");
    }
    if (text.back() == ',') text.back() = '.';
    return text;
}

std::string random_vin(Rng& rng) {
    static constexpr char alphabet[] = "ABCDEFGHJKLMNPRSTUVWXYZ0123456789";
    std::string vin;
    for (int i = 0; i < 17; ++i) vin.push_back(alphabet[rng.index(sizeof(alphabet) - 1)]);
    return vin;
}

std::string random_date(Rng& rng, bool iso) {
    // December 2022 through November 2023.
    const int month_index = static_cast<int>(rng.index(12));
    const int year = month_index == 0 ? 2022 : 2023;
    const int month = month_index == 0 ? 12 : month_index;
    const int day = 1 + static_cast<int>(rng.index(28));
    char buf[16];
    if (iso) {
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    } else {
        std::snprintf(buf, sizeof(buf), "%d/%d/%d", month, day, year);
    }
    return buf;
}

}  // namespace

std::size_t Fixture::total_records() const {
    std::size_t total = 0;
    for (const auto c : theme_record_counts) total += c;
    return total;
}

std::size_t Fixture::theme_of(const std::string& text) const {
    const auto key = ingest::dedup_key(text);
    for (const auto& d : descriptions) {
        if (d.text == key) return d.theme;
    }
    throw DataError("fixture: unknown description '" + key + "'");
}

nlohmann::json Fixture::ground_truth() const {
    auto descs = nlohmann::json::array();
    for (const auto& d : descriptions) {
        descs.push_back({{"text", d.text}, {"theme", d.theme}, {"occurrences", d.occurrences}});
    }
    return {{"themes", theme_names},
            {"theme_record_counts", theme_record_counts},
            {"total_records", total_records()},
            {"descriptions", std::move(descs)}};
}

Fixture generate(const FixtureConfig& config) {
    const std::size_t num_themes = config.theme_records.size();
    if (num_themes == 0 || num_themes > kThemes.size()) throw DataError("fixture: between 1 and 4 themes");
    for (const auto n : config.theme_records) {
        if (n < config.descriptions_per_theme) throw DataError("fixture: each description needs a record");
    }

    Rng rng(config.seed);
    Fixture fx;
    std::set<std::string> seen;
    for (std::size_t t = 0; t < num_themes; ++t) {
        fx.theme_names.emplace_back(kThemes[t].name);
        fx.theme_record_counts.push_back(config.theme_records[t]);
        // Every description gets one record, the rest are spread at random.
        std::vector<std::size_t> counts(config.descriptions_per_theme, 1);
        for (std::size_t r = config.descriptions_per_theme; r < config.theme_records[t]; ++r) {
            ++counts[rng.index(counts.size())];
        }
        for (std::size_t d = 0; d < config.descriptions_per_theme; ++d) {
            std::string text;
            do {
                text = describe(kThemes[t], rng);
            } while (!seen.insert(text).second);
            fx.descriptions.push_back({std::move(text), t, counts[d]});
        }
    }

    struct Row {
        std::size_t description;
        std::size_t ordinal;
    };
    std::vector<Row> rows;
    for (std::size_t d = 0; d < fx.descriptions.size(); ++d) {
        for (std::size_t i = 0; i < fx.descriptions[d].occurrences; ++i) rows.push_back({d, i});
    }
    shuffle(rows, rng);

    // Three files, mimicking the three published report categories. Header
    // spellings differ between them the way vendor exports do.
    const std::size_t total = rows.size();
    const std::array<std::size_t, 3> sizes = {total * 7 / 12, total / 3, total - total * 7 / 12 - total / 3};
    const auto canonical = ingest::canonical_columns();
    std::size_t next = 0;
    for (std::size_t f = 0; f < sizes.size(); ++f) {
        std::ostringstream out;
        csv::Row header(canonical.begin(), canonical.end());
        if (f == 1) {
            out << "\xEF\xBB\xBF";
            for (auto& h : header) {
                std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::toupper(c); });
            }
        } else if (f == 2) {
            for (auto& h : header) {
                if (const auto paren = h.find(" ("); paren != std::string::npos) h.erase(paren);
            }
        }
        csv::write_row(out, header);
        const bool driverless = f == 2;
        for (std::size_t i = 0; i < sizes[f]; ++i, ++next) {
            const auto& row = rows[next];
            std::string description = fx.descriptions[row.description].text;
            if (row.ordinal % 5 == 4) description += "  ";  // stray trailing blanks, as in spreadsheets
            csv::write_row(out, {
                                    kManufacturers[rng.index(kManufacturers.size())],
                                    "AVT" + std::to_string(100 + rng.index(900)),
                                    random_date(rng, f == 0),
                                    random_vin(rng),
                                    driverless ? "Yes" : "No",
                                    driverless ? "No" : "Yes",
                                    driverless ? kInitiators[0] : kInitiators[rng.index(kInitiators.size())],
                                    kLocations[rng.index(kLocations.size())],
                                    description,
                                });
        }
        static constexpr std::array<const char*, 3> names = {
            "reports-driver-present.csv", "reports-first-time-filers.csv", "reports-driverless.csv"};
        fx.files.push_back({names[f], out.str()});
    }
    return fx;
}

std::vector<std::filesystem::path> write(const Fixture& fixture, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    for (const auto& f : fixture.files) {
        const auto path = dir / f.name;
        std::ofstream out(path, std::ios::binary);
        out << f.contents;
        if (!out) throw DataError("cannot write '" + path.string() + "'");
        paths.push_back(path);
    }
    std::ofstream gt(dir / "ground_truth.json", std::ios::binary);
    gt << fixture.ground_truth().dump(2) << '\n';
    return paths;
}

}  // namespace drmine::fixture
