#include "drmine/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "drmine/csv.hpp"
#include "drmine/error.hpp"

namespace drmine::ingest {
namespace {

constexpr std::array<std::string_view, 9> kCanonicalColumns = {
    "Manufacturer",
    "Permit Number",
    "DATE",
    "VIN NUMBER",
    "VEHICLE IS CAPABLE OF OPERATING WITHOUT A DRIVER (Yes or No)",
    "DRIVER PRESENT (Yes or No)",
    "DISENGAGEMENT INITIATED BY (AV System, Test Driver, Remote Operator, or Passenger)",
    "DISENGAGEMENT LOCATION (Interstate, Freeway, Highway, Rural Road, Street, or Parking Facility)",
    "DESCRIPTION OF FACTS CAUSING DISENGAGEMENT",
};

// Normalized header prefixes identifying each canonical column. Vendor exports
// sometimes drop the parenthesised hints, so only the leading words are used.
constexpr std::array<std::string_view, 9> kColumnStems = {
    "manufacturer",
    "permitnumber",
    "date",
    "vin",
    "vehicleiscapable",
    "driverpresent",
    "disengagementinitiatedby",
    "disengagementlocation",
    "descriptionoffacts",
};

enum Column : std::size_t {
    kManufacturer, kPermit, kDate, kVin, kDriverless, kDriverPresent, kInitiatedBy, kLocation, kDescription
};

std::string normalize_header(std::string_view name) {
    std::string out;
    for (const unsigned char c : name) {
        if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

// Lowercase, trimmed, internal whitespace runs collapsed to one space.
std::string normalize_value(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (const unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string_view trim_view(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::optional<int> parse_number(std::string_view s, std::size_t min_digits, std::size_t max_digits) {
    if (s.size() < min_digits || s.size() > max_digits) return std::nullopt;
    int value = 0;
    const auto result = std::from_chars(s.data(), s.data() + s.size(), value);
    if (result.ec != std::errc{} || result.ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string base_name(std::string_view path) {
    return std::filesystem::path(std::string(path)).filename().string();
}

template <typename T>
std::string field_text(const Field<T>& field) {
    if (const auto* raw = std::get_if<Unparsed>(&field)) return raw->raw;
    return to_string(std::get<T>(field));
}

}  // namespace

std::span<const std::string_view> canonical_columns() { return kCanonicalColumns; }

std::optional<YesNo> parse_yes_no(std::string_view text) {
    const auto v = normalize_value(text);
    if (v == "yes") return YesNo::Yes;
    if (v == "no") return YesNo::No;
    return std::nullopt;
}

std::optional<Initiator> parse_initiator(std::string_view text) {
    const auto v = normalize_value(text);
    if (v == "av system") return Initiator::AVSystem;
    if (v == "test driver") return Initiator::TestDriver;
    if (v == "remote operator") return Initiator::RemoteOperator;
    if (v == "passenger") return Initiator::Passenger;
    return std::nullopt;
}

std::optional<Location> parse_location(std::string_view text) {
    const auto v = normalize_value(text);
    if (v == "interstate") return Location::Interstate;
    if (v == "freeway") return Location::Freeway;
    if (v == "highway") return Location::Highway;
    if (v == "rural road") return Location::RuralRoad;
    if (v == "street") return Location::Street;
    if (v == "parking facility") return Location::ParkingFacility;
    return std::nullopt;
}

std::optional<std::chrono::year_month_day> parse_date(std::string_view text) {
    using namespace std::chrono;
    text = trim_view(text);
    std::optional<int> y, m, d;
    if (const auto parts = split(text, '-'); parts.size() == 3) {
        y = parse_number(parts[0], 4, 4);
        m = parse_number(parts[1], 1, 2);
        d = parse_number(parts[2], 1, 2);
    } else if (const auto slash = split(text, '/'); slash.size() == 3) {
        m = parse_number(slash[0], 1, 2);
        d = parse_number(slash[1], 1, 2);
        if (slash[2].size() == 4) {
            y = parse_number(slash[2], 4, 4);
        } else if (slash[2].size() == 2) {
            y = parse_number(slash[2], 2, 2);
            if (y) *y += 2000;
        }
    }
    if (!y || !m || !d) return std::nullopt;
    const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*m)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
}

std::string to_string(YesNo v) { return v == YesNo::Yes ? "Yes" : "No"; }

std::string to_string(Initiator v) {
    switch (v) {
        case Initiator::AVSystem: return "AV System";
        case Initiator::TestDriver: return "Test Driver";
        case Initiator::RemoteOperator: return "Remote Operator";
        case Initiator::Passenger: return "Passenger";
    }
    return {};
}

std::string to_string(Location v) {
    switch (v) {
        case Location::Interstate: return "Interstate";
        case Location::Freeway: return "Freeway";
        case Location::Highway: return "Highway";
        case Location::RuralRoad: return "Rural Road";
        case Location::Street: return "Street";
        case Location::ParkingFacility: return "Parking Facility";
    }
    return {};
}

std::string to_string(const std::chrono::year_month_day& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

LoadResult parse_reports(std::string_view csv_text, std::string_view source_name, SchemaMode mode) {
    const std::string file = base_name(source_name);
    const auto rows = csv::parse(csv_text);
    if (rows.empty()) throw DataError(file + ": missing header row");

    // Column positions of the nine canonical fields plus optional provenance.
    std::array<std::optional<std::size_t>, 9> positions;
    std::optional<std::size_t> source_file_col, source_row_col;
    const auto& header = rows.front();
    for (std::size_t col = 0; col < header.size(); ++col) {
        const auto norm = normalize_header(header[col]);
        if (norm.empty()) continue;
        if (norm == "sourcefile") {
            source_file_col = col;
            continue;
        }
        if (norm == "sourcerow") {
            source_row_col = col;
            continue;
        }
        for (std::size_t f = 0; f < kColumnStems.size(); ++f) {
            if (!norm.starts_with(kColumnStems[f])) continue;
            if (positions[f]) {
                throw DataError(file + ": header has more than one column matching '" +
                                std::string(kCanonicalColumns[f]) + "'");
            }
            positions[f] = col;
            break;
        }
    }
    for (std::size_t f = 0; f < positions.size(); ++f) {
        if (!positions[f]) {
            throw DataError(file + ": header lacks column '" + std::string(kCanonicalColumns[f]) + "'");
        }
    }
    std::size_t required_width = 0;
    for (const auto& p : positions) required_width = std::max(required_width, *p + 1);
    if (source_file_col) required_width = std::max(required_width, *source_file_col + 1);
    if (source_row_col) required_width = std::max(required_width, *source_row_col + 1);

    LoadResult result;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        // A bare newline between records is not a data row.
        if (row.size() == 1 && row.front().empty()) continue;
        const std::size_t row_index = ++result.data_rows;

        auto row_error = [&](std::string column, std::string message) {
            if (mode == SchemaMode::Strict) {
                throw DataError(file + ", row " + std::to_string(row_index) +
                                (column.empty() ? "" : ", column '" + column + "'") + ": " + message);
            }
            result.row_errors.push_back({file, row_index, std::move(column), std::move(message)});
        };

        if (std::all_of(row.begin(), row.end(), [](const std::string& s) { return trim_view(s).empty(); })) {
            row_error("", "empty row");
            continue;
        }
        if (row.size() < required_width) {
            row_error("", "expected at least " + std::to_string(required_width) + " fields, found " +
                              std::to_string(row.size()));
            continue;
        }

        auto cell = [&](Column c) -> const std::string& { return row[*positions[c]]; };
        bool failed = false;
        std::vector<LoadIssue> warnings;
        auto enum_field = [&]<typename T>(Column c, std::optional<T> parsed) -> Field<T> {
            if (parsed) return *parsed;
            const std::string column(kCanonicalColumns[c]);
            const std::string message = "unrecognized value '" + std::string(trim_view(cell(c))) + "'";
            if (mode == SchemaMode::Strict) {
                row_error(column, message);
                failed = true;
            }
            warnings.push_back({file, row_index, column, message});
            return Unparsed{cell(c)};
        };

        ReportRecord rec;
        rec.manufacturer = std::string(trim_view(cell(kManufacturer)));
        rec.permit_number = std::string(trim_view(cell(kPermit)));
        rec.vin = std::string(trim_view(cell(kVin)));
        rec.description = cell(kDescription);
        if (auto d = parse_date(cell(kDate))) {
            rec.date = *d;
        } else {
            warnings.push_back({file, row_index, std::string(kCanonicalColumns[kDate]),
                                "unparseable date '" + std::string(trim_view(cell(kDate))) + "'"});
            rec.date = Unparsed{cell(kDate)};
        }
        rec.operates_driverless = enum_field(kDriverless, parse_yes_no(cell(kDriverless)));
        rec.driver_present = enum_field(kDriverPresent, parse_yes_no(cell(kDriverPresent)));
        rec.initiated_by = enum_field(kInitiatedBy, parse_initiator(cell(kInitiatedBy)));
        rec.location = enum_field(kLocation, parse_location(cell(kLocation)));
        if (failed) continue;

        rec.source = {file, row_index};
        if (source_file_col && source_row_col && !row[*source_file_col].empty()) {
            rec.source.file = row[*source_file_col];
            try {
                rec.source.row = static_cast<std::size_t>(csv::parse_int(row[*source_row_col]));
            } catch (const DataError&) {
                row_error("source_row", "not an integer: '" + row[*source_row_col] + "'");
                continue;
            }
        }
        result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());
        result.records.push_back(std::move(rec));
    }
    return result;
}

LoadResult load_reports(const std::filesystem::path& path, SchemaMode mode) {
    std::ifstream probe(path);
    if (!probe) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << probe.rdbuf();
    return parse_reports(buffer.str(), path.string(), mode);
}

std::vector<ReportRecord> merge_datasets(std::vector<std::vector<ReportRecord>> batches) {
    std::vector<ReportRecord> merged;
    std::size_t total = 0;
    for (const auto& b : batches) total += b.size();
    merged.reserve(total);
    for (auto& b : batches) std::move(b.begin(), b.end(), std::back_inserter(merged));
    return merged;
}

std::string records_to_csv(std::span<const ReportRecord> records) {
    std::ostringstream out;
    csv::Row header(kCanonicalColumns.begin(), kCanonicalColumns.end());
    header.emplace_back("source_file");
    header.emplace_back("source_row");
    csv::write_row(out, header);
    for (const auto& r : records) {
        csv::write_row(out, {r.manufacturer, r.permit_number, field_text(r.date), r.vin,
                             field_text(r.operates_driverless), field_text(r.driver_present),
                             field_text(r.initiated_by), field_text(r.location), r.description,
                             r.source.file, std::to_string(r.source.row)});
    }
    return out.str();
}

std::string dedup_key(std::string_view description) { return std::string(trim_view(description)); }

std::size_t UniqueDescriptionTable::total_occurrences() const {
    std::size_t total = 0;
    for (const auto& e : entries) total += e.occurrence_count;
    return total;
}

std::optional<std::size_t> UniqueDescriptionTable::find(std::string_view description) const {
    const auto key = dedup_key(description);
    for (const auto& e : entries) {
        if (e.text == key) return e.description_id;
    }
    return std::nullopt;
}

UniqueDescriptionTable extract_unique(std::span<const ReportRecord> records) {
    UniqueDescriptionTable table;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& rec : records) {
        auto key = dedup_key(rec.description);
        auto [it, inserted] = index.try_emplace(key, table.entries.size());
        if (inserted) {
            table.entries.push_back({table.entries.size(), std::move(key), 0, {}});
        }
        auto& entry = table.entries[it->second];
        ++entry.occurrence_count;
        entry.source_rows.push_back(rec.source);
    }
    return table;
}

std::string unique_to_csv(const UniqueDescriptionTable& table) {
    std::ostringstream out;
    csv::write_row(out, {"description_id", "text", "occurrence_count", "source_rows"});
    for (const auto& e : table.entries) {
        std::string refs;
        for (const auto& s : e.source_rows) {
            if (!refs.empty()) refs.push_back(';');
            refs += s.file + ":" + std::to_string(s.row);
        }
        csv::write_row(out, {std::to_string(e.description_id), e.text, std::to_string(e.occurrence_count), refs});
    }
    return out.str();
}

nlohmann::json unique_to_json(const UniqueDescriptionTable& table) {
    auto entries = nlohmann::json::array();
    for (const auto& e : table.entries) {
        auto refs = nlohmann::json::array();
        for (const auto& s : e.source_rows) refs.push_back({{"file", s.file}, {"row", s.row}});
        entries.push_back({{"description_id", e.description_id},
                           {"text", e.text},
                           {"occurrence_count", e.occurrence_count},
                           {"source_rows", std::move(refs)}});
    }
    return entries;
}

UniqueDescriptionTable unique_from_csv(std::string_view csv_text) {
    const auto rows = csv::parse(csv_text);
    if (rows.empty() || rows.front() != csv::Row{"description_id", "text", "occurrence_count", "source_rows"}) {
        throw DataError("unique-description table: unexpected header");
    }
    UniqueDescriptionTable table;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != 4) throw DataError("unique-description table: malformed row " + std::to_string(r));
        UniqueDescription e;
        e.description_id = static_cast<std::size_t>(csv::parse_int(row[0]));
        if (e.description_id != table.entries.size()) {
            throw DataError("unique-description table: ids must be contiguous from 0");
        }
        e.text = row[1];
        e.occurrence_count = static_cast<std::size_t>(csv::parse_int(row[2]));
        if (!row[3].empty()) {
            for (const auto ref : split(row[3], ';')) {
                const auto colon = ref.rfind(':');
                if (colon == std::string_view::npos) throw DataError("unique-description table: bad source ref");
                e.source_rows.push_back({std::string(ref.substr(0, colon)),
                                         static_cast<std::size_t>(csv::parse_int(ref.substr(colon + 1)))});
            }
        }
        table.entries.push_back(std::move(e));
    }
    return table;
}

}  // namespace drmine::ingest
