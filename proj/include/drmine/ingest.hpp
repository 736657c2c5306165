#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace drmine::ingest {

enum class YesNo { Yes, No };
enum class Initiator { AVSystem, TestDriver, RemoteOperator, Passenger };
enum class Location { Interstate, Freeway, Highway, RuralRoad, Street, ParkingFacility };

// Original cell text of a value that did not parse.
struct Unparsed {
    std::string raw;
    friend bool operator==(const Unparsed&, const Unparsed&) = default;
};

template <typename T>
using Field = std::variant<T, Unparsed>;

struct SourceRef {
    std::string file;  // file name without directories
    std::size_t row = 0;  // 1-based data row, header excluded
    friend bool operator==(const SourceRef&, const SourceRef&) = default;
    friend auto operator<=>(const SourceRef&, const SourceRef&) = default;
};

// One disengagement report row.
struct ReportRecord {
    std::string manufacturer;
    std::string permit_number;
    Field<std::chrono::year_month_day> date;
    std::string vin;
    Field<YesNo> operates_driverless;
    Field<YesNo> driver_present;
    Field<Initiator> initiated_by;
    Field<Location> location;
    std::string description;
    SourceRef source;

    friend bool operator==(const ReportRecord&, const ReportRecord&) = default;
};

enum class SchemaMode { Strict, Lenient };

struct LoadIssue {
    std::string file;
    std::size_t row = 0;  // 0 for header-level issues
    std::string column;
    std::string message;
};

struct LoadResult {
    std::vector<ReportRecord> records;
    std::vector<LoadIssue> warnings;    // record kept, some field unparsed
    std::vector<LoadIssue> row_errors;  // row not turned into a record (lenient mode only)
    std::size_t data_rows = 0;
};

// The nine canonical column titles, in canonical order.
std::span<const std::string_view> canonical_columns();

// Throws DataError on a missing file, a header lacking a canonical column, or
// (strict mode) any unparseable enum / malformed row, naming file, row and
// column. Lenient mode keeps unknown enum values as Unparsed with a warning.
LoadResult load_reports(const std::filesystem::path& path, SchemaMode mode);
LoadResult parse_reports(std::string_view csv_text, std::string_view source_name, SchemaMode mode);

// Concatenation in batch order, then row order.
std::vector<ReportRecord> merge_datasets(std::vector<std::vector<ReportRecord>> batches);

std::optional<YesNo> parse_yes_no(std::string_view text);
std::optional<Initiator> parse_initiator(std::string_view text);
std::optional<Location> parse_location(std::string_view text);
// Accepts YYYY-MM-DD, MM/DD/YYYY and M/D/YY (two-digit years are 20YY).
std::optional<std::chrono::year_month_day> parse_date(std::string_view text);

std::string to_string(YesNo v);
std::string to_string(Initiator v);
std::string to_string(Location v);
std::string to_string(const std::chrono::year_month_day& d);  // ISO-8601

// Canonical columns plus source_file and source_row, so reloading the output
// keeps the original provenance.
std::string records_to_csv(std::span<const ReportRecord> records);

struct UniqueDescription {
    std::size_t description_id = 0;
    std::string text;
    std::size_t occurrence_count = 0;
    std::vector<SourceRef> source_rows;

    friend bool operator==(const UniqueDescription&, const UniqueDescription&) = default;
};

struct UniqueDescriptionTable {
    std::vector<UniqueDescription> entries;

    std::size_t total_occurrences() const;
    // description_id of the entry with this dedup key, if any.
    std::optional<std::size_t> find(std::string_view description) const;

    friend bool operator==(const UniqueDescriptionTable&, const UniqueDescriptionTable&) = default;
};

// Trimmed description; case and internal characters preserved.
std::string dedup_key(std::string_view description);

UniqueDescriptionTable extract_unique(std::span<const ReportRecord> records);

std::string unique_to_csv(const UniqueDescriptionTable& table);
nlohmann::json unique_to_json(const UniqueDescriptionTable& table);
UniqueDescriptionTable unique_from_csv(std::string_view csv_text);

}  // namespace drmine::ingest
