#pragma once

// Processor and revenue tables. Both are UTF-8 CSV with a header row;
// numbers use '.' as the decimal separator regardless of locale.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chipcarbon {

enum class ProcessorKind { cpu, gpu };
enum class MarketSegment { desktop, datacenter };

std::string_view to_string(ProcessorKind kind);
std::string_view to_string(MarketSegment segment);

struct ProcessorRecord {
    std::string name;
    std::string vendor;
    ProcessorKind kind = ProcessorKind::cpu;
    MarketSegment segment = MarketSegment::desktop;
    int release_year = 2000;
    double node_nm = 0.0;
    double die_area_mm2 = 0.0;  // total silicon across all chiplets
    std::optional<double> transistor_millions;
    double tdp_w = 0.0;
    int chiplet_count = 1;
    std::optional<double> price_usd;
    std::optional<double> perf_opencl;
    std::optional<double> perf_passmark;
    std::optional<double> perf_peak_tflops;

    friend bool operator==(const ProcessorRecord&, const ProcessorRecord&) = default;
};

struct RevenueRecord {
    int year = 0;
    double revenue_usd = 0.0;
    std::string flagship_name;
    double unit_price_usd = 0.0;

    friend bool operator==(const RevenueRecord&, const RevenueRecord&) = default;
};

/// A rejected row. `row` is the 1-based line number in the input (the
/// header is line 1).
struct RowDiagnostic {
    std::size_t row = 0;
    std::string field;
    std::string message;
};

template <typename Record>
struct ParseResult {
    std::vector<Record> records;
    std::vector<RowDiagnostic> diagnostics;
};

inline constexpr std::string_view kProcessorColumns[] = {
    "name",          "vendor",        "kind",        "segment",    "release_year",
    "node_nm",       "die_area_mm2",  "transistor_millions",       "tdp_w",
    "chiplet_count", "price_usd",     "perf_opencl", "perf_passmark", "perf_peak_tflops",
};

inline constexpr std::string_view kRevenueColumns[] = {
    "year", "revenue_usd", "flagship_name", "unit_price_usd",
};

/// Rows that violate a record invariant are dropped with a diagnostic.
/// Throws InputError if required columns are missing or unknown columns
/// are present.
ParseResult<ProcessorRecord> parse_processors(std::string_view csv);
std::string write_processors(const std::vector<ProcessorRecord>& records);

ParseResult<RevenueRecord> parse_revenue(std::string_view csv);
std::string write_revenue(const std::vector<RevenueRecord>& records);

/// Splits CSV text into rows of fields (RFC 4180 quoting). Blank lines are
/// skipped; each row keeps its 1-based line number.
struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> fields;
};
std::vector<CsvRow> split_csv(std::string_view text);

/// Quotes a field if it contains a delimiter, quote or newline.
std::string csv_escape(std::string_view field);

/// Shortest representation that parses back to the same double.
std::string format_number(double value);

/// Strict, locale-independent number parsing; nullopt on any junk.
std::optional<double> parse_number(std::string_view text);

std::string read_text_file(const std::string& path);

/// Name with the smallest edit distance to `name`, or "" if `names` is empty.
std::string closest_name(std::string_view name, const std::vector<std::string>& names);

const ProcessorRecord& find_processor(const std::vector<ProcessorRecord>& records,
                                      std::string_view name);

}  // namespace chipcarbon
