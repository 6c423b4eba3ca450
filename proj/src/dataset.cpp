#include "chipcarbon/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chipcarbon/errors.hpp"

namespace chipcarbon {

std::string_view to_string(ProcessorKind kind) {
    return kind == ProcessorKind::cpu ? "cpu" : "gpu";
}

std::string_view to_string(MarketSegment segment) {
    return segment == MarketSegment::desktop ? "desktop" : "datacenter";
}

std::vector<CsvRow> split_csv(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool in_quotes = false;
    bool row_has_content = false;
    std::size_t line = 1;
    row.line = line;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        if (row_has_content) rows.push_back(std::move(row));
        row = CsvRow{};
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                row_has_content = true;
                break;
            case ',':
                end_field();
                row_has_content = true;
                break;
            case '\r':
                break;
            case '\n':
                end_row();
                row.line = ++line;
                break;
            default:
                field.push_back(c);
                row_has_content = true;
        }
    }
    if (in_quotes) throw InputError("unterminated quoted field starting near line " + std::to_string(row.line));
    end_row();
    return rows;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::optional<long long> parse_integer(std::string_view text) {
    text = trim(text);
    long long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

}  // namespace

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string closest_name(std::string_view name, const std::vector<std::string>& names) {
    auto lower = [](std::string_view s) {
        std::string out(s);
        for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    };
    const std::string a = lower(name);
    std::string best;
    std::size_t best_dist = static_cast<std::size_t>(-1);
    std::vector<std::size_t> prev, cur;
    for (const auto& candidate : names) {
        const std::string b = lower(candidate);
        prev.resize(b.size() + 1);
        cur.resize(b.size() + 1);
        for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            cur[0] = i;
            for (std::size_t j = 1; j <= b.size(); ++j) {
                const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
                cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
            }
            std::swap(prev, cur);
        }
        if (prev[b.size()] < best_dist) {
            best_dist = prev[b.size()];
            best = candidate;
        }
    }
    return best;
}

const ProcessorRecord& find_processor(const std::vector<ProcessorRecord>& records,
                                      std::string_view name) {
    for (const auto& r : records)
        if (r.name == name) return r;
    std::vector<std::string> names;
    names.reserve(records.size());
    for (const auto& r : records) names.push_back(r.name);
    std::string suggestion = closest_name(name, names);
    std::string msg = "unknown processor '" + std::string(name) + "'";
    if (!suggestion.empty()) msg += "; did you mean '" + suggestion + "'?";
    throw NotFoundError(msg, std::move(suggestion));
}

namespace {

// Maps header names to column positions, enforcing the schema.
template <std::size_t N>
std::map<std::string, std::size_t> index_header(const CsvRow& header,
                                                const std::string_view (&columns)[N],
                                                const std::set<std::string_view>& required,
                                                std::string_view table) {
    std::map<std::string, std::size_t> index;
    std::vector<std::string> unknown;
    for (std::size_t i = 0; i < header.fields.size(); ++i) {
        const std::string name(trim(header.fields[i]));
        if (std::find(std::begin(columns), std::end(columns), name) == std::end(columns)) {
            unknown.push_back(name);
            continue;
        }
        if (!index.emplace(name, i).second)
            throw InputError(std::string(table) + ": duplicate column '" + name + "'");
    }
    std::vector<std::string> missing;
    for (auto col : columns)
        if (required.contains(col) && !index.contains(std::string(col))) missing.emplace_back(col);

    auto join = [](const std::vector<std::string>& xs) {
        std::string s;
        for (const auto& x : xs) s += (s.empty() ? "" : ", ") + x;
        return s;
    };
    if (!missing.empty())
        throw InputError(std::string(table) + ": missing required columns: " + join(missing));
    if (!unknown.empty())
        throw InputError(std::string(table) + ": unknown columns: " + join(unknown));
    return index;
}

// Field accessor for one row; records the first violation it sees.
class RowReader {
public:
    RowReader(const CsvRow& row, const std::map<std::string, std::size_t>& index)
        : row_(row), index_(index) {}

    std::optional<RowDiagnostic> error;

    std::string_view raw(const std::string& col) const {
        auto it = index_.find(col);
        if (it == index_.end() || it->second >= row_.fields.size()) return {};
        return row_.fields[it->second];
    }

    std::string text(const std::string& col) {
        auto v = std::string(trim(raw(col)));
        if (v.empty()) fail(col, "required field is empty");
        return v;
    }

    std::optional<double> optional_number(const std::string& col, double min, bool strict_min) {
        const auto s = trim(raw(col));
        if (s.empty()) return std::nullopt;
        auto v = parse_number(s);
        if (!v) {
            fail(col, "not a number: '" + std::string(s) + "'");
            return std::nullopt;
        }
        if (strict_min ? !(*v > min) : !(*v >= min)) {
            fail(col, "value " + std::string(s) + (strict_min ? " must be > " : " must be >= ") + format_number(min));
            return std::nullopt;
        }
        return v;
    }

    double number(const std::string& col, double min, bool strict_min) {
        if (trim(raw(col)).empty()) {
            fail(col, "required field is empty");
            return 0.0;
        }
        return optional_number(col, min, strict_min).value_or(0.0);
    }

    long long integer(const std::string& col, long long min, long long max) {
        const auto s = trim(raw(col));
        auto v = parse_integer(s);
        if (!v) {
            fail(col, "not an integer: '" + std::string(s) + "'");
            return 0;
        }
        if (*v < min || *v > max) {
            fail(col, "value " + std::string(s) + " outside [" + std::to_string(min) + ", " +
                          std::to_string(max) + "]");
            return 0;
        }
        return *v;
    }

    void fail(const std::string& col, std::string message) {
        if (!error) error = RowDiagnostic{row_.line, col, std::move(message)};
    }

private:
    const CsvRow& row_;
    const std::map<std::string, std::size_t>& index_;
};

void check_field_count(RowReader& reader, const CsvRow& row, std::size_t expected) {
    if (row.fields.size() != expected)
        reader.fail("", "expected " + std::to_string(expected) + " fields, found " +
                            std::to_string(row.fields.size()));
}

}  // namespace

ParseResult<ProcessorRecord> parse_processors(std::string_view csv) {
    const auto rows = split_csv(csv);
    ParseResult<ProcessorRecord> result;
    if (rows.empty()) throw InputError("processors: missing header row");

    const std::set<std::string_view> required = {"name",    "vendor",       "kind",  "segment",
                                                 "release_year", "node_nm", "die_area_mm2",
                                                 "tdp_w",   "chiplet_count"};
    const auto index = index_header(rows.front(), kProcessorColumns, required, "processors");

    std::set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const CsvRow& row = rows[r];
        RowReader in(row, index);
        check_field_count(in, row, rows.front().fields.size());

        ProcessorRecord rec;
        rec.name = in.text("name");
        rec.vendor = in.text("vendor");
        const auto kind = in.text("kind");
        if (kind == "cpu") rec.kind = ProcessorKind::cpu;
        else if (kind == "gpu") rec.kind = ProcessorKind::gpu;
        else in.fail("kind", "expected 'cpu' or 'gpu', got '" + kind + "'");
        const auto segment = in.text("segment");
        if (segment == "desktop") rec.segment = MarketSegment::desktop;
        else if (segment == "datacenter") rec.segment = MarketSegment::datacenter;
        else in.fail("segment", "expected 'desktop' or 'datacenter', got '" + segment + "'");
        rec.release_year = static_cast<int>(in.integer("release_year", 1990, 2100));
        rec.node_nm = in.number("node_nm", 0.0, true);
        rec.die_area_mm2 = in.number("die_area_mm2", 0.0, true);
        rec.transistor_millions = in.optional_number("transistor_millions", 0.0, false);
        rec.tdp_w = in.number("tdp_w", 0.0, true);
        rec.chiplet_count = static_cast<int>(in.integer("chiplet_count", 1, 1 << 20));
        rec.price_usd = in.optional_number("price_usd", 0.0, false);
        rec.perf_opencl = in.optional_number("perf_opencl", 0.0, false);
        rec.perf_passmark = in.optional_number("perf_passmark", 0.0, false);
        rec.perf_peak_tflops = in.optional_number("perf_peak_tflops", 0.0, false);

        if (!in.error && !seen.insert(rec.name).second)
            in.fail("name", "duplicate processor name '" + rec.name + "'");
        if (in.error) {
            result.diagnostics.push_back(std::move(*in.error));
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

std::string write_processors(const std::vector<ProcessorRecord>& records) {
    std::string out;
    for (std::size_t i = 0; i < std::size(kProcessorColumns); ++i)
        out += (i ? "," : "") + std::string(kProcessorColumns[i]);
    out += '\n';
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const auto& r : records) {
        out += csv_escape(r.name) + ',' + csv_escape(r.vendor) + ',' + std::string(to_string(r.kind)) + ',' +
               std::string(to_string(r.segment)) + ',' + std::to_string(r.release_year) + ',' +
               format_number(r.node_nm) + ',' + format_number(r.die_area_mm2) + ',' +
               opt(r.transistor_millions) + ',' + format_number(r.tdp_w) + ',' +
               std::to_string(r.chiplet_count) + ',' + opt(r.price_usd) + ',' + opt(r.perf_opencl) + ',' +
               opt(r.perf_passmark) + ',' + opt(r.perf_peak_tflops) + '\n';
    }
    return out;
}

ParseResult<RevenueRecord> parse_revenue(std::string_view csv) {
    const auto rows = split_csv(csv);
    ParseResult<RevenueRecord> result;
    if (rows.empty()) throw InputError("revenue: missing header row");
    const std::set<std::string_view> required(std::begin(kRevenueColumns), std::end(kRevenueColumns));
    const auto index = index_header(rows.front(), kRevenueColumns, required, "revenue");

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const CsvRow& row = rows[r];
        RowReader in(row, index);
        check_field_count(in, row, rows.front().fields.size());
        RevenueRecord rec;
        rec.year = static_cast<int>(in.integer("year", 1990, 2100));
        rec.revenue_usd = in.number("revenue_usd", 0.0, false);
        rec.flagship_name = in.text("flagship_name");
        rec.unit_price_usd = in.number("unit_price_usd", 0.0, true);
        if (in.error) {
            result.diagnostics.push_back(std::move(*in.error));
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

std::string write_revenue(const std::vector<RevenueRecord>& records) {
    std::string out = "year,revenue_usd,flagship_name,unit_price_usd\n";
    for (const auto& r : records)
        out += std::to_string(r.year) + ',' + format_number(r.revenue_usd) + ',' + csv_escape(r.flagship_name) +
               ',' + format_number(r.unit_price_usd) + '\n';
    return out;
}

}  // namespace chipcarbon
