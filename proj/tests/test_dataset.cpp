#include <gtest/gtest.h>

#include <random>

#include "chipcarbon/dataset.hpp"
#include "chipcarbon/errors.hpp"
#include "support.hpp"

using namespace chipcarbon;

namespace {

const std::string kHeader =
    "name,vendor,kind,segment,release_year,node_nm,die_area_mm2,transistor_millions,tdp_w,chiplet_count,"
    "price_usd,perf_opencl,perf_passmark,perf_peak_tflops\n";

}  // namespace

TEST(Processors, EmptyBody) {
    const auto r = parse_processors(kHeader);
    EXPECT_TRUE(r.records.empty());
    EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Processors, ParsesAllFields) {
    const auto r = parse_processors(kHeader + "\"Chip, Pro\",Acme,gpu,datacenter,2021,7,826,54200,400,2,15000,,,624.5\n");
    ASSERT_EQ(r.records.size(), 1u);
    const auto& p = r.records[0];
    EXPECT_EQ(p.name, "Chip, Pro");
    EXPECT_EQ(p.kind, ProcessorKind::gpu);
    EXPECT_EQ(p.segment, MarketSegment::datacenter);
    EXPECT_EQ(p.release_year, 2021);
    EXPECT_EQ(p.die_area_mm2, 826.0);
    EXPECT_EQ(p.transistor_millions, 54200.0);
    EXPECT_EQ(p.chiplet_count, 2);
    EXPECT_EQ(p.price_usd, 15000.0);
    EXPECT_FALSE(p.perf_opencl.has_value());
    EXPECT_EQ(p.perf_peak_tflops, 624.5);
}

TEST(Processors, NegativeAreaIsRejectedWithRowAndField) {
    const auto r = parse_processors(kHeader + "A,V,cpu,desktop,2020,7,100,,65,1,,,,\n" +
                                    "B,V,cpu,desktop,2020,7,-5,,65,1,,,,\n");
    ASSERT_EQ(r.records.size(), 1u);
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].row, 3u);
    EXPECT_EQ(r.diagnostics[0].field, "die_area_mm2");
}

TEST(Processors, EveryBadRowGetsADiagnostic) {
    const std::string body =
        "A,V,tpu,desktop,2020,7,100,,65,1,,,,\n"
        "B,V,cpu,mobile,2020,7,100,,65,1,,,,\n"
        "C,V,cpu,desktop,1980,7,100,,65,1,,,,\n"
        "D,V,cpu,desktop,2020,7,100,,0,1,,,,\n"
        "E,V,cpu,desktop,2020,7,100,,65,0,,,,\n"
        "F,V,cpu,desktop,2020,7,1e,,65,1,,,,\n"
        "G,V,cpu,desktop,2020,7,100,,65,1,,,\n"
        "H,V,cpu,desktop,2020,7,100,,65,1,,,,\n"
        "H,V,cpu,desktop,2020,7,100,,65,1,,,,\n"
        "I,V,cpu,desktop,2020,7,\"1,5\",,65,1,,,,\n";
    const auto r = parse_processors(kHeader + body);
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].name, "H");
    EXPECT_EQ(r.diagnostics.size(), 9u);
    const std::vector<std::string> fields{"kind", "segment", "release_year", "tdp_w", "chiplet_count",
                                          "die_area_mm2", "", "name", "die_area_mm2"};
    for (std::size_t i = 0; i < fields.size(); ++i) EXPECT_EQ(r.diagnostics[i].field, fields[i]) << i;
}

TEST(Processors, MissingColumnsAreNamed) {
    try {
        parse_processors("name,vendor,kind\nA,B,cpu\n");
        FAIL();
    } catch (const InputError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("die_area_mm2"), std::string::npos);
        EXPECT_NE(msg.find("tdp_w"), std::string::npos);
    }
}

TEST(Processors, UnknownColumnIsRejected) {
    EXPECT_THROW(parse_processors(kHeader.substr(0, kHeader.size() - 1) + ",die_aera\n"), InputError);
}

TEST(Processors, OptionalColumnsMayBeAbsent) {
    const auto r = parse_processors(
        "name,vendor,kind,segment,release_year,node_nm,die_area_mm2,tdp_w,chiplet_count\nA,V,cpu,desktop,2020,7,100,65,1\n");
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_FALSE(r.records[0].price_usd.has_value());
}

TEST(Processors, LocaleIndependentNumbers) {
    const auto r = parse_processors(kHeader + "A,V,cpu,desktop,2020,7,100.25,,65,1,,,,\n");
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].die_area_mm2, 100.25);
}

TEST(Processors, RoundTripReferenceDataset) {
    const auto first = parse_processors(read_text_file(test::data_path("processors.csv")));
    ASSERT_TRUE(first.diagnostics.empty());
    ASSERT_FALSE(first.records.empty());
    const std::string text = write_processors(first.records);
    const auto second = parse_processors(text);
    EXPECT_EQ(first.records, second.records);
    EXPECT_EQ(write_processors(second.records), text);
}

TEST(Processors, RoundTripRandomRecords) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.001, 5000.0);
    std::vector<ProcessorRecord> records;
    for (int i = 0; i < 200; ++i) {
        auto r = test::record("rec \"" + std::to_string(i) + "\", x", u(rng), u(rng), u(rng), 1990 + i % 100);
        r.kind = i % 2 ? ProcessorKind::cpu : ProcessorKind::gpu;
        r.chiplet_count = 1 + i % 9;
        if (i % 3) r.price_usd = u(rng);
        if (i % 5) r.perf_passmark = u(rng);
        if (i % 7) r.transistor_millions = u(rng);
        records.push_back(r);
    }
    const auto parsed = parse_processors(write_processors(records));
    EXPECT_TRUE(parsed.diagnostics.empty());
    EXPECT_EQ(parsed.records, records);
}

TEST(Revenue, ParseAndRoundTrip) {
    const auto r = parse_revenue(read_text_file(test::data_path("revenue.csv")));
    ASSERT_TRUE(r.diagnostics.empty());
    ASSERT_FALSE(r.records.empty());
    EXPECT_EQ(parse_revenue(write_revenue(r.records)).records, r.records);
}

TEST(Revenue, RejectsBadRows) {
    const auto r = parse_revenue("year,revenue_usd,flagship_name,unit_price_usd\n2020,-1,X,10\n2020,10,X,0\n2021,10,,5\n");
    EXPECT_TRUE(r.records.empty());
    EXPECT_EQ(r.diagnostics.size(), 3u);
}

TEST(Csv, QuotingAndBom) {
    const auto rows = split_csv("\xEF\xBB\xBF" "a,\"b \"\"q\"\"\",c\r\n\r\n\"multi\nline\",2,3\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].fields[0], "a");
    EXPECT_EQ(rows[0].fields[1], "b \"q\"");
    EXPECT_EQ(rows[1].fields[0], "multi\nline");
    EXPECT_EQ(csv_escape("plain"), "plain");
    EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Numbers, ShortestRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, 0.0}) EXPECT_EQ(parse_number(format_number(v)), v);
    EXPECT_FALSE(parse_number("nan").has_value());
    EXPECT_FALSE(parse_number("1,5").has_value());
    EXPECT_FALSE(parse_number("").has_value());
    EXPECT_EQ(parse_number(" 2.5 "), 2.5);
}

TEST(Lookup, UnknownNameSuggestsNearest) {
    std::vector<ProcessorRecord> rs{test::record("A100-SXM", 7, 826, 400), test::record("H100", 5, 814, 700)};
    EXPECT_EQ(&find_processor(rs, "H100"), &rs[1]);
    try {
        find_processor(rs, "a100-sxn");
        FAIL();
    } catch (const NotFoundError& e) {
        EXPECT_EQ(e.suggestion(), "A100-SXM");
        EXPECT_NE(std::string(e.what()).find("did you mean 'A100-SXM'"), std::string::npos);
    }
}

TEST(Lookup, MissingFile) { EXPECT_THROW(read_text_file("/nonexistent/file.csv"), InputError); }
