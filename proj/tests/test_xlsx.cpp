#include <doctest.h>

#include "sheetscan/canonical_json.hpp"
#include "sheetscan/errors.hpp"
#include "sheetscan/formula.hpp"
#include "sheetscan/metrics.hpp"
#include "sheetscan/xlsx.hpp"
#include "sheetscan/zipfile.hpp"
#include "xlsx_builder.hpp"

using namespace sheetscan;
using namespace sheetscan::testing;

namespace {

const FunctionCatalog& catalog() {
    static FunctionCatalog c =
        FunctionCatalog::load_csv_file(SHEETSCAN_CATALOG_PATH);
    return c;
}

}  // namespace

TEST_CASE("zip reader round-trips stored and deflated entries") {
    ZipWriter w;
    std::string big(4000, 'x');
    w.add("a.txt", "hello");
    w.add("dir/b.bin", big, true);
    // the archive views the buffer, which must outlive it
    std::string bytes = w.finish();
    auto ar = ZipArchive::from_bytes(bytes);
    CHECK(ar.contains("a.txt"));
    CHECK(*ar.read("a.txt") == "hello");
    CHECK(*ar.read("dir/b.bin") == big);
    CHECK(!ar.read("missing").has_value());
}

TEST_CASE("minimal xlsx with one numeric cell") {
    auto bytes = build_xlsx({{"Sheet1",
                              "<sheetData><row r=\"1\">"
                              "<c r=\"A1\"><v>5</v></c>"
                              "</row></sheetData>"}});
    auto [wb, info] = load_xlsx(bytes);
    CHECK(info.sheet_count == 1);
    CHECK(info.parse_warnings.empty());
    REQUIRE(wb.worksheets.size() == 1);
    CHECK(wb.worksheets[0].name == "Sheet1");
    const Cell& c = wb.worksheets[0].cells.at(RowCol{1, 1});
    CHECK(std::get<double>(*c.value) == 5.0);
}

TEST_CASE("value types decode") {
    auto bytes = build_xlsx(
        {{"S",
          "<sheetData><row r=\"1\">"
          "<c r=\"A1\" t=\"s\"><v>0</v></c>"
          "<c r=\"B1\" t=\"b\"><v>1</v></c>"
          "<c r=\"C1\" t=\"e\"><v>#REF!</v></c>"
          "<c r=\"D1\" t=\"str\"><v>cached</v></c>"
          "<c r=\"E1\" t=\"inlineStr\"><is><t>inline</t></is></c>"
          "<c r=\"F1\"><v>2.5</v></c>"
          "<c r=\"G1\" s=\"1\"/>"  // style-only: not stored
          "</row></sheetData>"}},
        "<sst><si><t>shared text</t></si></sst>");
    auto [wb, info] = load_xlsx(bytes);
    const auto& cells = wb.worksheets[0].cells;
    CHECK(std::get<std::string>(*cells.at(RowCol{1, 1}).value) ==
          "shared text");
    CHECK(std::get<bool>(*cells.at(RowCol{1, 2}).value));
    CHECK(std::get<ErrorValue>(*cells.at(RowCol{1, 3}).value).code ==
          "#REF!");
    CHECK(std::get<std::string>(*cells.at(RowCol{1, 4}).value) == "cached");
    CHECK(std::get<std::string>(*cells.at(RowCol{1, 5}).value) == "inline");
    CHECK(std::get<double>(*cells.at(RowCol{1, 6}).value) == 2.5);
    CHECK(cells.count(RowCol{1, 7}) == 0);
    CHECK(non_empty_cell_count(wb) == 6);
}

TEST_CASE("rich-text shared strings concatenate runs") {
    auto bytes = build_xlsx({{"S",
                              "<sheetData><row r=\"1\">"
                              "<c r=\"A1\" t=\"s\"><v>0</v></c>"
                              "</row></sheetData>"}},
                            "<sst><si><r><t>Hello </t></r>"
                            "<r><t>world</t></r></si></sst>");
    auto [wb, info] = load_xlsx(bytes);
    CHECK(std::get<std::string>(
              *wb.worksheets[0].cells.at(RowCol{1, 1}).value) ==
          "Hello world");
}

TEST_CASE("formulas decode XML entities") {
    auto bytes = build_xlsx({{"S",
                              "<sheetData><row r=\"1\">"
                              "<c r=\"A1\"><f>B1&amp;\"x\"</f></c>"
                              "<c r=\"B1\"><f>1&lt;2</f><v>1</v></c>"
                              "</row></sheetData>"}});
    auto [wb, info] = load_xlsx(bytes);
    CHECK(*wb.worksheets[0].cells.at(RowCol{1, 1}).formula == "B1&\"x\"");
    CHECK(*wb.worksheets[0].cells.at(RowCol{1, 2}).formula == "1<2");
}

TEST_CASE("shared formulas expand by relative shift") {
    // master at C1 covering C1:C3
    auto bytes = build_xlsx(
        {{"S",
          "<sheetData>"
          "<row r=\"1\"><c r=\"B1\"><v>1</v></c>"
          "<c r=\"C1\"><f t=\"shared\" ref=\"C1:C3\" si=\"0\">B1+1</f>"
          "<v>2</v></c></row>"
          "<row r=\"2\"><c r=\"C2\"><f t=\"shared\" si=\"0\"/><v>1</v></c>"
          "</row>"
          "<row r=\"3\"><c r=\"C3\"><f t=\"shared\" si=\"0\"/><v>1</v></c>"
          "</row>"
          "</sheetData>"}});
    auto [wb, info] = load_xlsx(bytes);
    const auto& cells = wb.worksheets[0].cells;
    CHECK(*cells.at(RowCol{1, 3}).formula == "B1+1");
    CHECK(*cells.at(RowCol{2, 3}).formula == "B2+1");
    CHECK(*cells.at(RowCol{3, 3}).formula == "B3+1");

    // expansion followed by relative R1C1 is identical across the group
    auto master = parse_formula(*cells.at(RowCol{1, 3}).formula);
    auto slave2 = parse_formula(*cells.at(RowCol{2, 3}).formula);
    auto slave3 = parse_formula(*cells.at(RowCol{3, 3}).formula);
    auto k1 = to_relative_r1c1(master, RowCol{1, 3});
    CHECK(k1 == to_relative_r1c1(slave2, RowCol{2, 3}));
    CHECK(k1 == to_relative_r1c1(slave3, RowCol{3, 3}));
}

TEST_CASE("shared formulas with absolute anchors shift only relatives") {
    auto bytes = build_xlsx(
        {{"S",
          "<sheetData>"
          "<row r=\"1\">"
          "<c r=\"B1\"><f t=\"shared\" ref=\"B1:B2\" si=\"3\">SUM($A$1:A1)</f>"
          "</c></row>"
          "<row r=\"2\"><c r=\"B2\"><f t=\"shared\" si=\"3\"/></c></row>"
          "</sheetData>"}});
    auto [wb, info] = load_xlsx(bytes);
    CHECK(*wb.worksheets[0].cells.at(RowCol{2, 2}).formula ==
          "SUM($A$1:A2)");
}

TEST_CASE("array formula sits on the anchor only") {
    auto bytes = build_xlsx(
        {{"S",
          "<sheetData><row r=\"1\">"
          "<c r=\"A1\"><f t=\"array\" ref=\"A1:A3\">B1:B3*2</f><v>2</v></c>"
          "</row></sheetData>"}});
    auto [wb, info] = load_xlsx(bytes);
    CHECK(wb.worksheets[0].cells.size() == 1);
    CHECK(*wb.worksheets[0].cells.at(RowCol{1, 1}).formula == "B1:B3*2");
}

TEST_CASE("merged regions extract") {
    auto bytes = build_xlsx(
        {{"S",
          "<sheetData><row r=\"1\"><c r=\"A1\"><v>1</v></c></row>"
          "</sheetData>"
          "<mergeCells count=\"1\"><mergeCell ref=\"A1:B2\"/></mergeCells>"}});
    auto [wb, info] = load_xlsx(bytes);
    REQUIRE(wb.worksheets[0].merged_regions.size() == 1);
    CHECK(wb.worksheets[0].merged_regions[0] == CellRange{1, 1, 2, 2});
}

TEST_CASE("corrupt zip is an unreadable-file error") {
    CHECK_THROWS_AS(load_xlsx("this is not a zip archive at all"),
                    UnreadableFileError);
    std::string truncated = build_xlsx({{"S", "<sheetData/>"}});
    truncated.resize(truncated.size() / 2);
    CHECK_THROWS_AS(load_xlsx(truncated), UnreadableFileError);
}

TEST_CASE("zip without workbook part is unreadable") {
    ZipWriter w;
    w.add("readme.txt", "nothing here");
    std::string bytes = w.finish();
    CHECK_THROWS_AS(load_xlsx(bytes), UnreadableFileError);
}

TEST_CASE("malformed cells warn and drop, load continues") {
    auto bytes = build_xlsx({{"S",
                              "<sheetData><row r=\"1\">"
                              "<c r=\"NOTANADDR\"><v>1</v></c>"
                              "<c r=\"B1\"><v>2</v></c>"
                              "</row></sheetData>"}});
    auto [wb, info] = load_xlsx(bytes);
    CHECK(wb.worksheets[0].cells.size() == 1);
    CHECK(!info.parse_warnings.empty());
}

TEST_CASE("cells without r attribute fall back to positional addressing") {
    auto bytes = build_xlsx({{"S",
                              "<sheetData><row r=\"2\">"
                              "<c><v>1</v></c><c><v>2</v></c>"
                              "</row></sheetData>"}});
    auto [wb, info] = load_xlsx(bytes);
    CHECK(std::get<double>(*wb.worksheets[0].cells.at(RowCol{2, 1}).value) ==
          1.0);
    CHECK(std::get<double>(*wb.worksheets[0].cells.at(RowCol{2, 2}).value) ==
          2.0);
}

TEST_CASE("deflated parts load like stored ones") {
    auto stored = build_xlsx({{"S",
                               "<sheetData><row r=\"1\">"
                               "<c r=\"A1\"><v>5</v></c></row></sheetData>"}},
                             "", false);
    auto deflated = build_xlsx({{"S",
                                 "<sheetData><row r=\"1\">"
                                 "<c r=\"A1\"><v>5</v></c></row></sheetData>"}},
                               "", true);
    auto [wb1, i1] = load_xlsx(stored);
    auto [wb2, i2] = load_xlsx(deflated);
    wb1.source_id = wb2.source_id = "same";
    CHECK(wb1 == wb2);
}

TEST_CASE("xlsx metrics equal the hand-written canonical equivalent") {
    auto bytes = build_xlsx(
        {{"Main",
          "<sheetData>"
          "<row r=\"1\"><c r=\"A1\"><v>10</v></c>"
          "<c r=\"B1\"><f>A1*2</f><v>20</v></c>"
          "<c r=\"C1\"><f>Other!A1+B1</f><v>21</v></c></row>"
          "<row r=\"2\"><c r=\"A2\" t=\"s\"><v>0</v></c>"
          "<c r=\"B2\"><f>SUM(A1:B1)</f><v>30</v></c></row>"
          "</sheetData>"
          "<mergeCells><mergeCell ref=\"D1:E2\"/></mergeCells>"},
         {"Other",
          "<sheetData><row r=\"1\"><c r=\"A1\"><v>1</v></c></row>"
          "</sheetData>"}},
        "<sst><si><t>note</t></si></sst>");
    auto [wb, info] = load_xlsx(bytes);
    wb.source_id = "pair";

    Workbook canon = load_canonical(R"json({"name":"pair","worksheets":[
        {"name":"Main","merged":["D1:E2"],"cells":[
            {"addr":"A1","value":10},
            {"addr":"B1","value":20,"formula":"A1*2"},
            {"addr":"C1","value":21,"formula":"Other!A1+B1"},
            {"addr":"A2","value":"note"},
            {"addr":"B2","value":30,"formula":"SUM(A1:B1)"}]},
        {"name":"Other","cells":[{"addr":"A1","value":1}]}]})json");

    CHECK(wb == canon);
    MetricRecord from_xlsx = compute_record(wb, catalog());
    MetricRecord from_json = compute_record(canon, catalog());
    CHECK(from_xlsx == from_json);
}
