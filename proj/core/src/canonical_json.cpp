#include "sheetscan/canonical_json.hpp"

#include <json.hpp>

#include "sheetscan/errors.hpp"

namespace sheetscan {

namespace {

using nlohmann::json;

CellValue value_from_json(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_object()) {
        if (v.size() != 1 || !v.contains("error") || !v["error"].is_string()) {
            throw FormatError("cell " + where +
                              ": value object must be {\"error\": <code>}");
        }
        std::string code = v["error"].get<std::string>();
        if (!is_known_error_code(code)) {
            throw FormatError("cell " + where + ": unknown error code '" +
                              code + "'");
        }
        return ErrorValue{std::move(code)};
    }
    throw FormatError("cell " + where + ": unsupported value type");
}

json value_to_json(const CellValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    const auto& e = std::get<ErrorValue>(v);
    return json{{"error", e.code}};
}

Worksheet worksheet_from_json(const json& sj, int sheet_ordinal) {
    if (!sj.is_object()) throw FormatError("worksheet entry is not an object");
    if (!sj.contains("name") || !sj["name"].is_string()) {
        throw FormatError("worksheet " + std::to_string(sheet_ordinal) +
                          " has no \"name\" string");
    }
    Worksheet ws;
    ws.name = sj["name"].get<std::string>();

    if (sj.contains("merged")) {
        if (!sj["merged"].is_array()) {
            throw FormatError("worksheet '" + ws.name +
                              "': \"merged\" must be an array");
        }
        for (const auto& m : sj["merged"]) {
            if (!m.is_string()) {
                throw FormatError("worksheet '" + ws.name +
                                  "': merged entry is not a string");
            }
            auto r = parse_plain_range(m.get<std::string>());
            if (!r) {
                throw FormatError("worksheet '" + ws.name +
                                  "': bad merged range '" +
                                  m.get<std::string>() + "'");
            }
            ws.merged_regions.push_back(*r);
        }
    }
    for (std::size_t i = 0; i < ws.merged_regions.size(); ++i) {
        for (std::size_t j = i + 1; j < ws.merged_regions.size(); ++j) {
            if (ws.merged_regions[i].intersects(ws.merged_regions[j])) {
                throw IntegrityError("worksheet '" + ws.name +
                                     "': overlapping merged regions " +
                                     range_to_a1(ws.merged_regions[i]) +
                                     " and " +
                                     range_to_a1(ws.merged_regions[j]));
            }
        }
    }
    std::sort(ws.merged_regions.begin(), ws.merged_regions.end());

    if (sj.contains("cells")) {
        if (!sj["cells"].is_array()) {
            throw FormatError("worksheet '" + ws.name +
                              "': \"cells\" must be an array");
        }
        for (const auto& cj : sj["cells"]) {
            if (!cj.is_object()) {
                throw FormatError("worksheet '" + ws.name +
                                  "': cell entry is not an object");
            }
            for (const auto& [key, unused] : cj.items()) {
                if (key != "addr" && key != "value" && key != "formula") {
                    throw FormatError("worksheet '" + ws.name +
                                      "': unknown cell key '" + key + "'");
                }
            }
            if (!cj.contains("addr") || !cj["addr"].is_string()) {
                throw FormatError("worksheet '" + ws.name +
                                  "': cell has no \"addr\" string");
            }
            const std::string addr = cj["addr"].get<std::string>();
            auto rc = parse_plain_a1(addr);
            if (!rc) {
                throw FormatError("worksheet '" + ws.name +
                                  "': bad cell address '" + addr + "'");
            }
            Cell cell;
            if (cj.contains("value") && !cj["value"].is_null()) {
                cell.value = value_from_json(cj["value"], addr);
            }
            if (cj.contains("formula") && !cj["formula"].is_null()) {
                if (!cj["formula"].is_string()) {
                    throw FormatError("cell " + addr +
                                      ": formula must be a string");
                }
                cell.formula = cj["formula"].get<std::string>();
                if (cell.formula->empty()) {
                    throw IntegrityError("cell " + addr +
                                         ": formula text is empty");
                }
            }
            if (!cell.value && !cell.formula) {
                throw IntegrityError("worksheet '" + ws.name + "': cell " +
                                     addr + " has neither value nor formula");
            }
            auto [it, inserted] = ws.cells.emplace(*rc, std::move(cell));
            if (!inserted) {
                throw IntegrityError("worksheet '" + ws.name +
                                     "': duplicate cell address " + addr);
            }
        }
    }
    return ws;
}

}  // namespace

Workbook load_canonical(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw FormatError("document root is not an object");
    if (!doc.contains("worksheets") || !doc["worksheets"].is_array()) {
        throw FormatError("document has no \"worksheets\" array");
    }

    Workbook wb;
    if (doc.contains("name") && doc["name"].is_string()) {
        wb.source_id = doc["name"].get<std::string>();
    }
    int ordinal = 0;
    for (const auto& sj : doc["worksheets"]) {
        wb.worksheets.push_back(worksheet_from_json(sj, ordinal++));
    }
    if (wb.worksheets.empty()) {
        throw IntegrityError("workbook has no worksheets");
    }
    for (std::size_t i = 0; i < wb.worksheets.size(); ++i) {
        for (std::size_t j = i + 1; j < wb.worksheets.size(); ++j) {
            if (sheet_name_equal(wb.worksheets[i].name,
                                 wb.worksheets[j].name)) {
                throw IntegrityError("duplicate worksheet name '" +
                                     wb.worksheets[j].name + "'");
            }
        }
    }
    return wb;
}

std::string serialize_canonical(const Workbook& wb) {
    json doc;
    doc["name"] = wb.source_id;
    json sheets = json::array();
    for (const auto& ws : wb.worksheets) {
        json sj;
        sj["name"] = ws.name;
        json merged = json::array();
        for (const auto& r : ws.merged_regions) {
            std::string s = rowcol_to_a1({r.r1, r.c1}) + ":" +
                            rowcol_to_a1({r.r2, r.c2});
            merged.push_back(s);
        }
        sj["merged"] = std::move(merged);
        json cells = json::array();
        for (const auto& [rc, cell] : ws.cells) {
            json cj;
            cj["addr"] = rowcol_to_a1(rc);
            if (cell.value) cj["value"] = value_to_json(*cell.value);
            if (cell.formula) cj["formula"] = *cell.formula;
            cells.push_back(std::move(cj));
        }
        sj["cells"] = std::move(cells);
        sheets.push_back(std::move(sj));
    }
    doc["worksheets"] = std::move(sheets);
    return doc.dump();
}

}  // namespace sheetscan
