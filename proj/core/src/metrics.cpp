#include "sheetscan/metrics.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "sheetscan/depgraph.hpp"
#include "sheetscan/errors.hpp"

namespace sheetscan {

using nlohmann::json;

std::string_view c4_mode_name(C4Mode mode) {
    switch (mode) {
        case C4Mode::pairs: return "pairs";
        case C4Mode::cells: return "cells";
        case C4Mode::occurrences: return "occurrences";
    }
    return "?";
}

C4Mode c4_mode_from_name(std::string_view name) {
    if (name == "pairs") return C4Mode::pairs;
    if (name == "cells") return C4Mode::cells;
    if (name == "occurrences") return C4Mode::occurrences;
    throw FormatError("unknown c4 mode '" + std::string(name) + "'");
}

MetricRecord compute_record(const Workbook& wb,
                            const FunctionCatalog& catalog,
                            const MetricOptions& options) {
    MetricRecord rec;
    rec.source_id = wb.source_id;
    rec.s1 = non_empty_cell_count(wb);
    rec.s2 = nonempty_worksheet_count(wb);

    PrecedentGraph graph = PrecedentGraph::build(wb);

    struct UniqueInfo {
        std::vector<std::string> categories;
        std::vector<std::string> functions;
    };
    std::map<UniqueFormulaKey, UniqueInfo> uniques;

    for (const auto& fc : graph.formula_cells()) {
        ++rec.s3;
        const auto& ws = wb.worksheets[fc.addr.sheet_index];
        const Cell& cell = ws.cells.at(RowCol{fc.addr.row, fc.addr.col});
        rec.s5.push_back(static_cast<long long>(cell.formula->size()));

        if (!fc.tree) continue;  // unparseable: only s3/s5

        rec.f4.push_back(parse_tree_depth(*fc.tree));
        rec.f5.push_back(unique_function_count(*fc.tree->root));
        if (fc.passing) ++rec.passing_count;

        auto key = unique_formula_key(*fc.tree, fc.addr);
        if (!uniques.count(key)) {
            UniqueInfo info;
            for (const auto& c : formula_categories(*fc.tree, catalog)) {
                info.categories.push_back(c);
            }
            for (const auto& [name, count] :
                 extract_function_names(*fc.tree)) {
                rec.f1[name] += count;
                info.functions.push_back(name);
            }
            uniques.emplace(std::move(key), std::move(info));
        }

        const bool candidate = !fc.passing || !options.exclude_passing;
        if (!candidate) continue;
        rec.f3.push_back(fc.direct.unique_cell_count);
        const auto info = graph.depth_info(fc.addr);
        if (info.path_depth && info.transitive_precedent_count) {
            rec.c6.push_back(*info.path_depth);
            rec.c7.push_back(*info.transitive_precedent_count);
        } else {
            ++rec.diagnostics.cycle_excluded;
        }
    }

    rec.s4 = static_cast<long long>(uniques.size());
    for (auto& [key, info] : uniques) {
        rec.f2.push_back(std::move(info.categories));
        rec.f1_by_formula.push_back(std::move(info.functions));
    }

    rec.c2 = graph.external_link_count();
    rec.has_external_link = rec.c2 > 0;
    rec.has_interworksheet = graph.interworksheet_pair_count() > 0;
    switch (options.c4_mode) {
        case C4Mode::pairs:
            rec.c4 = graph.interworksheet_pair_count();
            break;
        case C4Mode::cells:
            rec.c4 = graph.interworksheet_cell_count();
            break;
        case C4Mode::occurrences:
            rec.c4 = graph.interworksheet_occurrence_count();
            break;
    }
    rec.formula_count = rec.s3;
    rec.diagnostics.unparseable = graph.unparseable_count();
    rec.diagnostics.unresolved_refs = graph.unresolved_ref_count();
    return rec;
}

CorpusPercentages corpus_percentages(
    const std::vector<MetricRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("corpus_percentages: no records");
    }
    CorpusPercentages out;
    long long with_external = 0;
    long long with_inter = 0;
    long long passing = 0;
    long long formulas = 0;
    long long cells = 0;
    for (const auto& r : records) {
        if (r.has_external_link) ++with_external;
        if (r.has_interworksheet) ++with_inter;
        passing += r.passing_count;
        formulas += r.formula_count;
        cells += r.s1;
    }
    const double n = static_cast<double>(records.size());
    out.c1 = static_cast<double>(with_external) / n;
    out.c3 = static_cast<double>(with_inter) / n;
    if (formulas > 0) {
        out.c5 = static_cast<double>(passing) / static_cast<double>(formulas);
    } else {
        out.c5_degenerate = true;
    }
    if (cells > 0) {
        out.c5_of_cells =
            static_cast<double>(passing) / static_cast<double>(cells);
    } else {
        out.c5_of_cells_degenerate = true;
    }
    return out;
}

namespace {

json string_lists_to_json(const std::vector<std::vector<std::string>>& lists) {
    json out = json::array();
    for (const auto& list : lists) out.push_back(list);
    return out;
}

const json& require_field(const json& obj, const char* name,
                          std::size_t line_no) {
    auto it = obj.find(name);
    if (it == obj.end()) {
        throw SchemaError("record line " + std::to_string(line_no) +
                          ": missing field '" + name + "'");
    }
    return *it;
}

template <typename T>
T field_as(const json& obj, const char* name, std::size_t line_no) {
    const json& v = require_field(obj, name, line_no);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw SchemaError("record line " + std::to_string(line_no) +
                          ": field '" + name + "' has the wrong type");
    }
}

}  // namespace

std::string record_to_json_line(const MetricRecord& r) {
    json j;
    j["v"] = 1;
    j["source_id"] = r.source_id;
    j["s1"] = r.s1;
    j["s2"] = r.s2;
    j["s3"] = r.s3;
    j["s4"] = r.s4;
    j["s5"] = r.s5;
    j["has_external_link"] = r.has_external_link;
    j["c2"] = r.c2;
    j["has_interworksheet"] = r.has_interworksheet;
    j["c4"] = r.c4;
    j["passing_count"] = r.passing_count;
    j["formula_count"] = r.formula_count;
    j["c6"] = r.c6;
    j["c7"] = r.c7;
    j["f1"] = r.f1;
    j["f2"] = string_lists_to_json(r.f2);
    j["f1_by_formula"] = string_lists_to_json(r.f1_by_formula);
    j["f3"] = r.f3;
    j["f4"] = r.f4;
    j["f5"] = r.f5;
    j["diagnostics"] = {{"unparseable", r.diagnostics.unparseable},
                        {"cycle_excluded", r.diagnostics.cycle_excluded},
                        {"unresolved_refs", r.diagnostics.unresolved_refs}};
    return j.dump();
}

MetricRecord record_from_json_line(std::string_view line,
                                   std::size_t line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw SchemaError("record line " + std::to_string(line_no) +
                          ": malformed JSON: " + e.what());
    }
    if (!j.is_object()) {
        throw SchemaError("record line " + std::to_string(line_no) +
                          ": not an object");
    }
    const int version = field_as<int>(j, "v", line_no);
    if (version != 1) {
        throw SchemaError("record line " + std::to_string(line_no) +
                          ": unsupported schema version " +
                          std::to_string(version));
    }
    MetricRecord r;
    r.source_id = field_as<std::string>(j, "source_id", line_no);
    r.s1 = field_as<long long>(j, "s1", line_no);
    r.s2 = field_as<long long>(j, "s2", line_no);
    r.s3 = field_as<long long>(j, "s3", line_no);
    r.s4 = field_as<long long>(j, "s4", line_no);
    r.s5 = field_as<std::vector<long long>>(j, "s5", line_no);
    r.has_external_link = field_as<bool>(j, "has_external_link", line_no);
    r.c2 = field_as<long long>(j, "c2", line_no);
    r.has_interworksheet = field_as<bool>(j, "has_interworksheet", line_no);
    r.c4 = field_as<long long>(j, "c4", line_no);
    r.passing_count = field_as<long long>(j, "passing_count", line_no);
    r.formula_count = field_as<long long>(j, "formula_count", line_no);
    r.c6 = field_as<std::vector<long long>>(j, "c6", line_no);
    r.c7 = field_as<std::vector<long long>>(j, "c7", line_no);
    r.f1 = field_as<std::map<std::string, long long>>(j, "f1", line_no);
    r.f2 = field_as<std::vector<std::vector<std::string>>>(j, "f2", line_no);
    r.f1_by_formula = field_as<std::vector<std::vector<std::string>>>(
        j, "f1_by_formula", line_no);
    r.f3 = field_as<std::vector<long long>>(j, "f3", line_no);
    r.f4 = field_as<std::vector<long long>>(j, "f4", line_no);
    r.f5 = field_as<std::vector<long long>>(j, "f5", line_no);
    const json& d = require_field(j, "diagnostics", line_no);
    if (!d.is_object()) {
        throw SchemaError("record line " + std::to_string(line_no) +
                          ": field 'diagnostics' has the wrong type");
    }
    r.diagnostics.unparseable = field_as<long long>(d, "unparseable", line_no);
    r.diagnostics.cycle_excluded =
        field_as<long long>(d, "cycle_excluded", line_no);
    r.diagnostics.unresolved_refs =
        field_as<long long>(d, "unresolved_refs", line_no);
    return r;
}

std::vector<MetricRecord> read_records_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open record file '" + path + "'");
    }
    std::vector<MetricRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        out.push_back(record_from_json_line(line, line_no));
    }
    return out;
}

}  // namespace sheetscan
