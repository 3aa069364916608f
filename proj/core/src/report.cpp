#include "sheetscan/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sheetscan {

using nlohmann::json;

std::string format_fixed1(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", value);
    std::string s(buf);
    // Insert thousands separators into the integer part.
    std::size_t dot = s.find('.');
    std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    std::string intpart = s.substr(start, dot - start);
    std::string grouped;
    int count = 0;
    for (std::size_t i = intpart.size(); i-- > 0;) {
        grouped.insert(grouped.begin(), intpart[i]);
        if (++count % 3 == 0 && i > 0) grouped.insert(grouped.begin(), ',');
    }
    return s.substr(0, start) + grouped + s.substr(dot);
}

std::string format_pct1(double fraction) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
    return buf;
}

namespace {

std::string format_p(double p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", p);
    return buf;
}

std::string format_d(double d) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", d);
    return buf;
}

std::vector<double> workbook_samples(const std::vector<MetricRecord>& recs,
                                     long long MetricRecord::* field) {
    std::vector<double> out;
    out.reserve(recs.size());
    for (const auto& r : recs) {
        out.push_back(static_cast<double>(r.*field));
    }
    return out;
}

std::vector<double> filtered_samples(const std::vector<MetricRecord>& recs,
                                     long long MetricRecord::* field) {
    std::vector<double> out;
    for (const auto& r : recs) {
        if (r.*field >= 1) out.push_back(static_cast<double>(r.*field));
    }
    return out;
}

std::vector<double> pooled_samples(
    const std::vector<MetricRecord>& recs,
    std::vector<long long> MetricRecord::* field) {
    std::vector<double> out;
    for (const auto& r : recs) {
        for (long long v : r.*field) out.push_back(static_cast<double>(v));
    }
    return out;
}

SummaryRow make_row(std::string id, std::string label,
                    const std::vector<double>& sample) {
    SummaryRow row;
    row.id = std::move(id);
    row.label = std::move(label);
    row.n = sample.size();
    if (!sample.empty()) row.five = stats::quantile_summary(sample);
    return row;
}

struct MetricSpec {
    const char* id;
    const char* label;
    enum class Kind { workbook, filtered, pooled } kind;
    long long MetricRecord::* scalar;
    std::vector<long long> MetricRecord::* list;
};

const MetricSpec kMetricSpecs[] = {
    {"s1", "non-empty cells per spreadsheet", MetricSpec::Kind::workbook,
     &MetricRecord::s1, nullptr},
    {"s2", "worksheets per spreadsheet (non-empty)",
     MetricSpec::Kind::workbook, &MetricRecord::s2, nullptr},
    {"s3", "formulas per spreadsheet", MetricSpec::Kind::workbook,
     &MetricRecord::s3, nullptr},
    {"s4", "unique formulas per spreadsheet", MetricSpec::Kind::workbook,
     &MetricRecord::s4, nullptr},
    {"s5", "formula length in characters", MetricSpec::Kind::pooled, nullptr,
     &MetricRecord::s5},
    {"c2", "external links per spreadsheet (linked only)",
     MetricSpec::Kind::filtered, &MetricRecord::c2, nullptr},
    {"c4", "inter-worksheet connections per spreadsheet (linked only)",
     MetricSpec::Kind::filtered, &MetricRecord::c4, nullptr},
    {"c6", "path depth per formula", MetricSpec::Kind::pooled, nullptr,
     &MetricRecord::c6},
    {"c7", "transitive precedents per formula", MetricSpec::Kind::pooled,
     nullptr, &MetricRecord::c7},
    {"f3", "precedents per formula", MetricSpec::Kind::pooled, nullptr,
     &MetricRecord::f3},
    {"f4", "parse tree depth per formula", MetricSpec::Kind::pooled, nullptr,
     &MetricRecord::f4},
    {"f5", "unique functions per formula", MetricSpec::Kind::pooled, nullptr,
     &MetricRecord::f5},
};

std::vector<double> samples_for(const MetricSpec& spec,
                                const std::vector<MetricRecord>& recs) {
    switch (spec.kind) {
        case MetricSpec::Kind::workbook:
            return workbook_samples(recs, spec.scalar);
        case MetricSpec::Kind::filtered:
            return filtered_samples(recs, spec.scalar);
        case MetricSpec::Kind::pooled:
            return pooled_samples(recs, spec.list);
    }
    return {};
}

// Collects the corpus-wide unique-formula material.
struct UniqueFormulaPool {
    std::map<std::string, long long> occurrences;
    std::vector<std::set<std::string>> function_sets;  // with >= 1 builtin
    std::vector<std::set<std::string>> category_sets;  // all unique formulas
};

UniqueFormulaPool pool_unique_formulas(
    const std::vector<MetricRecord>& records,
    const FunctionCatalog& catalog) {
    UniqueFormulaPool pool;
    for (const auto& r : records) {
        for (const auto& [name, count] : r.f1) pool.occurrences[name] += count;
        for (const auto& cats : r.f2) {
            pool.category_sets.emplace_back(cats.begin(), cats.end());
        }
        for (const auto& fns : r.f1_by_formula) {
            bool any_builtin = false;
            for (const auto& f : fns) {
                if (catalog.is_builtin(f)) {
                    any_builtin = true;
                    break;
                }
            }
            if (any_builtin) {
                pool.function_sets.emplace_back(fns.begin(), fns.end());
            }
        }
    }
    return pool;
}

}  // namespace

CorpusSummary summarize_records(const std::vector<MetricRecord>& records,
                                const FunctionCatalog& catalog,
                                const std::string& corpus_name) {
    if (records.empty()) {
        throw std::invalid_argument("summarize_records: no records");
    }
    CorpusSummary out;
    out.corpus_name = corpus_name;
    out.workbook_count = records.size();
    for (const auto& r : records) {
        out.formula_cells += r.s3;
        out.unique_formulas += r.s4;
        out.passing_formulas += r.passing_count;
        out.unparseable += r.diagnostics.unparseable;
        out.cycle_excluded += r.diagnostics.cycle_excluded;
        out.unresolved_refs += r.diagnostics.unresolved_refs;
    }
    for (const auto& spec : kMetricSpecs) {
        SummaryRow row = make_row(spec.id, spec.label,
                                  samples_for(spec, records));
        const char c = spec.id[0];
        if (c == 's') out.size_rows.push_back(std::move(row));
        else if (c == 'c') out.coupling_rows.push_back(std::move(row));
        else out.formula_rows.push_back(std::move(row));
    }
    out.percentages = corpus_percentages(records);

    UniqueFormulaPool pool = pool_unique_formulas(records, catalog);
    out.top = top_functions(pool.occurrences, pool.function_sets, catalog, 15);

    auto usage = category_usage(pool.category_sets);
    for (const auto& [cat, share] : usage) {
        out.category_shares.emplace_back(cat, share);
    }
    std::sort(out.category_shares.begin(), out.category_shares.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });
    return out;
}

namespace {

void render_rows(std::ostringstream& os, const std::string& heading,
                 const std::vector<SummaryRow>& rows) {
    os << heading << "\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "  %-62s %8s %12s %12s %12s %12s %12s\n",
                  "metric", "n", "min", "q1", "median", "q3", "max");
    os << buf;
    for (const auto& row : rows) {
        std::string label = row.id + " " + row.label;
        if (row.n == 0) {
            std::snprintf(buf, sizeof(buf), "  %-62s %8zu %s\n",
                          label.c_str(), row.n, "(no data)");
            os << buf;
            continue;
        }
        std::snprintf(buf, sizeof(buf),
                      "  %-62s %8zu %12s %12s %12s %12s %12s\n",
                      label.c_str(), row.n,
                      format_fixed1(row.five.min).c_str(),
                      format_fixed1(row.five.q1).c_str(),
                      format_fixed1(row.five.median).c_str(),
                      format_fixed1(row.five.q3).c_str(),
                      format_fixed1(row.five.max).c_str());
        os << buf;
    }
}

}  // namespace

std::string render_summary_text(const CorpusSummary& s) {
    std::ostringstream os;
    os << "corpus: " << s.corpus_name << "\n";
    os << "  workbooks: " << s.workbook_count << "\n";
    os << "  formula cells: " << s.formula_cells << " (unique "
       << s.unique_formulas << ", passing " << s.passing_formulas
       << ", unparseable " << s.unparseable << ", cycle-excluded "
       << s.cycle_excluded << ", unresolved refs " << s.unresolved_refs
       << ")\n\n";

    render_rows(os, "size metrics", s.size_rows);
    os << "\n";
    render_rows(os, "coupling metrics", s.coupling_rows);
    os << "  c1 spreadsheets linked to other spreadsheets: "
       << format_pct1(s.percentages.c1) << "\n";
    os << "  c3 spreadsheets with inter-worksheet connections: "
       << format_pct1(s.percentages.c3) << "\n";
    os << "  c5 passing cells: " << format_pct1(s.percentages.c5)
       << " of formulas"
       << (s.percentages.c5_degenerate ? " (no formulas)" : "")
       << "; auxiliary " << format_pct1(s.percentages.c5_of_cells)
       << " of non-empty cells"
       << (s.percentages.c5_of_cells_degenerate ? " (no cells)" : "")
       << "\n\n";
    render_rows(os, "formula metrics", s.formula_rows);
    os << "\n";

    os << "top functions (occurrences over unique formulas; built-ins only)"
       << "\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "  %4s %-24s %12s %10s %10s\n", "rank",
                  "function", "occurrences", "occ-share", "formulas");
    os << buf;
    for (std::size_t i = 0; i < s.top.ranked.size(); ++i) {
        const auto& rf = s.top.ranked[i];
        const double share =
            s.top.total_occurrences > 0
                ? static_cast<double>(rf.occurrences) /
                      static_cast<double>(s.top.total_occurrences)
                : 0.0;
        std::snprintf(buf, sizeof(buf), "  %4zu %-24s %12lld %10s %10lld\n",
                      i + 1, rf.name.c_str(), rf.occurrences,
                      format_pct1(share).c_str(), rf.formulas);
        os << buf;
    }
    os << "  top-" << s.top.ranked.size() << " coverage: "
       << format_pct1(s.top.occurrence_coverage) << " of occurrences, "
       << format_pct1(s.top.formula_coverage)
       << " of unique formulas with functions\n\n";

    os << "function categories (share of unique formulas)\n";
    for (const auto& [cat, share] : s.category_shares) {
        std::snprintf(buf, sizeof(buf), "  %-24s %8s\n", cat.c_str(),
                      format_pct1(share).c_str());
        os << buf;
    }
    return os.str();
}

namespace {

json five_to_json(const SummaryRow& row) {
    json j;
    j["id"] = row.id;
    j["label"] = row.label;
    j["n"] = row.n;
    if (row.n > 0) {
        j["min"] = row.five.min;
        j["q1"] = row.five.q1;
        j["median"] = row.five.median;
        j["q3"] = row.five.q3;
        j["max"] = row.five.max;
    }
    return j;
}

}  // namespace

std::string render_summary_json(const CorpusSummary& s) {
    json j;
    j["corpus"] = s.corpus_name;
    j["workbooks"] = s.workbook_count;
    j["formula_cells"] = s.formula_cells;
    j["unique_formulas"] = s.unique_formulas;
    j["passing_formulas"] = s.passing_formulas;
    j["unparseable"] = s.unparseable;
    j["cycle_excluded"] = s.cycle_excluded;
    j["unresolved_refs"] = s.unresolved_refs;
    json rows = json::array();
    for (const auto& r : s.size_rows) rows.push_back(five_to_json(r));
    for (const auto& r : s.coupling_rows) rows.push_back(five_to_json(r));
    for (const auto& r : s.formula_rows) rows.push_back(five_to_json(r));
    j["rows"] = std::move(rows);
    j["c1"] = s.percentages.c1;
    j["c3"] = s.percentages.c3;
    j["c5_of_formulas"] = s.percentages.c5;
    j["c5_degenerate"] = s.percentages.c5_degenerate;
    j["c5_of_cells"] = s.percentages.c5_of_cells;
    json top = json::array();
    for (const auto& rf : s.top.ranked) {
        top.push_back({{"name", rf.name},
                       {"occurrences", rf.occurrences},
                       {"formulas", rf.formulas}});
    }
    j["top_functions"] = std::move(top);
    j["top_total_occurrences"] = s.top.total_occurrences;
    j["top_occurrence_coverage"] = s.top.occurrence_coverage;
    j["top_formula_coverage"] = s.top.formula_coverage;
    json cats = json::object();
    for (const auto& [cat, share] : s.category_shares) cats[cat] = share;
    j["category_shares"] = std::move(cats);
    return j.dump(2) + "\n";
}

ComparisonReport compare_records(const std::vector<MetricRecord>& a,
                                 const std::vector<MetricRecord>& b,
                                 int exact_cap, const std::string& name_a,
                                 const std::string& name_b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("compare_records: empty record set");
    }
    ComparisonReport out;
    out.name_a = name_a;
    out.name_b = name_b;
    out.workbooks_a = a.size();
    out.workbooks_b = b.size();
    out.pct_a = corpus_percentages(a);
    out.pct_b = corpus_percentages(b);

    for (const auto& spec : kMetricSpecs) {
        ComparisonRow row;
        row.id = spec.id;
        row.label = spec.label;
        auto xs = samples_for(spec, a);
        auto ys = samples_for(spec, b);
        row.n_a = xs.size();
        row.n_b = ys.size();
        if (!xs.empty() && !ys.empty()) {
            auto cmp = stats::compare_metric(xs, ys, exact_cap);
            row.computed = true;
            row.p = cmp.test.p_value;
            row.band = stats::p_value_band(row.p);
            row.method =
                cmp.test.method == stats::TestResult::Method::exact
                    ? "exact"
                    : "normal";
            row.d = cmp.effect.d;
            row.effect = std::string(stats::effect_label_name(
                cmp.effect.label));
            row.d_shown = row.p <= 0.05;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::string render_comparison_text(const ComparisonReport& r) {
    std::ostringstream os;
    os << "comparison: " << r.name_a << " (" << r.workbooks_a
       << " workbooks) vs " << r.name_b << " (" << r.workbooks_b
       << " workbooks)\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "  %-62s %6s %6s %8s %7s %8s %11s %7s\n", "metric", "n_a",
                  "n_b", "p-value", "band", "d", "effect", "method");
    os << buf;
    for (const auto& row : r.rows) {
        std::string label = row.id + " " + row.label;
        if (!row.computed) {
            std::snprintf(buf, sizeof(buf),
                          "  %-62s %6zu %6zu %8s %7s %8s %11s %7s\n",
                          label.c_str(), row.n_a, row.n_b, "-", "n/a", "-",
                          "-", "-");
            os << buf;
            continue;
        }
        std::snprintf(buf, sizeof(buf),
                      "  %-62s %6zu %6zu %8s %7s %8s %11s %7s\n",
                      label.c_str(), row.n_a, row.n_b,
                      format_p(row.p).c_str(), row.band.c_str(),
                      row.d_shown ? format_d(row.d).c_str() : "",
                      row.d_shown ? row.effect.c_str() : "",
                      row.method.c_str());
        os << buf;
    }
    os << "\npercentages\n";
    auto pct_row = [&](const char* label, double pa, double pb) {
        std::snprintf(buf, sizeof(buf), "  %-62s %8s %8s\n", label,
                      format_pct1(pa).c_str(), format_pct1(pb).c_str());
        os << buf;
    };
    pct_row("c1 spreadsheets linked to other spreadsheets", r.pct_a.c1,
            r.pct_b.c1);
    pct_row("c3 spreadsheets with inter-worksheet connections", r.pct_a.c3,
            r.pct_b.c3);
    pct_row("c5 passing cells (share of formulas)", r.pct_a.c5, r.pct_b.c5);
    return os.str();
}

std::string render_comparison_json(const ComparisonReport& r) {
    json j;
    j["a"] = {{"name", r.name_a}, {"workbooks", r.workbooks_a}};
    j["b"] = {{"name", r.name_b}, {"workbooks", r.workbooks_b}};
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr;
        jr["id"] = row.id;
        jr["label"] = row.label;
        jr["n_a"] = row.n_a;
        jr["n_b"] = row.n_b;
        jr["computed"] = row.computed;
        if (row.computed) {
            jr["p"] = row.p;
            jr["band"] = row.band;
            jr["method"] = row.method;
            if (row.d_shown) {
                jr["d"] = row.d;
                jr["effect"] = row.effect;
            }
        }
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    j["percentages"] = {
        {"c1", {{"a", r.pct_a.c1}, {"b", r.pct_b.c1}}},
        {"c3", {{"a", r.pct_a.c3}, {"b", r.pct_b.c3}}},
        {"c5_of_formulas", {{"a", r.pct_a.c5}, {"b", r.pct_b.c5}}},
    };
    return j.dump(2) + "\n";
}

std::string render_functions_text(const std::vector<MetricRecord>& records,
                                  const FunctionCatalog& catalog, int n) {
    UniqueFormulaPool pool = pool_unique_formulas(records, catalog);
    TopFunctions top =
        top_functions(pool.occurrences, pool.function_sets, catalog, n);
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "  %4s %-24s %12s %10s %10s\n", "rank",
                  "function", "occurrences", "occ-share", "formulas");
    os << buf;
    for (std::size_t i = 0; i < top.ranked.size(); ++i) {
        const auto& rf = top.ranked[i];
        const double share =
            top.total_occurrences > 0
                ? static_cast<double>(rf.occurrences) /
                      static_cast<double>(top.total_occurrences)
                : 0.0;
        std::snprintf(buf, sizeof(buf), "  %4zu %-24s %12lld %10s %10lld\n",
                      i + 1, rf.name.c_str(), rf.occurrences,
                      format_pct1(share).c_str(), rf.formulas);
        os << buf;
    }
    os << "  top-" << top.ranked.size()
       << " coverage: " << format_pct1(top.occurrence_coverage)
       << " of occurrences, " << format_pct1(top.formula_coverage)
       << " of unique formulas with functions\n";
    return os.str();
}

std::string render_functions_json(const std::vector<MetricRecord>& records,
                                  const FunctionCatalog& catalog, int n) {
    UniqueFormulaPool pool = pool_unique_formulas(records, catalog);
    TopFunctions top =
        top_functions(pool.occurrences, pool.function_sets, catalog, n);
    json j;
    json ranked = json::array();
    for (const auto& rf : top.ranked) {
        ranked.push_back({{"name", rf.name},
                          {"occurrences", rf.occurrences},
                          {"formulas", rf.formulas}});
    }
    j["ranked"] = std::move(ranked);
    j["total_occurrences"] = top.total_occurrences;
    j["total_formulas"] = top.total_formulas;
    j["occurrence_coverage"] = top.occurrence_coverage;
    j["formula_coverage"] = top.formula_coverage;
    return j.dump(2) + "\n";
}

}  // namespace sheetscan
