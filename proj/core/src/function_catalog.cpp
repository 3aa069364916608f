#include "sheetscan/function_catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sheetscan/errors.hpp"
#include "sheetscan/workbook.hpp"

namespace sheetscan {

const std::vector<std::string> kFunctionCategories = {
    "Math and trigonometry",
    "Logical",
    "Lookup and reference",
    "Statistical",
    "Date and time",
    "Text",
    "Information",
    "Database",
    "Financial",
    "Engineering",
    "Compatibility",
    "Web",
    "Cube",
    "Operator",
    "Udf",
};

FunctionCatalog FunctionCatalog::load_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open function catalog '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_csv(buf.str());
}

FunctionCatalog FunctionCatalog::load_csv(std::string_view text) {
    FunctionCatalog catalog;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, eol == std::string_view::npos ? text.size() - pos
                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string_view::npos) {
            throw FormatError("catalog line " + std::to_string(line_no) +
                              ": expected name,category");
        }
        std::string name = ascii_upper(line.substr(0, comma));
        std::string category(line.substr(comma + 1));
        if (name.empty()) {
            throw FormatError("catalog line " + std::to_string(line_no) +
                              ": empty function name");
        }
        bool known = false;
        for (const auto& c : kFunctionCategories) {
            if (c == category && category != kOperatorCategory &&
                category != kUdfCategory) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw FormatError("catalog line " + std::to_string(line_no) +
                              ": unknown category '" + category + "'");
        }
        auto [it, inserted] =
            catalog.entries_.emplace(std::move(name), std::move(category));
        if (!inserted) {
            throw FormatError("catalog line " + std::to_string(line_no) +
                              ": duplicate function '" + it->first + "'");
        }
    }
    return catalog;
}

const std::string& FunctionCatalog::classify(const std::string& name) const {
    static const std::string kUdf = kUdfCategory;
    auto it = entries_.find(name);
    return it == entries_.end() ? kUdf : it->second;
}

std::set<std::string> formula_categories(const FormulaTree& tree,
                                         const FunctionCatalog& catalog) {
    std::set<std::string> out;
    if (contains_operator(*tree.root)) {
        out.insert(kOperatorCategory);
    }
    for (const auto& [name, count] : extract_function_names(tree)) {
        out.insert(catalog.classify(name));
    }
    return out;
}

std::map<std::string, double> category_usage(
    const std::vector<std::set<std::string>>& category_sets) {
    std::map<std::string, double> out;
    for (const auto& c : kFunctionCategories) out[c] = 0.0;
    if (category_sets.empty()) return out;
    for (const auto& set : category_sets) {
        for (const auto& c : set) out[c] += 1.0;
    }
    const double total = static_cast<double>(category_sets.size());
    for (auto& [c, v] : out) v /= total;
    return out;
}

TopFunctions top_functions(
    const std::map<std::string, long long>& occurrence_counts,
    const std::vector<std::set<std::string>>& formula_sets,
    const FunctionCatalog& catalog, int n) {
    if (n < 1) {
        throw std::invalid_argument("top_functions: n must be >= 1");
    }
    TopFunctions out;
    std::vector<RankedFunction> all;
    for (const auto& [name, count] : occurrence_counts) {
        if (!catalog.is_builtin(name)) continue;
        RankedFunction rf;
        rf.name = name;
        rf.occurrences = count;
        for (const auto& set : formula_sets) {
            if (set.count(name)) ++rf.formulas;
        }
        out.total_occurrences += count;
        all.push_back(std::move(rf));
    }
    out.total_formulas = static_cast<long long>(formula_sets.size());
    std::sort(all.begin(), all.end(),
              [](const RankedFunction& a, const RankedFunction& b) {
                  if (a.occurrences != b.occurrences) {
                      return a.occurrences > b.occurrences;
                  }
                  return a.name < b.name;
              });
    if (static_cast<int>(all.size()) > n) all.resize(n);
    out.ranked = std::move(all);

    long long top_occ = 0;
    for (const auto& rf : out.ranked) top_occ += rf.occurrences;
    out.occurrence_coverage =
        out.total_occurrences > 0
            ? static_cast<double>(top_occ) /
                  static_cast<double>(out.total_occurrences)
            : 0.0;

    long long covered = 0;
    for (const auto& set : formula_sets) {
        for (const auto& rf : out.ranked) {
            if (set.count(rf.name)) {
                ++covered;
                break;
            }
        }
    }
    out.formula_coverage =
        out.total_formulas > 0
            ? static_cast<double>(covered) /
                  static_cast<double>(out.total_formulas)
            : 0.0;
    return out;
}

}  // namespace sheetscan
