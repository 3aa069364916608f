#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sheetscan/formula.hpp"

namespace sheetscan {

// Microsoft's function categories plus the two synthetic ones used by
// the reports (Operator for bare operators, Udf for unknown names).
extern const std::vector<std::string> kFunctionCategories;

inline constexpr const char* kOperatorCategory = "Operator";
inline constexpr const char* kUdfCategory = "Udf";

class FunctionCatalog {
public:
    // Loads a UTF-8 "name,category" CSV. Names are uppercased; a row
    // with an unknown category or a duplicate name is a FormatError.
    static FunctionCatalog load_csv_file(const std::string& path);
    static FunctionCatalog load_csv(std::string_view text);

    // Category of an uppercase function name; "Udf" when unknown.
    const std::string& classify(const std::string& name) const;

    bool is_builtin(const std::string& name) const {
        return entries_.count(name) > 0;
    }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, std::string> entries_;
};

// Fraction of unique formulas that contain at least one element of each
// category. A formula can count toward several categories; "Operator"
// fires iff the formula has any Binary/Unary/Percent node.
std::map<std::string, double> category_usage(
    const std::vector<std::set<std::string>>& category_sets);

// Builds the category set of one parsed formula.
std::set<std::string> formula_categories(const FormulaTree& tree,
                                         const FunctionCatalog& catalog);

struct RankedFunction {
    std::string name;
    long long occurrences = 0;
    // Unique formulas (among those with >= 1 built-in) containing it.
    long long formulas = 0;
};

struct TopFunctions {
    std::vector<RankedFunction> ranked;      // top n
    long long total_occurrences = 0;         // all built-ins
    long long total_formulas = 0;            // unique formulas w/ builtin
    double occurrence_coverage = 0;          // top-n occurrences share
    double formula_coverage = 0;             // formulas containing any top-n
};

// Ranks built-in functions by occurrence count over the unique formulas
// of a corpus. occurrence_counts maps name -> occurrences; formula_sets
// holds the function-name sets of unique formulas with >= 1 built-in.
// Ties break ascending by name. n < 1 is an invalid_argument.
TopFunctions top_functions(
    const std::map<std::string, long long>& occurrence_counts,
    const std::vector<std::set<std::string>>& formula_sets,
    const FunctionCatalog& catalog, int n);

}  // namespace sheetscan
