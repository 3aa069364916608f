#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sheetscan/cellref.hpp"

namespace sheetscan {

enum class BinaryOp { Add, Sub, Mul, Div, Pow, Concat, Eq, Ne, Lt, Gt, Le, Ge };

std::string_view binary_op_token(BinaryOp op);

struct Node;
using NodePtr = std::unique_ptr<Node>;

struct NumberLit {
    double value = 0;
};
struct TextLit {
    std::string value;
};
struct BoolLit {
    bool value = false;
};
struct ErrorLit {
    std::string code;  // canonical uppercase, e.g. "#REF!"
};

// One corner of a reference. For column bands row/row_abs are unused,
// for row bands col/col_abs are unused.
struct RefAnchor {
    int col = 0;
    bool col_abs = false;
    int row = 0;
    bool row_abs = false;

    bool operator==(const RefAnchor&) const = default;
};

struct RefExpr {
    enum class Axis { cell, col_band, row_band };

    std::optional<std::string> workbook_token;  // "[50]" verbatim, brackets kept
    std::optional<std::string> sheet_name;      // unquoted content, case kept
    Axis axis = Axis::cell;
    bool is_range = false;
    RefAnchor first;
    RefAnchor second;  // meaningful iff is_range

    bool single_cell() const { return !is_range && axis == Axis::cell; }
};

// A defined name used as an atom. Parsed so the formula still counts in
// formula-level metrics, but never resolvable to cells.
struct NameRef {
    std::string name;
};

struct Paren {
    NodePtr child;
};
struct Unary {
    char op = '-';  // '-' or '+'
    NodePtr child;
};
struct Percent {
    NodePtr child;
};
struct Binary {
    BinaryOp op = BinaryOp::Add;
    NodePtr left;
    NodePtr right;
};
struct Call {
    std::string name;  // uppercase, matches [A-Z][A-Z0-9._]*
    std::vector<NodePtr> args;
};
struct MissingArg {};

using NodeVariant =
    std::variant<NumberLit, TextLit, BoolLit, ErrorLit, RefExpr, NameRef,
                 Paren, Unary, Percent, Binary, Call, MissingArg>;

struct Node {
    NodeVariant v;
};

struct FormulaTree {
    NodePtr root;
    std::string source_text;  // without the leading '='

    long long length_chars() const {
        return static_cast<long long>(source_text.size());
    }
};

// Parses formula text (leading '=' already stripped). Throws ParseError
// with the failing position.
FormulaTree parse_formula(std::string_view text);

// nullopt instead of ParseError; other exceptions propagate.
std::optional<FormulaTree> try_parse_formula(std::string_view text);

// Number of nodes on the longest root-to-leaf path. Paren counts.
int parse_tree_depth(const Node& node);
int parse_tree_depth(const FormulaTree& tree);

// Canonical A1-style serialization: uppercase function names, no
// whitespace, shortest round-trip numbers, sheet quoting only as needed.
std::string to_a1(const FormulaTree& tree);
std::string to_a1(const Node& node);

// Canonical relative-R1C1 serialization against the host cell. Identical
// for all copies of a formula made by filling down/right.
std::string to_relative_r1c1(const FormulaTree& tree, RowCol origin);

struct UniqueFormulaKey {
    int sheet_index = 0;
    std::string r1c1;

    auto operator<=>(const UniqueFormulaKey&) const = default;
};

UniqueFormulaKey unique_formula_key(const FormulaTree& tree,
                                    const CellAddress& origin);

// All Call names with multiplicity (user-defined names included).
std::map<std::string, int> extract_function_names(const Node& node);
std::map<std::string, int> extract_function_names(const FormulaTree& tree);

// Distinct Call names in the tree; 0 iff the formula has no Call node.
int unique_function_count(const Node& node);

// True iff any Binary, Unary or Percent node is present.
bool contains_operator(const Node& node);

// True iff the tree is a single-cell reference, possibly wrapped in
// parentheses. Sheet and workbook qualifiers are allowed.
bool is_passing(const FormulaTree& tree);

// Shifts every relative reference coordinate by (dr, dc). Returns false
// and leaves the tree unspecified if a coordinate would leave the sheet.
bool shift_relative_refs(Node& node, int dr, int dc);

NodePtr clone_node(const Node& node);
bool nodes_equal(const Node& a, const Node& b);

// Preorder visit of every reference in the tree.
void for_each_ref(const Node& node,
                  const std::function<void(const RefExpr&)>& fn);

}  // namespace sheetscan
