#include <algorithm>
#include <cctype>
#include <charconv>

#include "sheetscan/formula.hpp"
#include "sheetscan/workbook.hpp"

namespace sheetscan {

std::string_view binary_op_token(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Pow: return "^";
        case BinaryOp::Concat: return "&";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "<>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Ge: return ">=";
    }
    return "?";
}

namespace {

std::string format_number(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string escape_text_literal(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

bool ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}
bool ident_cont(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c >= 0x80;
}

// A sheet name can go unquoted only when it lexes back as one plain
// identifier token ('$' excluded on purpose).
bool sheet_needs_quoting(const std::string& name) {
    if (name.empty()) return true;
    if (!ident_start(static_cast<unsigned char>(name[0]))) return true;
    for (char c : name) {
        if (!ident_cont(static_cast<unsigned char>(c))) return true;
    }
    return false;
}

std::string quoted_sheet(const std::string& name) {
    std::string out = "'";
    for (char c : name) {
        if (c == '\'') out += "''";
        else out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

std::string ref_prefix(const RefExpr& ref, bool uppercase_sheet) {
    std::string out;
    std::string sheet =
        ref.sheet_name ? (uppercase_sheet ? ascii_upper(*ref.sheet_name)
                                          : *ref.sheet_name)
                       : std::string();
    if (ref.workbook_token && ref.sheet_name &&
        sheet_needs_quoting(sheet)) {
        // Quoted form wraps workbook token and sheet together.
        std::string inner = *ref.workbook_token + sheet;
        out += quoted_sheet(inner);
        out.push_back('!');
        return out;
    }
    if (ref.workbook_token) out += *ref.workbook_token;
    if (ref.sheet_name) {
        out += sheet_needs_quoting(sheet) ? quoted_sheet(sheet) : sheet;
        out.push_back('!');
    }
    return out;
}

std::string anchor_a1(const RefExpr& ref, const RefAnchor& a) {
    std::string out;
    if (ref.axis != RefExpr::Axis::row_band) {
        if (a.col_abs) out.push_back('$');
        out += col_to_letters(a.col);
    }
    if (ref.axis != RefExpr::Axis::col_band) {
        if (a.row_abs) out.push_back('$');
        out += std::to_string(a.row);
    }
    return out;
}

std::string ref_to_a1(const RefExpr& ref) {
    std::string out = ref_prefix(ref, false);
    out += anchor_a1(ref, ref.first);
    if (ref.is_range) {
        out.push_back(':');
        out += anchor_a1(ref, ref.second);
    }
    return out;
}

// One axis component of an R1C1 reference: either an absolute coordinate
// or an offset from the origin. Both survive copying unchanged, so the
// canonical ordering below makes range keys independent of which corner
// the parser stored first.
struct AxisComp {
    bool is_abs = false;
    int value = 0;  // absolute coordinate, or delta from origin

    std::string print(char letter) const {
        if (is_abs) return letter + std::to_string(value);
        if (value == 0) return std::string(1, letter);
        return letter + ("[" + std::to_string(value) + "]");
    }
    bool operator==(const AxisComp&) const = default;
};

bool axis_less(const AxisComp& a, const AxisComp& b) {
    if (a.is_abs != b.is_abs) return a.is_abs;  // absolute first
    return a.value < b.value;
}

AxisComp row_comp(const RefAnchor& a, RowCol origin) {
    return a.row_abs ? AxisComp{true, a.row}
                     : AxisComp{false, a.row - origin.row};
}
AxisComp col_comp(const RefAnchor& a, RowCol origin) {
    return a.col_abs ? AxisComp{true, a.col}
                     : AxisComp{false, a.col - origin.col};
}

std::string ref_to_r1c1(const RefExpr& ref, RowCol origin) {
    std::string out = ref_prefix(ref, true);
    const bool rows = ref.axis != RefExpr::Axis::col_band;
    const bool cols = ref.axis != RefExpr::Axis::row_band;
    if (!ref.is_range) {
        if (rows) out += row_comp(ref.first, origin).print('R');
        if (cols) out += col_comp(ref.first, origin).print('C');
        return out;
    }
    AxisComp r1, r2, c1, c2;
    if (rows) {
        r1 = row_comp(ref.first, origin);
        r2 = row_comp(ref.second, origin);
        if (axis_less(r2, r1)) std::swap(r1, r2);
    }
    if (cols) {
        c1 = col_comp(ref.first, origin);
        c2 = col_comp(ref.second, origin);
        if (axis_less(c2, c1)) std::swap(c1, c2);
    }
    std::string first;
    std::string second;
    if (rows) {
        first += r1.print('R');
        second += r2.print('R');
    }
    if (cols) {
        first += c1.print('C');
        second += c2.print('C');
    }
    // Bands with identical corners print once, the way R1C1 shows B:B as
    // a single C part.
    if (ref.axis != RefExpr::Axis::cell && first == second) {
        return out + first;
    }
    return out + first + ":" + second;
}

struct SerializeCtx {
    bool r1c1 = false;
    RowCol origin;
};

void serialize(const Node& node, const SerializeCtx& ctx, std::string& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, NumberLit>) {
                out += format_number(n.value);
            } else if constexpr (std::is_same_v<T, TextLit>) {
                out += escape_text_literal(n.value);
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                out += n.value ? "TRUE" : "FALSE";
            } else if constexpr (std::is_same_v<T, ErrorLit>) {
                out += n.code;
            } else if constexpr (std::is_same_v<T, RefExpr>) {
                out += ctx.r1c1 ? ref_to_r1c1(n, ctx.origin) : ref_to_a1(n);
            } else if constexpr (std::is_same_v<T, NameRef>) {
                out += n.name;
            } else if constexpr (std::is_same_v<T, Paren>) {
                out.push_back('(');
                serialize(*n.child, ctx, out);
                out.push_back(')');
            } else if constexpr (std::is_same_v<T, Unary>) {
                out.push_back(n.op);
                serialize(*n.child, ctx, out);
            } else if constexpr (std::is_same_v<T, Percent>) {
                serialize(*n.child, ctx, out);
                out.push_back('%');
            } else if constexpr (std::is_same_v<T, Binary>) {
                serialize(*n.left, ctx, out);
                out += binary_op_token(n.op);
                serialize(*n.right, ctx, out);
            } else if constexpr (std::is_same_v<T, Call>) {
                out += n.name;
                out.push_back('(');
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i) out.push_back(',');
                    serialize(*n.args[i], ctx, out);
                }
                out.push_back(')');
            } else if constexpr (std::is_same_v<T, MissingArg>) {
                // nothing between the commas
            }
        },
        node.v);
}

}  // namespace

std::string to_a1(const Node& node) {
    std::string out;
    serialize(node, SerializeCtx{}, out);
    return out;
}

std::string to_a1(const FormulaTree& tree) { return to_a1(*tree.root); }

std::string to_relative_r1c1(const FormulaTree& tree, RowCol origin) {
    std::string out;
    serialize(*tree.root, SerializeCtx{true, origin}, out);
    return out;
}

UniqueFormulaKey unique_formula_key(const FormulaTree& tree,
                                    const CellAddress& origin) {
    return UniqueFormulaKey{origin.sheet_index,
                            to_relative_r1c1(tree, {origin.row, origin.col})};
}

int parse_tree_depth(const Node& node) {
    return std::visit(
        [](const auto& n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Paren> ||
                          std::is_same_v<T, Unary> ||
                          std::is_same_v<T, Percent>) {
                return 1 + parse_tree_depth(*n.child);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return 1 + std::max(parse_tree_depth(*n.left),
                                    parse_tree_depth(*n.right));
            } else if constexpr (std::is_same_v<T, Call>) {
                int deepest = 0;
                for (const auto& a : n.args) {
                    deepest = std::max(deepest, parse_tree_depth(*a));
                }
                return 1 + deepest;
            } else {
                return 1;
            }
        },
        node.v);
}

int parse_tree_depth(const FormulaTree& tree) {
    return parse_tree_depth(*tree.root);
}

namespace {

void walk(const Node& node, const std::function<void(const Node&)>& fn) {
    fn(node);
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Paren> ||
                          std::is_same_v<T, Unary> ||
                          std::is_same_v<T, Percent>) {
                walk(*n.child, fn);
            } else if constexpr (std::is_same_v<T, Binary>) {
                walk(*n.left, fn);
                walk(*n.right, fn);
            } else if constexpr (std::is_same_v<T, Call>) {
                for (const auto& a : n.args) walk(*a, fn);
            }
        },
        node.v);
}

}  // namespace

std::map<std::string, int> extract_function_names(const Node& node) {
    std::map<std::string, int> names;
    walk(node, [&](const Node& n) {
        if (const auto* call = std::get_if<Call>(&n.v)) {
            ++names[call->name];
        }
    });
    return names;
}

std::map<std::string, int> extract_function_names(const FormulaTree& tree) {
    return extract_function_names(*tree.root);
}

int unique_function_count(const Node& node) {
    return static_cast<int>(extract_function_names(node).size());
}

bool contains_operator(const Node& node) {
    bool found = false;
    walk(node, [&](const Node& n) {
        if (std::holds_alternative<Binary>(n.v) ||
            std::holds_alternative<Unary>(n.v) ||
            std::holds_alternative<Percent>(n.v)) {
            found = true;
        }
    });
    return found;
}

bool is_passing(const FormulaTree& tree) {
    const Node* node = tree.root.get();
    while (const auto* paren = std::get_if<Paren>(&node->v)) {
        node = paren->child.get();
    }
    const auto* ref = std::get_if<RefExpr>(&node->v);
    return ref != nullptr && ref->single_cell();
}

bool shift_relative_refs(Node& node, int dr, int dc) {
    bool ok = true;
    auto shift_anchor = [&](RefExpr& ref, RefAnchor& a) {
        if (ref.axis != RefExpr::Axis::row_band && !a.col_abs) {
            a.col += dc;
            if (a.col < 1 || a.col > kMaxCol) ok = false;
        }
        if (ref.axis != RefExpr::Axis::col_band && !a.row_abs) {
            a.row += dr;
            if (a.row < 1 || a.row > kMaxRow) ok = false;
        }
    };
    std::visit(
        [&](auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, RefExpr>) {
                shift_anchor(n, n.first);
                if (n.is_range) shift_anchor(n, n.second);
            } else if constexpr (std::is_same_v<T, Paren> ||
                                 std::is_same_v<T, Unary> ||
                                 std::is_same_v<T, Percent>) {
                ok = shift_relative_refs(*n.child, dr, dc) && ok;
            } else if constexpr (std::is_same_v<T, Binary>) {
                ok = shift_relative_refs(*n.left, dr, dc) && ok;
                ok = shift_relative_refs(*n.right, dr, dc) && ok;
            } else if constexpr (std::is_same_v<T, Call>) {
                for (auto& a : n.args) {
                    ok = shift_relative_refs(*a, dr, dc) && ok;
                }
            }
        },
        node.v);
    return ok;
}

NodePtr clone_node(const Node& node) {
    auto out = std::make_unique<Node>();
    out->v = std::visit(
        [](const auto& n) -> NodeVariant {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Paren>) {
                return Paren{clone_node(*n.child)};
            } else if constexpr (std::is_same_v<T, Unary>) {
                return Unary{n.op, clone_node(*n.child)};
            } else if constexpr (std::is_same_v<T, Percent>) {
                return Percent{clone_node(*n.child)};
            } else if constexpr (std::is_same_v<T, Binary>) {
                return Binary{n.op, clone_node(*n.left),
                              clone_node(*n.right)};
            } else if constexpr (std::is_same_v<T, Call>) {
                Call c;
                c.name = n.name;
                for (const auto& a : n.args) c.args.push_back(clone_node(*a));
                return c;
            } else {
                return n;
            }
        },
        node.v);
    return out;
}

bool nodes_equal(const Node& a, const Node& b) {
    if (a.v.index() != b.v.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.v);
            if constexpr (std::is_same_v<T, NumberLit>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, TextLit>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, ErrorLit>) {
                return x.code == y.code;
            } else if constexpr (std::is_same_v<T, RefExpr>) {
                return x.workbook_token == y.workbook_token &&
                       x.sheet_name == y.sheet_name && x.axis == y.axis &&
                       x.is_range == y.is_range && x.first == y.first &&
                       (!x.is_range || x.second == y.second);
            } else if constexpr (std::is_same_v<T, NameRef>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, Paren>) {
                return nodes_equal(*x.child, *y.child);
            } else if constexpr (std::is_same_v<T, Unary>) {
                return x.op == y.op && nodes_equal(*x.child, *y.child);
            } else if constexpr (std::is_same_v<T, Percent>) {
                return nodes_equal(*x.child, *y.child);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && nodes_equal(*x.left, *y.left) &&
                       nodes_equal(*x.right, *y.right);
            } else if constexpr (std::is_same_v<T, Call>) {
                if (x.name != y.name || x.args.size() != y.args.size()) {
                    return false;
                }
                for (std::size_t i = 0; i < x.args.size(); ++i) {
                    if (!nodes_equal(*x.args[i], *y.args[i])) return false;
                }
                return true;
            } else {
                return true;  // MissingArg
            }
        },
        a.v);
}

void for_each_ref(const Node& node,
                  const std::function<void(const RefExpr&)>& fn) {
    walk(node, [&](const Node& n) {
        if (const auto* ref = std::get_if<RefExpr>(&n.v)) fn(*ref);
    });
}

}  // namespace sheetscan
