#include <doctest.h>

#include <random>

#include "sheetscan/errors.hpp"
#include "sheetscan/formula.hpp"

using namespace sheetscan;

namespace {

const RefExpr& ref_of(const Node& n) {
    REQUIRE(std::holds_alternative<RefExpr>(n.v));
    return std::get<RefExpr>(n.v);
}

}  // namespace

TEST_CASE("D9+E9 parses to a plus over two refs") {
    auto tree = parse_formula("D9+E9");
    const auto& bin = std::get<Binary>(tree.root->v);
    CHECK(bin.op == BinaryOp::Add);
    const auto& left = ref_of(*bin.left);
    CHECK(left.first.col == 4);
    CHECK(left.first.row == 9);
    CHECK(!left.first.col_abs);
    const auto& right = ref_of(*bin.right);
    CHECK(right.first.col == 5);
    CHECK(right.first.row == 9);
    CHECK(parse_tree_depth(tree) == 2);
}

TEST_CASE("the big VLOOKUP formula parses with workbook token") {
    auto tree = parse_formula("VLOOKUP(B51,[50]jan98!$A$34:$IV$84,3,0)");
    const auto& call = std::get<Call>(tree.root->v);
    CHECK(call.name == "VLOOKUP");
    REQUIRE(call.args.size() == 4);
    const auto& lookup = ref_of(*call.args[0]);
    CHECK(lookup.single_cell());
    CHECK(lookup.first.col == 2);
    CHECK(lookup.first.row == 51);
    const auto& range = ref_of(*call.args[1]);
    REQUIRE(range.workbook_token.has_value());
    CHECK(*range.workbook_token == "[50]");
    REQUIRE(range.sheet_name.has_value());
    CHECK(*range.sheet_name == "jan98");
    CHECK(range.is_range);
    CHECK(range.first.col == 1);
    CHECK(range.first.col_abs);
    CHECK(range.first.row == 34);
    CHECK(range.first.row_abs);
    CHECK(range.second.col == 256);
    CHECK(range.second.row == 84);
    CHECK(std::get<NumberLit>(call.args[2]->v).value == 3.0);
    CHECK(std::get<NumberLit>(call.args[3]->v).value == 0.0);
}

TEST_CASE("parse tree depth anchors") {
    CHECK(parse_tree_depth(parse_formula("D9+E9")) == 2);
    CHECK(parse_tree_depth(parse_formula("(B5-T5)/(B6*SQRT(4))")) == 5);
    CHECK(parse_tree_depth(parse_formula("7")) == 1);
}

TEST_CASE("paren is a real node") {
    auto plain = parse_formula("A1+B1");
    auto wrapped = parse_formula("(A1+B1)");
    CHECK(parse_tree_depth(wrapped) == parse_tree_depth(plain) + 1);
    auto doubled = parse_formula("((A1+B1))");
    CHECK(parse_tree_depth(doubled) == parse_tree_depth(plain) + 2);
}

TEST_CASE("operator precedence and associativity") {
    // comparisons < & < additive < multiplicative < ^ < % < unary sign
    CHECK(to_a1(parse_formula("1+2*3")) == "1+2*3");
    auto cmp = parse_formula("A1>B1&\"x\"");
    CHECK(std::get<Binary>(cmp.root->v).op == BinaryOp::Gt);
    auto pow = parse_formula("2^3^2");
    const auto& outer = std::get<Binary>(pow.root->v);
    CHECK(outer.op == BinaryOp::Pow);  // (2^3)^2, left to right
    CHECK(std::get<NumberLit>(outer.right->v).value == 2.0);
    CHECK(std::holds_alternative<Binary>(outer.left->v));
    // unary binds tighter than ^
    auto neg = parse_formula("-2^2");
    const auto& nb = std::get<Binary>(neg.root->v);
    CHECK(nb.op == BinaryOp::Pow);
    CHECK(std::holds_alternative<Unary>(nb.left->v));
    // percent applies outside the sign
    auto pct = parse_formula("-50%");
    CHECK(std::holds_alternative<Percent>(pct.root->v));
}

TEST_CASE("literals") {
    CHECK(std::get<NumberLit>(parse_formula(".5").root->v).value == 0.5);
    CHECK(std::get<NumberLit>(parse_formula("1.5E-2").root->v).value ==
          doctest::Approx(0.015));
    CHECK(std::get<BoolLit>(parse_formula("TRUE").root->v).value);
    CHECK(!std::get<BoolLit>(parse_formula("false").root->v).value);
    CHECK(std::get<TextLit>(parse_formula("\"a\"\"b\"").root->v).value ==
          "a\"b");
    CHECK(std::get<ErrorLit>(parse_formula("#N/A").root->v).code == "#N/A");
    CHECK(std::get<ErrorLit>(parse_formula("#ref!").root->v).code ==
          "#REF!");
    // TRUE( is the function, not the literal
    CHECK(std::get<Call>(parse_formula("TRUE()").root->v).name == "TRUE");
}

TEST_CASE("reference forms") {
    auto abs = ref_of(*parse_formula("$A$1").root);
    CHECK(abs.first.col_abs);
    CHECK(abs.first.row_abs);
    auto mixed = ref_of(*parse_formula("A$1").root);
    CHECK(!mixed.first.col_abs);
    CHECK(mixed.first.row_abs);
    // sheet qualification, quoted and unquoted
    auto sheet = ref_of(*parse_formula("Sheet2!B3").root);
    CHECK(*sheet.sheet_name == "Sheet2");
    auto quoted = ref_of(*parse_formula("'My Sheet'!B3").root);
    CHECK(*quoted.sheet_name == "My Sheet");
    auto escaped = ref_of(*parse_formula("'It''s'!B3").root);
    CHECK(*escaped.sheet_name == "It's");
    // range corners normalize
    auto range = ref_of(*parse_formula("B2:A1").root);
    CHECK(range.first.col == 1);
    CHECK(range.first.row == 1);
    CHECK(range.second.col == 2);
    CHECK(range.second.row == 2);
    // A1:A1 collapses to a single cell
    auto collapsed = ref_of(*parse_formula("A1:A1").root);
    CHECK(collapsed.single_cell());
    // whole-column and whole-row bands
    auto col_band = ref_of(*parse_formula("B:B").root);
    CHECK(col_band.axis == RefExpr::Axis::col_band);
    CHECK(col_band.first.col == 2);
    auto col_band2 = ref_of(*parse_formula("$B:D").root);
    CHECK(col_band2.first.col_abs);
    CHECK(col_band2.second.col == 4);
    auto sum_tree = parse_formula("SUM(1:3)");
    const auto& sum = std::get<Call>(sum_tree.root->v);
    const auto& row_band = ref_of(*sum.args[0]);
    CHECK(row_band.axis == RefExpr::Axis::row_band);
    CHECK(row_band.first.row == 1);
    CHECK(row_band.second.row == 3);
}

TEST_CASE("defined names parse as name atoms") {
    auto tree = parse_formula("MyName+1");
    const auto& bin = std::get<Binary>(tree.root->v);
    CHECK(std::get<NameRef>(bin.left->v).name == "MyName");
}

TEST_CASE("call argument shapes") {
    CHECK(std::get<Call>(parse_formula("NOW()").root->v).args.empty());
    auto t1 = parse_formula("IF(A1,,2)");
    const auto& with_missing = std::get<Call>(t1.root->v);
    REQUIRE(with_missing.args.size() == 3);
    CHECK(std::holds_alternative<MissingArg>(with_missing.args[1]->v));
    auto t2 = parse_formula("F(1,)");
    const auto& trailing = std::get<Call>(t2.root->v);
    REQUIRE(trailing.args.size() == 2);
    CHECK(std::holds_alternative<MissingArg>(trailing.args[1]->v));
    CHECK(std::get<Call>(parse_formula("SUM.IF(A1)").root->v).name ==
          "SUM.IF");
}

TEST_CASE("parse failures carry positions") {
    CHECK_THROWS_AS(parse_formula(""), ParseError);
    CHECK_THROWS_AS(parse_formula("1+"), ParseError);
    CHECK_THROWS_AS(parse_formula("(1"), ParseError);
    CHECK_THROWS_AS(parse_formula("\"unterminated"), ParseError);
    CHECK_THROWS_AS(parse_formula("#WHAT!"), ParseError);
    // space-as-intersection and comma-union are syntax errors
    CHECK_THROWS_AS(parse_formula("A1 B2"), ParseError);
    CHECK_THROWS_AS(parse_formula("(A1,B2)"), ParseError);
    // structured table references have a distinct diagnostic
    try {
        parse_formula("Table1[Col]");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("structured table") !=
              std::string::npos);
    }
    try {
        parse_formula("1+?");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() == 2);
    }
}

TEST_CASE("relative R1C1 anchors") {
    auto a1 = parse_formula("A1");
    CHECK(to_relative_r1c1(a1, RowCol{2, 2}) == "R[-1]C[-1]");
    auto abs = parse_formula("$A$1");
    CHECK(to_relative_r1c1(abs, RowCol{2, 2}) == "R1C1");
    CHECK(to_relative_r1c1(abs, RowCol{950, 3}) == "R1C1");
    auto same = parse_formula("C5");
    CHECK(to_relative_r1c1(same, RowCol{5, 3}) == "RC");
}

TEST_CASE("copy-down keeps the R1C1 string") {
    auto first = parse_formula("A1+B1");
    auto second = parse_formula("A2+B2");
    CHECK(to_relative_r1c1(first, RowCol{2, 3}) ==
          to_relative_r1c1(second, RowCol{3, 3}));
}

TEST_CASE("unique keys are scoped per worksheet") {
    auto tree = parse_formula("A1+B1");
    auto k1 = unique_formula_key(tree, CellAddress{0, 2, 3});
    auto k2 = unique_formula_key(tree, CellAddress{1, 2, 3});
    CHECK(k1.r1c1 == k2.r1c1);
    CHECK(k1 != k2);
}

TEST_CASE("R1C1 canonicalizes sheet case and keeps workbook tokens") {
    auto tree = parse_formula("[50]jan98!$A$34+sheet2!B2");
    std::string out = to_relative_r1c1(tree, RowCol{1, 1});
    CHECK(out == "[50]JAN98!R34C1+SHEET2!R[1]C[1]");
}

TEST_CASE("function name extraction") {
    CHECK(extract_function_names(parse_formula("A1+B1")).empty());
    auto counts =
        extract_function_names(parse_formula("IF(SUM(A1:A2)>0,SUM(B1:B2),0)"));
    CHECK(counts.at("IF") == 1);
    CHECK(counts.at("SUM") == 2);
    CHECK(counts.size() == 2);
    CHECK(unique_function_count(
              *parse_formula("IF(SUM(A1:A2)>0,SUM(B1:B2),0)").root) == 2);
    auto vl = extract_function_names(
        parse_formula("VLOOKUP(B51,[50]jan98!$A$34:$IV$84,3,0)"));
    CHECK(vl.size() == 1);
    CHECK(vl.at("VLOOKUP") == 1);
    // lowercase input, uppercase catalog form
    CHECK(extract_function_names(parse_formula("sum(A1)")).count("SUM") == 1);
}

TEST_CASE("is_passing is syntactic") {
    CHECK(is_passing(parse_formula("A1")));
    CHECK(is_passing(parse_formula("(A1)")));
    CHECK(is_passing(parse_formula("((Sheet2!B3))")));
    CHECK(is_passing(parse_formula("[1]Ext!A1")));
    CHECK(!is_passing(parse_formula("A1+0")));
    CHECK(!is_passing(parse_formula("A1:B2")));
    CHECK(!is_passing(parse_formula("B:B")));
    CHECK(!is_passing(parse_formula("-A1")));
    CHECK(!is_passing(parse_formula("SUM(A1)")));
    CHECK(!is_passing(parse_formula("MyName")));
}

TEST_CASE("operators are detected for the Operator category") {
    CHECK(contains_operator(*parse_formula("A1+B1").root));
    CHECK(contains_operator(*parse_formula("-A1").root));
    CHECK(contains_operator(*parse_formula("A1%").root));
    CHECK(contains_operator(*parse_formula("IF(A1>0,1,2)").root));
    CHECK(!contains_operator(*parse_formula("SUM(A1:B2)").root));
    CHECK(!contains_operator(*parse_formula("(A1)").root));
}

TEST_CASE("reparse idempotence over a formula corpus") {
    const char* corpus[] = {
        "D9+E9",
        "VLOOKUP(B51,[50]jan98!$A$34:$IV$84,3,0)",
        "(B5-T5)/(B6*SQRT(4))",
        "IF(SUM(A1:A2)>0,SUM(B1:B2),0)",
        "-2^2%",
        "\"it is \"&TRUE&\"!\"",
        "'My Sheet'!$B2:C$9*3",
        "SUM(B:B)+SUM($1:$4)",
        "A1<=B1",
        "A1<>B1",
        "MyName*2",
        "#REF!+1",
        "IF(X9,,)",
        "NOW()",
        "1.5E-10+.25",
        "--+-5",
        "((A1))",
    };
    for (const char* text : corpus) {
        CAPTURE(text);
        auto tree = parse_formula(text);
        std::string canon = to_a1(tree);
        auto tree2 = parse_formula(canon);
        CHECK(nodes_equal(*tree.root, *tree2.root));
        CHECK(to_a1(tree2) == canon);
        // R1C1 of equal trees from equal origins agrees
        CHECK(to_relative_r1c1(tree, RowCol{7, 7}) ==
              to_relative_r1c1(tree2, RowCol{7, 7}));
    }
}

namespace {

// Random tree generator for the copy-shift property. References stay in
// a window that survives +/-1200 shifts.
struct TreeGen {
    std::mt19937_64 rng;

    int irand(int lo, int hi) {
        return static_cast<int>(rng() % (hi - lo + 1)) + lo;
    }

    NodePtr make(NodeVariant v) {
        auto n = std::make_unique<Node>();
        n->v = std::move(v);
        return n;
    }

    NodePtr ref() {
        RefExpr r;
        if (irand(0, 9) == 0) r.workbook_token = "[7]";
        if (irand(0, 3) == 0) r.sheet_name = "Other";
        r.first.col = irand(1300, 1400);
        r.first.row = irand(2000, 2400);
        r.first.col_abs = irand(0, 1) == 1;
        r.first.row_abs = irand(0, 1) == 1;
        if (irand(0, 2) == 0) {
            r.is_range = true;
            r.second.col = r.first.col + irand(0, 5);
            r.second.row = r.first.row + irand(1, 9);
            r.second.col_abs = irand(0, 1) == 1;
            r.second.row_abs = irand(0, 1) == 1;
        }
        return make(std::move(r));
    }

    NodePtr gen(int depth) {
        if (depth <= 0) {
            switch (irand(0, 3)) {
                case 0: return make(NumberLit{static_cast<double>(irand(0, 99))});
                case 1: return make(TextLit{"t"});
                case 2: return ref();
                default: return ref();
            }
        }
        switch (irand(0, 5)) {
            case 0:
                return make(Binary{static_cast<BinaryOp>(irand(0, 11)),
                                   gen(depth - 1), gen(depth - 1)});
            case 1: return make(Paren{gen(depth - 1)});
            case 2: return make(Unary{irand(0, 1) ? '-' : '+', gen(depth - 1)});
            case 3: return make(Percent{gen(depth - 1)});
            case 4: {
                Call c;
                c.name = "SUM";
                int n = irand(1, 3);
                for (int i = 0; i < n; ++i) c.args.push_back(gen(depth - 1));
                return make(std::move(c));
            }
            default: return ref();
        }
    }
};

}  // namespace

TEST_CASE("copy-shift invariance over random trees") {
    TreeGen gen{std::mt19937_64{20240817}};
    for (int iter = 0; iter < 300; ++iter) {
        FormulaTree tree;
        tree.root = gen.gen(3);
        RowCol origin{gen.irand(1500, 1600), gen.irand(700, 800)};
        std::string base = to_relative_r1c1(tree, origin);
        for (int k = 0; k < 5; ++k) {
            int dr = gen.irand(-1200, 1200);
            int dc = gen.irand(-600, 600);
            FormulaTree shifted;
            shifted.root = clone_node(*tree.root);
            REQUIRE(shift_relative_refs(*shifted.root, dr, dc));
            RowCol moved{origin.row + dr, origin.col + dc};
            CHECK(to_relative_r1c1(shifted, moved) == base);
        }
    }
}

TEST_CASE("paren wrap raises depth by exactly one on random trees") {
    TreeGen gen{std::mt19937_64{424242}};
    for (int iter = 0; iter < 200; ++iter) {
        FormulaTree tree;
        tree.root = gen.gen(gen.irand(0, 3));
        int inner = parse_tree_depth(tree);
        Node wrapped;
        wrapped.v = Paren{clone_node(*tree.root)};
        CHECK(parse_tree_depth(wrapped) == inner + 1);
    }
}

TEST_CASE("unique function count never exceeds the occurrence multiset") {
    const char* corpus[] = {
        "SUM(A1)+SUM(B1)+IF(C1,1,2)",
        "A1+B1",
        "MYMACRO(SUM(A1:A9))",
        "NOW()",
    };
    for (const char* text : corpus) {
        auto tree = parse_formula(text);
        auto multiset = extract_function_names(tree);
        long long occurrences = 0;
        for (const auto& [name, count] : multiset) occurrences += count;
        int unique = unique_function_count(*tree.root);
        CHECK(unique <= occurrences);
        CHECK((unique == 0) == multiset.empty());
    }
}

TEST_CASE("shift rejects out-of-bounds moves") {
    auto tree = parse_formula("A1");
    auto cloned = clone_node(*tree.root);
    CHECK(!shift_relative_refs(*cloned, -1, 0));
    auto abs_tree = parse_formula("$A$1");
    auto abs_clone = clone_node(*abs_tree.root);
    CHECK(shift_relative_refs(*abs_clone, -1, 0));  // absolute: no move
}

TEST_CASE("s5 length is the verbatim character count") {
    auto tree = parse_formula("A1 + B1");  // spaces would shift the length
    CHECK(tree.length_chars() == 7);
    CHECK(parse_formula("1").length_chars() == 1);
}
