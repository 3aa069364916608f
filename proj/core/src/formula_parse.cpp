#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include "sheetscan/errors.hpp"
#include "sheetscan/formula.hpp"
#include "sheetscan/workbook.hpp"

namespace sheetscan {

namespace {

enum class Tok {
    Number,
    String,       // decoded content
    ErrLit,       // canonical code
    Ident,        // run of [A-Za-z0-9_.$] and bytes >= 0x80
    WbToken,      // "[...]" verbatim, brackets kept
    QuotedSheet,  // decoded content of '...'
    Op,           // text is one of + - * / ^ & = <> < > <= >=
    PercentSign,
    LParen,
    RParen,
    Comma,
    Colon,
    Bang,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::size_t pos = 0;
    std::string text;
    double num = 0;
};

bool ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}
bool ident_cont(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '$' || c == '.' || c >= 0x80;
}

// Error literals, longest first so e.g. #NUM! wins over #N/A prefixes.
constexpr std::string_view kErrorCodes[] = {
    "#GETTING_DATA", "#DIV/0!", "#VALUE!", "#SPILL!", "#NAME?",
    "#NULL!",        "#CALC!",  "#NUM!",   "#REF!",   "#N/A",
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            Token t = next();
            bool end = t.kind == Tok::End;
            out.push_back(std::move(t));
            if (end) break;
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& msg, std::size_t pos) {
        throw ParseError(msg + " at offset " + std::to_string(pos), pos);
    }

    Token next() {
        while (i_ < src_.size() &&
               (src_[i_] == ' ' || src_[i_] == '\t' || src_[i_] == '\r' ||
                src_[i_] == '\n')) {
            ++i_;
        }
        if (i_ >= src_.size()) return {Tok::End, src_.size(), "", 0};
        const std::size_t start = i_;
        const char c = src_[i_];

        if (c == '"') return lex_quoted('"', Tok::String);
        if (c == '\'') return lex_quoted('\'', Tok::QuotedSheet);
        if (c == '[') {
            auto close = src_.find(']', i_);
            if (close == std::string_view::npos) {
                fail("unterminated workbook token", start);
            }
            Token t{Tok::WbToken, start,
                    std::string(src_.substr(start, close - start + 1)), 0};
            i_ = close + 1;
            return t;
        }
        if (c == '#') {
            for (auto code : kErrorCodes) {
                if (src_.size() - i_ >= code.size()) {
                    bool match = true;
                    for (std::size_t k = 0; k < code.size(); ++k) {
                        if (std::toupper(static_cast<unsigned char>(
                                src_[i_ + k])) != code[k]) {
                            match = false;
                            break;
                        }
                    }
                    if (match) {
                        i_ += code.size();
                        return {Tok::ErrLit, start, std::string(code), 0};
                    }
                }
            }
            fail("unknown error literal", start);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
            return lex_number();
        }
        if (ident_start(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            while (j < src_.size() &&
                   ident_cont(static_cast<unsigned char>(src_[j]))) {
                ++j;
            }
            Token t{Tok::Ident, start, std::string(src_.substr(i_, j - i_)),
                    0};
            i_ = j;
            return t;
        }
        switch (c) {
            case '(': ++i_; return {Tok::LParen, start, "(", 0};
            case ')': ++i_; return {Tok::RParen, start, ")", 0};
            case ',': ++i_; return {Tok::Comma, start, ",", 0};
            case ':': ++i_; return {Tok::Colon, start, ":", 0};
            case '!': ++i_; return {Tok::Bang, start, "!", 0};
            case '%': ++i_; return {Tok::PercentSign, start, "%", 0};
            case '+': case '-': case '*': case '/': case '^': case '&':
            case '=':
                ++i_;
                return {Tok::Op, start, std::string(1, c), 0};
            case '<':
                ++i_;
                if (i_ < src_.size() && src_[i_] == '>') {
                    ++i_;
                    return {Tok::Op, start, "<>", 0};
                }
                if (i_ < src_.size() && src_[i_] == '=') {
                    ++i_;
                    return {Tok::Op, start, "<=", 0};
                }
                return {Tok::Op, start, "<", 0};
            case '>':
                ++i_;
                if (i_ < src_.size() && src_[i_] == '=') {
                    ++i_;
                    return {Tok::Op, start, ">=", 0};
                }
                return {Tok::Op, start, ">", 0};
            default:
                fail("unexpected character", start);
        }
    }

    Token lex_quoted(char quote, Tok kind) {
        const std::size_t start = i_;
        ++i_;
        std::string content;
        while (true) {
            if (i_ >= src_.size()) fail("unterminated quoted text", start);
            char c = src_[i_];
            if (c == quote) {
                if (i_ + 1 < src_.size() && src_[i_ + 1] == quote) {
                    content.push_back(quote);
                    i_ += 2;
                    continue;
                }
                ++i_;
                break;
            }
            content.push_back(c);
            ++i_;
        }
        return {kind, start, std::move(content), 0};
    }

    Token lex_number() {
        const std::size_t start = i_;
        while (i_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[i_]))) {
            ++i_;
        }
        if (i_ < src_.size() && src_[i_] == '.') {
            ++i_;
            while (i_ < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[i_]))) {
                ++i_;
            }
        }
        if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
            std::size_t save = i_;
            ++i_;
            if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) {
                ++i_;
            }
            if (i_ < src_.size() &&
                std::isdigit(static_cast<unsigned char>(src_[i_]))) {
                while (i_ < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[i_]))) {
                    ++i_;
                }
            } else {
                i_ = save;  // "1e" is number 1 followed by ident 'e'? No:
                            // treat a bare exponent marker as not part of
                            // the number.
            }
        }
        std::string text(src_.substr(start, i_ - start));
        std::string conv = text;
        if (!conv.empty() && conv.back() == '.') conv.pop_back();
        double value = 0;
        auto res = std::from_chars(conv.data(), conv.data() + conv.size(),
                                   value);
        if (res.ec != std::errc() || res.ptr != conv.data() + conv.size()) {
            fail("bad numeric literal", start);
        }
        return {Tok::Number, start, std::move(text), value};
    }

    std::string_view src_;
    std::size_t i_ = 0;
};

// Shape of an Ident token when read as a reference corner.
struct AnchorPattern {
    enum class Kind { none, cell, col_only, row_only } kind = Kind::none;
    RefAnchor anchor;
};

AnchorPattern classify_anchor(std::string_view text) {
    AnchorPattern out;
    std::size_t i = 0;
    bool col_abs = false;
    if (i < text.size() && text[i] == '$') {
        col_abs = true;
        ++i;
    }
    std::size_t letters_start = i;
    while (i < text.size() &&
           std::isalpha(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    std::size_t letters_len = i - letters_start;
    bool row_abs = false;
    if (i < text.size() && text[i] == '$') {
        row_abs = true;
        ++i;
    }
    std::size_t digits_start = i;
    while (i < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    std::size_t digits_len = i - digits_start;
    if (i != text.size()) return out;

    if (letters_len > 0 && digits_len > 0) {
        auto col = letters_to_col(text.substr(letters_start, letters_len));
        if (!col) return out;
        long long row = 0;
        for (std::size_t k = 0; k < digits_len; ++k) {
            row = row * 10 + (text[digits_start + k] - '0');
            if (row > kMaxRow) return out;
        }
        if (row < 1) return out;
        out.kind = AnchorPattern::Kind::cell;
        out.anchor = {*col, col_abs, static_cast<int>(row), row_abs};
        return out;
    }
    if (letters_len > 0 && digits_len == 0 && !row_abs) {
        auto col = letters_to_col(text.substr(letters_start, letters_len));
        if (!col) return out;
        out.kind = AnchorPattern::Kind::col_only;
        out.anchor = {*col, col_abs, 0, false};
        return out;
    }
    if (letters_len == 0 && digits_len > 0) {
        // "$12" style; row_abs flag came through the leading '$'.
        long long row = 0;
        for (std::size_t k = 0; k < digits_len; ++k) {
            row = row * 10 + (text[digits_start + k] - '0');
            if (row > kMaxRow) return out;
        }
        if (row < 1) return out;
        out.kind = AnchorPattern::Kind::row_only;
        out.anchor = {0, false, static_cast<int>(row), col_abs};
        return out;
    }
    return out;
}

bool is_integer_token(const Token& t) {
    if (t.kind != Tok::Number) return false;
    for (char c : t.text) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return !t.text.empty();
}

bool valid_function_name(std::string_view name) {
    if (name.empty()) return false;
    if (!(name[0] >= 'A' && name[0] <= 'Z')) return false;
    for (char c : name) {
        if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
              c == '_')) {
            return false;
        }
    }
    return true;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    NodePtr run() {
        NodePtr root = parse_expr();
        expect(Tok::End, "unexpected token after expression");
        return root;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t idx = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[idx];
    }
    Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    [[noreturn]] void fail(const std::string& msg, const Token& at) {
        throw ParseError(msg + " at offset " + std::to_string(at.pos),
                         at.pos);
    }
    void expect(Tok kind, const char* msg) {
        if (peek().kind != kind) fail(msg, peek());
        take();
    }

    static NodePtr make(NodeVariant v) {
        auto n = std::make_unique<Node>();
        n->v = std::move(v);
        return n;
    }

    bool peek_op(std::initializer_list<std::string_view> ops) const {
        if (peek().kind != Tok::Op) return false;
        for (auto o : ops) {
            if (peek().text == o) return true;
        }
        return false;
    }

    static BinaryOp op_from_text(std::string_view t) {
        if (t == "+") return BinaryOp::Add;
        if (t == "-") return BinaryOp::Sub;
        if (t == "*") return BinaryOp::Mul;
        if (t == "/") return BinaryOp::Div;
        if (t == "^") return BinaryOp::Pow;
        if (t == "&") return BinaryOp::Concat;
        if (t == "=") return BinaryOp::Eq;
        if (t == "<>") return BinaryOp::Ne;
        if (t == "<") return BinaryOp::Lt;
        if (t == ">") return BinaryOp::Gt;
        if (t == "<=") return BinaryOp::Le;
        return BinaryOp::Ge;
    }

    NodePtr parse_expr() { return parse_cmp(); }

    NodePtr parse_cmp() {
        NodePtr left = parse_concat();
        while (peek_op({"=", "<>", "<", ">", "<=", ">="})) {
            BinaryOp op = op_from_text(take().text);
            NodePtr right = parse_concat();
            left = make(Binary{op, std::move(left), std::move(right)});
        }
        return left;
    }
    NodePtr parse_concat() {
        NodePtr left = parse_add();
        while (peek_op({"&"})) {
            take();
            NodePtr right = parse_add();
            left = make(
                Binary{BinaryOp::Concat, std::move(left), std::move(right)});
        }
        return left;
    }
    NodePtr parse_add() {
        NodePtr left = parse_mul();
        while (peek_op({"+", "-"})) {
            BinaryOp op = op_from_text(take().text);
            NodePtr right = parse_mul();
            left = make(Binary{op, std::move(left), std::move(right)});
        }
        return left;
    }
    NodePtr parse_mul() {
        NodePtr left = parse_pow();
        while (peek_op({"*", "/"})) {
            BinaryOp op = op_from_text(take().text);
            NodePtr right = parse_pow();
            left = make(Binary{op, std::move(left), std::move(right)});
        }
        return left;
    }
    NodePtr parse_pow() {
        NodePtr left = parse_post();
        while (peek_op({"^"})) {
            take();
            NodePtr right = parse_post();
            left = make(
                Binary{BinaryOp::Pow, std::move(left), std::move(right)});
        }
        return left;
    }
    NodePtr parse_post() {
        NodePtr node = parse_unary();
        while (peek().kind == Tok::PercentSign) {
            take();
            node = make(Percent{std::move(node)});
        }
        return node;
    }
    NodePtr parse_unary() {
        if (peek_op({"-", "+"})) {
            char op = take().text[0];
            NodePtr child = parse_unary();
            return make(Unary{op, std::move(child)});
        }
        return parse_atom();
    }

    // A token usable as the corner of a whole-row band: a bare integer
    // or an absolute form like "$4".
    static bool row_corner(const Token& t, RefAnchor& out) {
        if (is_integer_token(t)) {
            long long r = std::strtoll(t.text.c_str(), nullptr, 10);
            if (r < 1 || r > kMaxRow) return false;
            out = {0, false, static_cast<int>(r), false};
            return true;
        }
        if (t.kind == Tok::Ident) {
            auto pat = classify_anchor(t.text);
            if (pat.kind == AnchorPattern::Kind::row_only) {
                out = pat.anchor;
                return true;
            }
        }
        return false;
    }

    NodePtr parse_atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number: {
                // Bare integer ':' row-corner is a whole-row band (1:3).
                RefAnchor first, second;
                if (row_corner(peek(), first) &&
                    peek(1).kind == Tok::Colon &&
                    row_corner(peek(2), second)) {
                    return parse_row_band();
                }
                Token num = take();
                return make(NumberLit{num.num});
            }
            case Tok::String: {
                Token s = take();
                return make(TextLit{std::move(s.text)});
            }
            case Tok::ErrLit: {
                Token e = take();
                return make(ErrorLit{std::move(e.text)});
            }
            case Tok::LParen: {
                take();
                NodePtr inner = parse_expr();
                expect(Tok::RParen, "expected ')'");
                return make(Paren{std::move(inner)});
            }
            case Tok::WbToken: {
                Token wb = take();
                std::string sheet;
                if (peek().kind == Tok::Ident ||
                    peek().kind == Tok::QuotedSheet) {
                    sheet = take().text;
                } else {
                    fail("expected sheet name after workbook token", peek());
                }
                expect(Tok::Bang, "expected '!' after sheet name");
                return parse_ref_anchors(std::move(wb.text),
                                         std::move(sheet));
            }
            case Tok::QuotedSheet: {
                Token q = take();
                std::optional<std::string> wb;
                std::string sheet = q.text;
                if (!sheet.empty() && sheet.front() == '[') {
                    auto close = sheet.find(']');
                    if (close == std::string::npos) {
                        fail("bad workbook token in quoted sheet name", q);
                    }
                    wb = sheet.substr(0, close + 1);
                    sheet = sheet.substr(close + 1);
                }
                expect(Tok::Bang, "expected '!' after quoted sheet name");
                return parse_ref_anchors(std::move(wb), std::move(sheet));
            }
            case Tok::Ident:
                return parse_ident_atom();
            default:
                fail("unexpected token", t);
        }
    }

    // Current token must be a row corner, followed by ':' and another.
    NodePtr parse_row_band() {
        Token a = take();
        take();  // ':'
        Token b = take();
        RefExpr ref;
        ref.axis = RefExpr::Axis::row_band;
        ref.is_range = true;
        if (!row_corner(a, ref.first) || !row_corner(b, ref.second)) {
            fail("bad row band", a);
        }
        normalize_range(ref);
        return make(std::move(ref));
    }

    NodePtr parse_ident_atom() {
        Token id = take();
        if (peek().kind == Tok::WbToken &&
            peek().pos == id.pos + id.text.size()) {
            fail("structured table references are not supported", id);
        }
        if (peek().kind == Tok::LParen) {
            std::string name = ascii_upper(id.text);
            if (!valid_function_name(name)) {
                fail("bad function name '" + id.text + "'", id);
            }
            take();  // '('
            Call call;
            call.name = std::move(name);
            if (peek().kind == Tok::RParen) {
                take();
            } else {
                while (true) {
                    if (peek().kind == Tok::Comma ||
                        peek().kind == Tok::RParen) {
                        call.args.push_back(make(MissingArg{}));
                    } else {
                        call.args.push_back(parse_expr());
                    }
                    if (peek().kind == Tok::Comma) {
                        take();
                        continue;
                    }
                    expect(Tok::RParen, "expected ')' in argument list");
                    break;
                }
            }
            return make(std::move(call));
        }
        if (peek().kind == Tok::Bang) {
            take();
            return parse_ref_anchors(std::nullopt, std::move(id.text));
        }
        auto pat = classify_anchor(id.text);
        if (pat.kind == AnchorPattern::Kind::cell) {
            return finish_anchor(std::nullopt, std::nullopt, pat, id);
        }
        if (pat.kind == AnchorPattern::Kind::col_only &&
            peek().kind == Tok::Colon && peek(1).kind == Tok::Ident &&
            classify_anchor(peek(1).text).kind ==
                AnchorPattern::Kind::col_only) {
            return finish_anchor(std::nullopt, std::nullopt, pat, id);
        }
        if (pat.kind == AnchorPattern::Kind::row_only &&
            peek().kind == Tok::Colon) {
            RefAnchor second;
            if (row_corner(peek(1), second)) {
                return finish_anchor(std::nullopt, std::nullopt, pat, id);
            }
        }
        std::string upper = ascii_upper(id.text);
        if (upper == "TRUE") return make(BoolLit{true});
        if (upper == "FALSE") return make(BoolLit{false});
        if (id.text.find('$') != std::string::npos) {
            fail("malformed reference '" + id.text + "'", id);
        }
        return make(NameRef{std::move(id.text)});
    }

    // Parses the anchor part of a qualified reference; current token must
    // begin an anchor.
    NodePtr parse_ref_anchors(std::optional<std::string> wb,
                              std::string sheet) {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            RefAnchor first, second;
            if (row_corner(peek(), first) && peek(1).kind == Tok::Colon &&
                row_corner(peek(2), second)) {
                NodePtr band = parse_row_band();
                auto& ref = std::get<RefExpr>(band->v);
                ref.workbook_token = std::move(wb);
                if (!sheet.empty()) ref.sheet_name = std::move(sheet);
                return band;
            }
            fail("expected cell reference after '!'", t);
        }
        if (t.kind != Tok::Ident) {
            fail("expected cell reference after '!'", t);
        }
        Token id = take();
        auto pat = classify_anchor(id.text);
        if (pat.kind == AnchorPattern::Kind::none) {
            fail("bad reference '" + id.text + "'", id);
        }
        return finish_anchor(std::move(wb),
                             sheet.empty() ? std::nullopt
                                           : std::make_optional(sheet),
                             pat, id);
    }

    NodePtr finish_anchor(std::optional<std::string> wb,
                          std::optional<std::string> sheet,
                          const AnchorPattern& pat, const Token& id) {
        RefExpr ref;
        ref.workbook_token = std::move(wb);
        ref.sheet_name = std::move(sheet);
        ref.first = pat.anchor;

        if (peek().kind == Tok::Colon) {
            bool second_ok = false;
            AnchorPattern second;
            if (peek(1).kind == Tok::Ident) {
                second = classify_anchor(peek(1).text);
                second_ok = second.kind == pat.kind &&
                            second.kind != AnchorPattern::Kind::none;
            } else if (peek(1).kind == Tok::Number &&
                       is_integer_token(peek(1)) &&
                       pat.kind == AnchorPattern::Kind::row_only) {
                long long r = std::strtoll(peek(1).text.c_str(), nullptr, 10);
                if (r >= 1 && r <= kMaxRow) {
                    second.kind = AnchorPattern::Kind::row_only;
                    second.anchor = {0, false, static_cast<int>(r), false};
                    second_ok = true;
                }
            }
            if (pat.kind == AnchorPattern::Kind::cell && !second_ok &&
                peek(1).kind == Tok::Ident &&
                classify_anchor(peek(1).text).kind !=
                    AnchorPattern::Kind::none) {
                fail("mismatched range corners", peek(1));
            }
            if (second_ok) {
                take();  // ':'
                take();  // second anchor
                ref.is_range = true;
                ref.second = second.anchor;
                switch (pat.kind) {
                    case AnchorPattern::Kind::cell:
                        ref.axis = RefExpr::Axis::cell;
                        break;
                    case AnchorPattern::Kind::col_only:
                        ref.axis = RefExpr::Axis::col_band;
                        break;
                    default:
                        ref.axis = RefExpr::Axis::row_band;
                        break;
                }
                normalize_range(ref);
                return make(std::move(ref));
            }
            if (pat.kind != AnchorPattern::Kind::cell) {
                fail("expected matching range corner after ':'", peek());
            }
        }
        if (pat.kind != AnchorPattern::Kind::cell) {
            fail("bad reference '" + id.text + "'", id);
        }
        ref.axis = RefExpr::Axis::cell;
        return make(std::move(ref));
    }

    static void normalize_range(RefExpr& ref) {
        if (ref.axis != RefExpr::Axis::row_band) {
            if (ref.second.col < ref.first.col) {
                std::swap(ref.first.col, ref.second.col);
                std::swap(ref.first.col_abs, ref.second.col_abs);
            }
        }
        if (ref.axis != RefExpr::Axis::col_band) {
            if (ref.second.row < ref.first.row) {
                std::swap(ref.first.row, ref.second.row);
                std::swap(ref.first.row_abs, ref.second.row_abs);
            }
        }
        // A1:A1-style ranges collapse to the single cell.
        if (ref.axis == RefExpr::Axis::cell && ref.first == ref.second) {
            ref.is_range = false;
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

FormulaTree parse_formula(std::string_view text) {
    if (text.empty()) {
        throw ParseError("empty formula text", 0);
    }
    Lexer lexer(text);
    Parser parser(lexer.run());
    FormulaTree tree;
    tree.root = parser.run();
    tree.source_text.assign(text);
    return tree;
}

std::optional<FormulaTree> try_parse_formula(std::string_view text) {
    try {
        return parse_formula(text);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

}  // namespace sheetscan
