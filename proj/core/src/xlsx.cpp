#include "sheetscan/xlsx.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

#include "sheetscan/errors.hpp"
#include "sheetscan/formula.hpp"
#include "sheetscan/zipfile.hpp"

namespace sheetscan {

namespace {

// ---------------------------------------------------------------------
// Minimal XML pull scanner, sufficient for the OOXML parts read here:
// elements, attributes, character data, CDATA, comments, processing
// instructions. Element names are reported without namespace prefix.
// ---------------------------------------------------------------------

struct XmlAttr {
    std::string name;  // full name, prefix kept
    std::string value;
};

class XmlScanner {
public:
    enum class Event { Start, End, Text, Eof };

    explicit XmlScanner(std::string_view src) : src_(src) {}

    Event next() {
        if (pending_end_) {
            pending_end_ = false;
            return Event::End;
        }
        while (pos_ < src_.size()) {
            if (src_[pos_] != '<') {
                return lex_text();
            }
            if (starts_with("<!--")) {
                skip_until("-->");
                continue;
            }
            if (starts_with("<![CDATA[")) {
                return lex_cdata();
            }
            if (starts_with("<?")) {
                skip_until("?>");
                continue;
            }
            if (starts_with("<!")) {
                skip_until(">");
                continue;
            }
            if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                pos_ += 2;
                name_ = read_name();
                skip_ws();
                expect('>');
                return Event::End;
            }
            return lex_start();
        }
        return Event::Eof;
    }

    const std::string& name() const { return name_; }
    const std::string& text() const { return text_; }

    // Attribute lookup by local name: "id" matches both id and r:id.
    std::string attr(std::string_view local) const {
        for (const auto& a : attrs_) {
            if (a.name == local) return a.value;
            if (a.name.size() > local.size() + 1 &&
                a.name[a.name.size() - local.size() - 1] == ':' &&
                a.name.compare(a.name.size() - local.size(), local.size(),
                               local) == 0) {
                return a.value;
            }
        }
        return {};
    }
    bool has_attr(std::string_view local) const {
        for (const auto& a : attrs_) {
            if (a.name == local) return true;
            if (a.name.size() > local.size() + 1 &&
                a.name[a.name.size() - local.size() - 1] == ':' &&
                a.name.compare(a.name.size() - local.size(), local.size(),
                               local) == 0) {
                return true;
            }
        }
        return false;
    }

private:
    [[noreturn]] void fail(const char* what) {
        throw FormatError(std::string("xml: ") + what + " at offset " +
                          std::to_string(pos_));
    }

    bool starts_with(std::string_view prefix) const {
        return src_.compare(pos_, prefix.size(), prefix) == 0;
    }
    void skip_until(std::string_view marker) {
        auto at = src_.find(marker, pos_);
        if (at == std::string_view::npos) fail("unterminated construct");
        pos_ = at + marker.size();
    }
    void skip_ws() {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                src_[pos_] == '\r' || src_[pos_] == '\n')) {
            ++pos_;
        }
    }
    void expect(char c) {
        if (pos_ >= src_.size() || src_[pos_] != c) fail("unexpected byte");
        ++pos_;
    }

    static bool name_char(char c) {
        return !(c == ' ' || c == '\t' || c == '\r' || c == '\n' ||
                 c == '>' || c == '/' || c == '=');
    }

    std::string read_name() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && name_char(src_[pos_])) ++pos_;
        if (pos_ == start) fail("empty name");
        std::string full(src_.substr(start, pos_ - start));
        auto colon = full.rfind(':');
        return colon == std::string::npos ? full : full.substr(colon + 1);
    }

    std::string decode(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size();) {
            if (raw[i] != '&') {
                out.push_back(raw[i++]);
                continue;
            }
            auto end = raw.find(';', i);
            if (end == std::string_view::npos) {
                out.push_back(raw[i++]);
                continue;
            }
            std::string_view ent = raw.substr(i + 1, end - i - 1);
            if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "amp") out.push_back('&');
            else if (ent == "quot") out.push_back('"');
            else if (ent == "apos") out.push_back('\'');
            else if (!ent.empty() && ent[0] == '#') {
                long code = 0;
                if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')) {
                    code = std::strtol(std::string(ent.substr(2)).c_str(),
                                       nullptr, 16);
                } else {
                    code = std::strtol(std::string(ent.substr(1)).c_str(),
                                       nullptr, 10);
                }
                append_utf8(out, code);
            } else {
                out.push_back('&');
                out.append(ent);
                out.push_back(';');
            }
            i = end + 1;
        }
        return out;
    }

    static void append_utf8(std::string& out, long code) {
        if (code < 0) return;
        if (code < 0x80) {
            out.push_back(static_cast<char>(code));
        } else if (code < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (code >> 6)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else if (code < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (code >> 12)));
            out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (code >> 18)));
            out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        }
    }

    Event lex_text() {
        auto end = src_.find('<', pos_);
        if (end == std::string_view::npos) end = src_.size();
        text_ = decode(src_.substr(pos_, end - pos_));
        pos_ = end;
        return Event::Text;
    }

    Event lex_cdata() {
        pos_ += 9;  // "<![CDATA["
        auto end = src_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA");
        text_.assign(src_.substr(pos_, end - pos_));
        pos_ = end + 3;
        return Event::Text;
    }

    Event lex_start() {
        ++pos_;  // '<'
        name_ = read_name();
        attrs_.clear();
        while (true) {
            skip_ws();
            if (pos_ >= src_.size()) fail("unterminated element");
            if (src_[pos_] == '>') {
                ++pos_;
                return Event::Start;
            }
            if (src_[pos_] == '/') {
                ++pos_;
                expect('>');
                pending_end_ = true;
                return Event::Start;
            }
            XmlAttr a;
            std::size_t start = pos_;
            while (pos_ < src_.size() && name_char(src_[pos_]) ) ++pos_;
            a.name.assign(src_.substr(start, pos_ - start));
            skip_ws();
            expect('=');
            skip_ws();
            if (pos_ >= src_.size() ||
                (src_[pos_] != '"' && src_[pos_] != '\'')) {
                fail("expected quoted attribute value");
            }
            char q = src_[pos_++];
            auto end = src_.find(q, pos_);
            if (end == std::string_view::npos) {
                fail("unterminated attribute value");
            }
            a.value = decode(src_.substr(pos_, end - pos_));
            pos_ = end + 1;
            attrs_.push_back(std::move(a));
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::string name_;
    std::string text_;
    std::vector<XmlAttr> attrs_;
    bool pending_end_ = false;
};

// ---------------------------------------------------------------------
// OPC path plumbing
// ---------------------------------------------------------------------

std::string dir_of(const std::string& path) {
    auto slash = path.rfind('/');
    return slash == std::string::npos ? std::string()
                                      : path.substr(0, slash + 1);
}

std::string resolve_target(const std::string& base_dir,
                           const std::string& target) {
    std::string path;
    if (!target.empty() && target.front() == '/') {
        path = target.substr(1);
    } else {
        path = base_dir + target;
    }
    // Collapse "../" and "./" segments.
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= path.size()) {
        auto slash = path.find('/', pos);
        std::string seg = path.substr(
            pos, slash == std::string::npos ? path.size() - pos
                                            : slash - pos);
        pos = slash == std::string::npos ? path.size() + 1 : slash + 1;
        if (seg.empty() || seg == ".") continue;
        if (seg == "..") {
            if (!parts.empty()) parts.pop_back();
            continue;
        }
        parts.push_back(std::move(seg));
    }
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back('/');
        out += parts[i];
    }
    return out;
}

std::map<std::string, std::string> parse_rels(std::string_view xml) {
    std::map<std::string, std::string> out;  // rId -> target
    XmlScanner scan(xml);
    while (true) {
        auto ev = scan.next();
        if (ev == XmlScanner::Event::Eof) break;
        if (ev == XmlScanner::Event::Start &&
            scan.name() == "Relationship") {
            out[scan.attr("Id")] = scan.attr("Target");
        }
    }
    return out;
}

std::string find_rel_by_type_suffix(std::string_view xml,
                                    std::string_view suffix) {
    XmlScanner scan(xml);
    while (true) {
        auto ev = scan.next();
        if (ev == XmlScanner::Event::Eof) break;
        if (ev == XmlScanner::Event::Start &&
            scan.name() == "Relationship") {
            std::string type = scan.attr("Type");
            if (type.size() >= suffix.size() &&
                type.compare(type.size() - suffix.size(), suffix.size(),
                             suffix) == 0) {
                return scan.attr("Target");
            }
        }
    }
    return {};
}

// Shared-string items: concatenated <t> text, phonetic runs skipped.
std::vector<std::string> parse_shared_strings(std::string_view xml) {
    std::vector<std::string> out;
    XmlScanner scan(xml);
    std::string current;
    bool in_si = false;
    bool in_t = false;
    int phonetic_depth = 0;
    while (true) {
        auto ev = scan.next();
        if (ev == XmlScanner::Event::Eof) break;
        if (ev == XmlScanner::Event::Start) {
            if (scan.name() == "si") {
                in_si = true;
                current.clear();
            } else if (in_si && (scan.name() == "rPh" ||
                                 scan.name() == "phoneticPr")) {
                ++phonetic_depth;
            } else if (in_si && scan.name() == "t" && phonetic_depth == 0) {
                in_t = true;
            }
        } else if (ev == XmlScanner::Event::End) {
            if (scan.name() == "si") {
                out.push_back(current);
                in_si = false;
            } else if (scan.name() == "rPh" || scan.name() == "phoneticPr") {
                if (phonetic_depth > 0) --phonetic_depth;
            } else if (scan.name() == "t") {
                in_t = false;
            }
        } else if (ev == XmlScanner::Event::Text && in_t) {
            current += scan.text();
        }
    }
    return out;
}

struct RawCell {
    RowCol rc;
    std::optional<CellValue> value;
    std::optional<std::string> formula;
    std::optional<int> shared_si;
    bool shared_master = false;
};

struct SheetData {
    std::vector<RawCell> cells;
    std::vector<CellRange> merged;
};

SheetData parse_sheet_xml(std::string_view xml, const std::string& sheet_name,
                          const std::vector<std::string>& shared_strings,
                          std::vector<std::string>& warnings) {
    SheetData out;
    XmlScanner scan(xml);

    int current_row = 0;
    int next_col = 1;
    bool in_cell = false;
    bool in_v = false;
    bool in_f = false;
    bool in_is = false;
    bool in_is_t = false;

    RawCell cell;
    std::string cell_type;
    std::string v_text;
    std::string f_text;
    std::string f_type;
    std::string is_text;
    bool have_v = false;
    bool have_is = false;

    auto warn = [&](const std::string& msg) {
        warnings.push_back("sheet '" + sheet_name + "': " + msg);
    };

    auto finish_cell = [&]() {
        if (have_v || have_is || !f_text.empty() || cell.shared_si) {
            if (have_is) {
                cell.value = is_text;
            } else if (have_v) {
                if (cell_type == "s") {
                    char* end = nullptr;
                    long idx = std::strtol(v_text.c_str(), &end, 10);
                    if (end && *end == '\0' && idx >= 0 &&
                        idx < static_cast<long>(shared_strings.size())) {
                        cell.value = shared_strings[idx];
                    } else {
                        warn("bad shared string index '" + v_text + "'");
                    }
                } else if (cell_type == "b") {
                    cell.value = (v_text == "1");
                } else if (cell_type == "e") {
                    if (is_known_error_code(v_text)) {
                        cell.value = ErrorValue{v_text};
                    } else {
                        warn("unknown error value '" + v_text + "'");
                    }
                } else if (cell_type == "str") {
                    cell.value = v_text;
                } else {  // "n" or absent
                    char* end = nullptr;
                    double num = std::strtod(v_text.c_str(), &end);
                    if (end && *end == '\0' && end != v_text.c_str()) {
                        cell.value = num;
                    } else {
                        warn("bad numeric value '" + v_text + "' at " +
                             rowcol_to_a1(cell.rc));
                    }
                }
            }
            if (!f_text.empty()) {
                cell.formula = f_text;
                if (f_type == "shared" && cell.shared_si) {
                    cell.shared_master = true;
                }
            }
            if (f_type != "shared") cell.shared_si.reset();
            out.cells.push_back(std::move(cell));
        }
        cell = RawCell{};
    };

    while (true) {
        auto ev = scan.next();
        if (ev == XmlScanner::Event::Eof) break;
        if (ev == XmlScanner::Event::Start) {
            const std::string& n = scan.name();
            if (n == "row") {
                std::string r = scan.attr("r");
                if (!r.empty()) {
                    current_row = std::atoi(r.c_str());
                } else {
                    ++current_row;
                }
                next_col = 1;
            } else if (n == "c") {
                in_cell = true;
                cell = RawCell{};
                cell_type = scan.attr("t");
                v_text.clear();
                f_text.clear();
                f_type.clear();
                is_text.clear();
                have_v = false;
                have_is = false;
                std::string r = scan.attr("r");
                if (!r.empty()) {
                    auto rc = parse_plain_a1(r);
                    if (!rc) {
                        warn("bad cell address '" + r + "', cell dropped");
                        in_cell = false;
                        continue;
                    }
                    cell.rc = *rc;
                    next_col = rc->col + 1;
                } else {
                    cell.rc = RowCol{current_row, next_col};
                    ++next_col;
                }
                if (cell.rc.row < 1 || cell.rc.row > kMaxRow ||
                    cell.rc.col < 1 || cell.rc.col > kMaxCol) {
                    warn("cell out of bounds, dropped");
                    in_cell = false;
                }
            } else if (in_cell && n == "v") {
                in_v = true;
                have_v = true;
            } else if (in_cell && n == "f") {
                in_f = true;
                f_type = scan.attr("t");
                std::string si = scan.attr("si");
                if (f_type == "shared" && !si.empty()) {
                    cell.shared_si = std::atoi(si.c_str());
                }
            } else if (in_cell && n == "is") {
                in_is = true;
                have_is = true;
            } else if (in_is && n == "t") {
                in_is_t = true;
            } else if (n == "mergeCell") {
                std::string ref = scan.attr("ref");
                auto range = parse_plain_range(ref);
                if (range) {
                    out.merged.push_back(*range);
                } else {
                    warn("bad merged range '" + ref + "'");
                }
            }
        } else if (ev == XmlScanner::Event::End) {
            const std::string& n = scan.name();
            if (n == "c" && in_cell) {
                finish_cell();
                in_cell = false;
            } else if (n == "v") {
                in_v = false;
            } else if (n == "f") {
                in_f = false;
            } else if (n == "is") {
                in_is = false;
            } else if (n == "t") {
                in_is_t = false;
            }
        } else if (ev == XmlScanner::Event::Text) {
            if (in_v) v_text += scan.text();
            else if (in_f) f_text += scan.text();
            else if (in_is_t) is_text += scan.text();
        }
    }
    return out;
}

// Expands shared-formula slaves by shifting the master's relative
// references to the slave cell.
void expand_shared_formulas(SheetData& sheet, const std::string& sheet_name,
                            std::vector<std::string>& warnings) {
    struct Master {
        RowCol rc;
        std::string text;
        std::optional<FormulaTree> tree;
        bool parse_failed = false;
    };
    std::map<int, Master> masters;
    for (const auto& c : sheet.cells) {
        if (c.shared_master && c.shared_si && c.formula) {
            masters.emplace(*c.shared_si, Master{c.rc, *c.formula,
                                                 std::nullopt, false});
        }
    }
    for (auto& c : sheet.cells) {
        if (!c.shared_si || c.shared_master || c.formula) continue;
        auto it = masters.find(*c.shared_si);
        if (it == masters.end()) {
            warnings.push_back("sheet '" + sheet_name +
                               "': shared formula group " +
                               std::to_string(*c.shared_si) +
                               " has no master, cell " + rowcol_to_a1(c.rc) +
                               " keeps its value only");
            continue;
        }
        Master& m = it->second;
        if (!m.tree && !m.parse_failed) {
            m.tree = try_parse_formula(m.text);
            if (!m.tree) {
                m.parse_failed = true;
                warnings.push_back("sheet '" + sheet_name +
                                   "': shared formula master at " +
                                   rowcol_to_a1(m.rc) +
                                   " does not parse; group kept verbatim");
            }
        }
        if (m.parse_failed) {
            // Verbatim copy keeps the cell a formula cell even though the
            // shift cannot be computed.
            c.formula = m.text;
            continue;
        }
        NodePtr cloned = clone_node(*m.tree->root);
        const int dr = c.rc.row - m.rc.row;
        const int dc = c.rc.col - m.rc.col;
        if (!shift_relative_refs(*cloned, dr, dc)) {
            warnings.push_back("sheet '" + sheet_name +
                               "': shared formula shift leaves sheet at " +
                               rowcol_to_a1(c.rc) + ", formula dropped");
            continue;
        }
        c.formula = to_a1(*cloned);
    }
}

}  // namespace

std::pair<Workbook, XlsxSourceInfo> load_xlsx(std::string_view bytes) {
    XlsxSourceInfo info;
    ZipArchive zip;
    try {
        zip = ZipArchive::from_bytes(bytes);
    } catch (const FormatError& e) {
        throw UnreadableFileError(std::string("not a readable .xlsx: ") +
                                  e.what());
    }

    // Locate the workbook part.
    std::string workbook_part = "xl/workbook.xml";
    if (auto rels = zip.read("_rels/.rels")) {
        std::string target = find_rel_by_type_suffix(*rels, "/officeDocument");
        if (!target.empty()) {
            workbook_part = resolve_target("", target);
        }
    }
    auto workbook_xml = zip.read(workbook_part);
    if (!workbook_xml) {
        throw UnreadableFileError("missing workbook part '" + workbook_part +
                                  "'");
    }
    const std::string base = dir_of(workbook_part);

    // Sheet list in workbook order.
    std::vector<std::pair<std::string, std::string>> sheets;  // name, rId
    {
        XmlScanner scan(*workbook_xml);
        while (true) {
            auto ev = scan.next();
            if (ev == XmlScanner::Event::Eof) break;
            if (ev == XmlScanner::Event::Start && scan.name() == "sheet") {
                sheets.emplace_back(scan.attr("name"), scan.attr("id"));
            }
        }
    }
    if (sheets.empty()) {
        throw UnreadableFileError("workbook has no sheets");
    }

    std::map<std::string, std::string> rels;
    {
        auto slash = workbook_part.rfind('/');
        std::string rels_part =
            base + "_rels/" +
            (slash == std::string::npos ? workbook_part
                                        : workbook_part.substr(slash + 1)) +
            ".rels";
        if (auto rels_xml = zip.read(rels_part)) {
            rels = parse_rels(*rels_xml);
        }
    }

    std::vector<std::string> shared_strings;
    {
        std::string part = base + "sharedStrings.xml";
        for (const auto& [id, target] : rels) {
            if (target.find("sharedStrings") != std::string::npos) {
                part = resolve_target(base, target);
                break;
            }
        }
        if (auto xml = zip.read(part)) {
            shared_strings = parse_shared_strings(*xml);
        }
    }

    Workbook wb;
    for (std::size_t i = 0; i < sheets.size(); ++i) {
        const auto& [name, rid] = sheets[i];
        Worksheet ws;
        ws.name = name;

        std::string part;
        auto rel = rels.find(rid);
        if (rel != rels.end()) {
            part = resolve_target(base, rel->second);
        } else {
            part = base + "worksheets/sheet" + std::to_string(i + 1) + ".xml";
        }
        auto xml = zip.read(part);
        if (!xml) {
            info.parse_warnings.push_back("sheet '" + name +
                                          "': part missing, treated as empty");
            wb.worksheets.push_back(std::move(ws));
            continue;
        }
        SheetData data =
            parse_sheet_xml(*xml, name, shared_strings, info.parse_warnings);
        expand_shared_formulas(data, name, info.parse_warnings);

        for (auto& raw : data.cells) {
            if (!raw.value && !raw.formula) continue;
            if (raw.formula && raw.formula->empty()) raw.formula.reset();
            if (!raw.value && !raw.formula) continue;
            Cell c;
            c.value = std::move(raw.value);
            c.formula = std::move(raw.formula);
            auto [it, inserted] = ws.cells.emplace(raw.rc, std::move(c));
            if (!inserted) {
                info.parse_warnings.push_back(
                    "sheet '" + name + "': duplicate cell " +
                    rowcol_to_a1(raw.rc) + ", first kept");
            }
        }
        for (const auto& m : data.merged) {
            bool overlaps = false;
            for (const auto& prev : ws.merged_regions) {
                if (m.intersects(prev)) {
                    overlaps = true;
                    break;
                }
            }
            if (overlaps) {
                info.parse_warnings.push_back("sheet '" + name +
                                              "': overlapping merged region " +
                                              range_to_a1(m) + " dropped");
            } else {
                ws.merged_regions.push_back(m);
            }
        }
        std::sort(ws.merged_regions.begin(), ws.merged_regions.end());
        wb.worksheets.push_back(std::move(ws));
    }

    for (std::size_t i = 0; i < wb.worksheets.size(); ++i) {
        for (std::size_t j = i + 1; j < wb.worksheets.size(); ++j) {
            if (sheet_name_equal(wb.worksheets[i].name,
                                 wb.worksheets[j].name)) {
                throw UnreadableFileError("duplicate worksheet name '" +
                                          wb.worksheets[j].name + "'");
            }
        }
    }
    info.sheet_count = static_cast<int>(wb.worksheets.size());
    return {std::move(wb), std::move(info)};
}

}  // namespace sheetscan
