#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sheetscan/formula.hpp"
#include "sheetscan/workbook.hpp"

namespace sheetscan {

// Identifies the coordinate space a referenced rectangle lives in: a
// worksheet of this workbook, or a (workbook token, sheet) pair outside it.
struct RefSpace {
    bool external = false;
    int sheet_index = -1;        // local spaces
    std::string external_key;    // external spaces: token + uppercased sheet

    auto operator<=>(const RefSpace&) const = default;
};

// One referenced rectangle, already clamped/expanded (bands span the
// whole sheet axis, merged regions expanded).
struct RefRect {
    RefSpace space;
    CellRange range;

    auto operator<=>(const RefRect&) const = default;
};

// Resolution of one formula's references.
struct DirectPrecedents {
    long long unique_cell_count = 0;    // local + external, deduplicated
    std::vector<CellAddress> declared;  // stored cells this formula reads
    std::vector<RefRect> rects;         // all resolved rectangles
    std::vector<std::string> external_tokens;  // distinct, sorted
    int unresolved_count = 0;  // defined names + unknown sheets
};

// Resolves one parsed formula against a workbook. origin is the host cell.
DirectPrecedents direct_precedents(const FormulaTree& tree,
                                   const CellAddress& origin,
                                   const Workbook& wb);

// Exact number of distinct cells covered by a set of rectangles.
long long union_cell_count(const std::vector<RefRect>& rects);

struct CellDepthInfo {
    // nullopt when the cell sits on or downstream of a reference cycle.
    std::optional<int> path_depth;
    std::optional<long long> transitive_precedent_count;
    long long direct_precedent_count = 0;
    bool is_passing = false;
};

class PrecedentGraph {
public:
    struct FormulaCell {
        CellAddress addr;
        std::optional<FormulaTree> tree;  // nullopt: unparseable
        bool passing = false;
        DirectPrecedents direct;
    };

    static PrecedentGraph build(const Workbook& wb);

    const Workbook& workbook() const { return *wb_; }
    const std::vector<FormulaCell>& formula_cells() const { return cells_; }

    // Queries for one formula cell; addr must name a formula cell that
    // parsed. Both are memoized over the DAG.
    std::optional<int> path_depth(const CellAddress& addr) const;
    std::optional<long long> transitive_precedents(
        const CellAddress& addr) const;
    CellDepthInfo depth_info(const CellAddress& addr) const;

    // Workbook-level coupling facts.
    const std::set<std::string>& external_tokens() const {
        return external_tokens_;
    }
    int external_link_count() const {
        return static_cast<int>(external_tokens_.size());
    }
    // Distinct ordered (source sheet, target sheet) pairs, source != target.
    int interworksheet_pair_count() const {
        return static_cast<int>(sheet_pairs_.size());
    }
    // Alternative countings, kept selectable through configuration.
    int interworksheet_cell_count() const { return cross_sheet_cells_; }
    int interworksheet_occurrence_count() const {
        return cross_sheet_occurrences_;
    }

    int unparseable_count() const { return unparseable_; }
    int unresolved_ref_count() const { return unresolved_; }
    // Parseable formula cells with undefined depth (reference cycles).
    int cycle_cell_count() const { return cycle_cells_; }

private:
    int index_of(const CellAddress& addr) const;
    void compute_depths();

    const Workbook* wb_ = nullptr;
    std::vector<FormulaCell> cells_;
    std::map<CellAddress, int> index_;
    std::set<std::string> external_tokens_;
    std::set<std::pair<int, int>> sheet_pairs_;
    int cross_sheet_cells_ = 0;
    int cross_sheet_occurrences_ = 0;
    int unparseable_ = 0;
    int unresolved_ = 0;
    int cycle_cells_ = 0;

    // Memoized query results, aligned with cells_.
    std::vector<std::optional<int>> depth_;
    std::vector<std::optional<long long>> transitive_;
};

}  // namespace sheetscan
