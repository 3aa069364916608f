#include "sheetscan/depgraph.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace sheetscan {

namespace {

int count_name_refs(const Node& node) {
    return std::visit(
        [](const auto& n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, NameRef>) {
                return 1;
            } else if constexpr (std::is_same_v<T, Paren> ||
                                 std::is_same_v<T, Unary> ||
                                 std::is_same_v<T, Percent>) {
                return count_name_refs(*n.child);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return count_name_refs(*n.left) + count_name_refs(*n.right);
            } else if constexpr (std::is_same_v<T, Call>) {
                int total = 0;
                for (const auto& a : n.args) total += count_name_refs(*a);
                return total;
            } else {
                return 0;
            }
        },
        node.v);
}

// Applies fn to every stored cell of ws inside range. Chooses between
// per-row map scans and one full scan depending on which is cheaper.
template <typename Fn>
void for_each_declared_in(const Worksheet& ws, const CellRange& range,
                          Fn&& fn) {
    const long long row_span = range.r2 - range.r1 + 1;
    if (row_span > static_cast<long long>(ws.cells.size())) {
        for (const auto& [rc, cell] : ws.cells) {
            if (range.contains(rc)) fn(rc);
        }
        return;
    }
    for (int r = range.r1; r <= range.r2; ++r) {
        auto it = ws.cells.lower_bound(RowCol{r, range.c1});
        while (it != ws.cells.end() && it->first.row == r &&
               it->first.col <= range.c2) {
            fn(it->first);
            ++it;
        }
    }
}

// Exact area of the union of rectangles sharing one space.
long long union_area_one_space(std::vector<CellRange>& rects) {
    if (rects.empty()) return 0;
    if (rects.size() == 1) return rects[0].area();

    std::vector<int> xs;
    xs.reserve(rects.size() * 2);
    for (const auto& r : rects) {
        xs.push_back(r.c1);
        xs.push_back(r.c2 + 1);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    long long total = 0;
    std::vector<std::pair<int, int>> intervals;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const int x0 = xs[i];
        const long long width = xs[i + 1] - xs[i];
        intervals.clear();
        for (const auto& r : rects) {
            if (r.c1 <= x0 && x0 <= r.c2) {
                intervals.emplace_back(r.r1, r.r2);
            }
        }
        if (intervals.empty()) continue;
        std::sort(intervals.begin(), intervals.end());
        long long covered = 0;
        int cur_lo = intervals[0].first;
        int cur_hi = intervals[0].second;
        for (std::size_t k = 1; k < intervals.size(); ++k) {
            if (intervals[k].first > cur_hi + 1) {
                covered += cur_hi - cur_lo + 1;
                cur_lo = intervals[k].first;
                cur_hi = intervals[k].second;
            } else {
                cur_hi = std::max(cur_hi, intervals[k].second);
            }
        }
        covered += cur_hi - cur_lo + 1;
        total += covered * width;
    }
    return total;
}

}  // namespace

long long union_cell_count(const std::vector<RefRect>& rects) {
    std::map<RefSpace, std::vector<CellRange>> by_space;
    for (const auto& r : rects) {
        by_space[r.space].push_back(r.range);
    }
    long long total = 0;
    for (auto& [space, group] : by_space) {
        total += union_area_one_space(group);
    }
    return total;
}

DirectPrecedents direct_precedents(const FormulaTree& tree,
                                   const CellAddress& origin,
                                   const Workbook& wb) {
    DirectPrecedents out;
    std::set<std::string> tokens;
    std::set<CellAddress> declared;

    for_each_ref(*tree.root, [&](const RefExpr& ref) {
        RefSpace space;
        if (ref.workbook_token) {
            tokens.insert(*ref.workbook_token);
            space.external = true;
            space.external_key =
                *ref.workbook_token + "!" +
                (ref.sheet_name ? ascii_upper(*ref.sheet_name)
                                : std::string());
        } else if (ref.sheet_name) {
            int idx = wb.sheet_index_of(*ref.sheet_name);
            if (idx < 0) {
                ++out.unresolved_count;
                return;
            }
            space.sheet_index = idx;
        } else {
            space.sheet_index = origin.sheet_index;
        }

        CellRange range;
        switch (ref.axis) {
            case RefExpr::Axis::cell:
                if (ref.is_range) {
                    range = {ref.first.row, ref.first.col, ref.second.row,
                             ref.second.col};
                } else {
                    range = {ref.first.row, ref.first.col, ref.first.row,
                             ref.first.col};
                    // A single reference into a merged region reads the
                    // whole region.
                    if (!space.external) {
                        const auto& ws = wb.worksheets[space.sheet_index];
                        if (const CellRange* m = ws.merged_region_at(
                                {ref.first.row, ref.first.col})) {
                            range = *m;
                        }
                    }
                }
                break;
            case RefExpr::Axis::col_band:
                range = {1, ref.first.col, kMaxRow,
                         ref.is_range ? ref.second.col : ref.first.col};
                break;
            case RefExpr::Axis::row_band:
                range = {ref.first.row, 1,
                         ref.is_range ? ref.second.row : ref.first.row,
                         kMaxCol};
                break;
        }
        out.rects.push_back(RefRect{space, range});

        if (!space.external) {
            const auto& ws = wb.worksheets[space.sheet_index];
            for_each_declared_in(ws, range, [&](RowCol rc) {
                declared.insert(
                    CellAddress{space.sheet_index, rc.row, rc.col});
            });
        }
    });

    out.unresolved_count += count_name_refs(*tree.root);
    out.unique_cell_count = union_cell_count(out.rects);
    out.declared.assign(declared.begin(), declared.end());
    out.external_tokens.assign(tokens.begin(), tokens.end());
    return out;
}

PrecedentGraph PrecedentGraph::build(const Workbook& wb) {
    PrecedentGraph g;
    g.wb_ = &wb;

    for (int s = 0; s < static_cast<int>(wb.worksheets.size()); ++s) {
        for (const auto& [rc, cell] : wb.worksheets[s].cells) {
            if (!cell.formula) continue;
            FormulaCell fc;
            fc.addr = CellAddress{s, rc.row, rc.col};
            auto tree = try_parse_formula(*cell.formula);
            if (!tree) {
                ++g.unparseable_;
                g.index_.emplace(fc.addr,
                                 static_cast<int>(g.cells_.size()));
                g.cells_.push_back(std::move(fc));
                continue;
            }
            fc.passing = is_passing(*tree);
            fc.direct = direct_precedents(*tree, fc.addr, wb);
            fc.tree = std::move(tree);

            for (const auto& t : fc.direct.external_tokens) {
                g.external_tokens_.insert(t);
            }
            g.unresolved_ += fc.direct.unresolved_count;
            bool crosses = false;
            for (const auto& rect : fc.direct.rects) {
                if (!rect.space.external &&
                    rect.space.sheet_index != fc.addr.sheet_index) {
                    g.sheet_pairs_.emplace(fc.addr.sheet_index,
                                           rect.space.sheet_index);
                    ++g.cross_sheet_occurrences_;
                    crosses = true;
                }
            }
            if (crosses) ++g.cross_sheet_cells_;

            g.index_.emplace(fc.addr, static_cast<int>(g.cells_.size()));
            g.cells_.push_back(std::move(fc));
        }
    }
    g.compute_depths();
    return g;
}

void PrecedentGraph::compute_depths() {
    const int n = static_cast<int>(cells_.size());
    depth_.assign(n, std::nullopt);
    transitive_.assign(n, std::nullopt);

    enum class Mark : uint8_t { white, gray, black };
    std::vector<Mark> mark(n, Mark::white);
    std::vector<bool> undefined(n, false);
    // Closure of referenced rectangles per node, kept only while the
    // computation runs.
    std::vector<std::vector<RefRect>> closure(n);

    // Formula targets of each node, precomputed once.
    std::vector<std::vector<int>> targets(n);
    for (int i = 0; i < n; ++i) {
        if (!cells_[i].tree) continue;
        for (const auto& addr : cells_[i].direct.declared) {
            auto it = index_.find(addr);
            if (it != index_.end() && cells_[it->second].tree) {
                targets[i].push_back(it->second);
            }
        }
    }

    struct Frame {
        int node;
        std::size_t next_child = 0;
    };
    std::vector<Frame> stack;

    for (int start = 0; start < n; ++start) {
        if (!cells_[start].tree || mark[start] != Mark::white) continue;
        stack.push_back({start});
        mark[start] = Mark::gray;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next_child < targets[f.node].size()) {
                int child = targets[f.node][f.next_child++];
                if (mark[child] == Mark::gray) {
                    undefined[f.node] = true;  // back edge: cycle
                } else if (mark[child] == Mark::white) {
                    mark[child] = Mark::gray;
                    stack.push_back({child});
                }
                continue;
            }
            // Post-order: combine children.
            const int node = f.node;
            stack.pop_back();
            mark[node] = Mark::black;

            bool undef = undefined[node];
            int best_child_depth = -1;
            std::vector<RefRect> rects = cells_[node].direct.rects;
            for (int child : targets[node]) {
                if (undefined[child]) {
                    undef = true;
                    break;
                }
                best_child_depth =
                    std::max(best_child_depth, *depth_[child]);
                rects.insert(rects.end(), closure[child].begin(),
                             closure[child].end());
            }
            if (undef) {
                undefined[node] = true;
                ++cycle_cells_;
                continue;
            }
            int depth = 0;
            if (cells_[node].direct.unique_cell_count > 0) {
                depth = std::max(1, best_child_depth + 1);
            }
            depth_[node] = depth;
            std::sort(rects.begin(), rects.end());
            rects.erase(std::unique(rects.begin(), rects.end()),
                        rects.end());
            transitive_[node] = union_cell_count(rects);
            closure[node] = std::move(rects);
        }
    }
}

int PrecedentGraph::index_of(const CellAddress& addr) const {
    auto it = index_.find(addr);
    if (it == index_.end()) {
        throw std::invalid_argument("not a formula cell");
    }
    if (!cells_[it->second].tree) {
        throw std::invalid_argument("formula cell did not parse");
    }
    return it->second;
}

std::optional<int> PrecedentGraph::path_depth(const CellAddress& addr) const {
    return depth_[index_of(addr)];
}

std::optional<long long> PrecedentGraph::transitive_precedents(
    const CellAddress& addr) const {
    return transitive_[index_of(addr)];
}

CellDepthInfo PrecedentGraph::depth_info(const CellAddress& addr) const {
    const int i = index_of(addr);
    CellDepthInfo info;
    info.path_depth = depth_[i];
    info.transitive_precedent_count = transitive_[i];
    info.direct_precedent_count = cells_[i].direct.unique_cell_count;
    info.is_passing = cells_[i].passing;
    return info;
}

}  // namespace sheetscan
