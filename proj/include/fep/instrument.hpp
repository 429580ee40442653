#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fep/ast.hpp"
#include "fep/errors.hpp"
#include "fep/interp.hpp"
#include "fep/tree_edit.hpp"

namespace fep {

struct ProgramPoint {
    int pp_index = 0;
    int anchor_node = -1;  // statement the point follows; -1 for the entry point
};

struct AlignedInstrumentation {
    std::vector<ProgramPoint> buggy_points;
    std::vector<ProgramPoint> fixed_points;
    std::vector<std::pair<int, int>> correspondence;  // (buggy pp, fixed pp), ordered

    TracePlan buggy_plan() const { return plan(buggy_points); }
    TracePlan fixed_plan() const { return plan(fixed_points); }

private:
    static TracePlan plan(const std::vector<ProgramPoint>& pts) {
        TracePlan p;
        for (const auto& pt : pts) {
            if (pt.anchor_node < 0)
                p.entry_pp = pt.pp_index;
            else
                p.after_stmt[pt.anchor_node] = pt.pp_index;
        }
        return p;
    }
};

namespace detail {

class Instrumenter {
public:
    Instrumenter(const FunctionDef& buggy, const FunctionDef& fixed,
                 const StatementScript& script)
        : buggy_(buggy), fixed_(fixed), script_(script) {
        if (script.blocks.empty() || script.blocks[0].buggy_block != buggy.body->node_id ||
            script.blocks[0].fixed_block != fixed.body->node_id)
            throw MisalignedScript("script does not describe this pair of functions");
        index_ids(*buggy.body, buggy_ids_);
        index_ids(*fixed.body, fixed_ids_);
        for (const auto& op : script.ops) {
            if (op.source_node >= 0) {
                if (!buggy_ids_.count(op.source_node))
                    throw MisalignedScript("script references a node absent from the buggy tree");
                op_for_buggy_[op.source_node] = &op;
            }
            if (op.target_node >= 0 && !fixed_ids_.count(op.target_node))
                throw MisalignedScript("script references a node absent from the fixed tree");
        }
    }

    AlignedInstrumentation run() {
        AlignedInstrumentation out;
        out.buggy_points.push_back({0, -1});
        collect_buggy(*buggy_.body, out.buggy_points);

        emit_block(0);

        std::set<int> fixed_anchor_set;
        for (const auto& [b, f] : emissions_) fixed_anchor_set.insert(f);
        out.fixed_points.push_back({0, -1});
        collect_fixed(*fixed_.body, fixed_anchor_set, out.fixed_points);

        std::map<int, int> b_index, f_index;
        for (const auto& p : out.buggy_points)
            if (p.anchor_node >= 0) b_index[p.anchor_node] = p.pp_index;
        for (const auto& p : out.fixed_points)
            if (p.anchor_node >= 0) f_index[p.anchor_node] = p.pp_index;

        out.correspondence.emplace_back(0, 0);
        for (const auto& [b, f] : emissions_)
            out.correspondence.emplace_back(b_index.at(b), f_index.at(f));
        std::sort(out.correspondence.begin(), out.correspondence.end());
        return out;
    }

private:
    const FunctionDef& buggy_;
    const FunctionDef& fixed_;
    const StatementScript& script_;
    std::set<int> buggy_ids_, fixed_ids_;
    std::map<int, const StmtOp*> op_for_buggy_;
    std::vector<std::pair<int, int>> emissions_;  // (buggy anchor id, fixed anchor id)

    static void index_ids(const AstNode& root, std::set<int>& ids) {
        walk_preorder(root, [&](const AstNode& n) { ids.insert(n.node_id); });
    }

    // Return/Throw exclusion; for CHANGE the post-change kind counts as well.
    static bool excluded(const StmtOp& op) {
        switch (op.kind) {
        case EditKind::Keep:
            return is_return_or_throw(op.source_kind);
        case EditKind::Change:
            return is_return_or_throw(op.source_kind) || is_return_or_throw(op.target_kind);
        case EditKind::Delete:
            return is_return_or_throw(op.source_kind);
        case EditKind::Insert:
            return is_return_or_throw(op.target_kind);
        }
        return false;
    }

    // Every statement boundary of the buggy version is observable; points go
    // after each non-exit statement, branch bodies included, loop bodies not.
    void collect_buggy(const AstNode& block, std::vector<ProgramPoint>& pts) {
        for (const auto& child : block.children) {
            const StmtOp* op = op_for_buggy_.count(child->node_id)
                                   ? op_for_buggy_.at(child->node_id)
                                   : nullptr;
            bool skip = op ? excluded(*op) : is_return_or_throw(child->kind);
            if (!skip) pts.push_back({static_cast<int>(pts.size()), child->node_id});
            if (child->kind == NodeKind::If) {
                collect_buggy(*child->children[1], pts);
                if (child->children.size() == 3) collect_buggy(*child->children[2], pts);
            }
        }
    }

    // Fixed-side points exist only where the aligned visit anchors them.
    void collect_fixed(const AstNode& block, const std::set<int>& anchors,
                       std::vector<ProgramPoint>& pts) {
        for (const auto& child : block.children) {
            if (anchors.count(child->node_id))
                pts.push_back({static_cast<int>(pts.size()), child->node_id});
            if (child->kind == NodeKind::If) {
                collect_fixed(*child->children[1], anchors, pts);
                if (child->children.size() == 3) collect_fixed(*child->children[2], anchors, pts);
            }
        }
    }

    // The aligned visit: after each kept statement, skip the following run of
    // deleted/inserted statements and anchor one point per side there. A run
    // that reaches the end of the block anchors nothing.
    void emit_block(int block_idx) {
        const auto& block = script_.blocks[static_cast<size_t>(block_idx)];
        const auto& local = block.ops;
        for (size_t k = 0; k < local.size(); ++k) {
            const StmtOp& op = script_.ops[static_cast<size_t>(local[k])];
            if (op.kind == EditKind::Keep || op.kind == EditKind::Change) {
                if (!excluded(op)) {
                    int b_anchor = op.source_node;
                    int f_anchor = op.target_node;
                    size_t r = k + 1;
                    bool run_nonempty = false;
                    for (; r < local.size(); ++r) {
                        const StmtOp& next = script_.ops[static_cast<size_t>(local[r])];
                        if (next.kind == EditKind::Delete) {
                            b_anchor = next.source_node;
                            run_nonempty = true;
                        } else if (next.kind == EditKind::Insert) {
                            f_anchor = next.target_node;
                            run_nonempty = true;
                        } else {
                            break;
                        }
                    }
                    bool trailing = run_nonempty && r == local.size();
                    if (!trailing) emissions_.emplace_back(b_anchor, f_anchor);
                }
                if (op.sub_blocks[0] >= 0) recurse_pair(op.sub_blocks[0]);
                if (op.sub_blocks[1] >= 0) recurse_pair(op.sub_blocks[1]);
            }
        }
    }

    void recurse_pair(int block_idx) {
        const auto& block = script_.blocks[static_cast<size_t>(block_idx)];
        if (block.buggy_block >= 0 && block.fixed_block >= 0) emit_block(block_idx);
    }
};

}  // namespace detail

inline AlignedInstrumentation instrument_pair(const FunctionDef& buggy_fn,
                                              const FunctionDef& fixed_fn,
                                              const StatementScript& script) {
    return detail::Instrumenter(buggy_fn, fixed_fn, script).run();
}

}  // namespace fep
