#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "fep/ast.hpp"
#include "fep/errors.hpp"
#include "fep/pretty.hpp"

namespace fep {

enum class EditKind { Keep, Change, Insert, Delete };

inline const char* edit_kind_name(EditKind k) {
    switch (k) {
    case EditKind::Keep: return "KEEP";
    case EditKind::Change: return "CHANGE";
    case EditKind::Insert: return "INSERT";
    case EditKind::Delete: return "DELETE";
    }
    return "?";
}

struct EditOp {
    EditKind kind = EditKind::Keep;
    int source_node = -1;  // node id in the buggy tree (KEEP/CHANGE/DELETE)
    int target_node = -1;  // node id in the fixed tree (KEEP/CHANGE/INSERT)
};

struct EditScript {
    std::vector<EditOp> ops;
    int cost = 0;
};

namespace detail {

// Postorder flattening, 1-based as in the classic formulation.
struct FlatTree {
    std::vector<const AstNode*> node;  // [1..n]
    std::vector<int> lml;              // leftmost leaf index
    std::vector<int> keyroots;

    explicit FlatTree(const AstNode& root) {
        node.push_back(nullptr);
        lml.push_back(0);
        build(root);
        int n = size();
        // a node is a keyroot when no proper ancestor shares its leftmost leaf
        std::vector<bool> seen(n + 2, false);
        for (int i = n; i >= 1; --i) {
            if (!seen[lml[i]]) {
                keyroots.push_back(i);
                seen[lml[i]] = true;
            }
        }
        std::sort(keyroots.begin(), keyroots.end());
    }

    int size() const { return static_cast<int>(node.size()) - 1; }

    int build(const AstNode& n) {
        int first = 0;
        for (const auto& c : n.children) {
            int l = build(*c);
            if (!first) first = l;
        }
        node.push_back(&n);
        int self = static_cast<int>(node.size()) - 1;
        lml.push_back(first ? first : self);
        return lml.back();
    }
};

inline bool label_equal(const AstNode& a, const AstNode& b) {
    return a.kind == b.kind && a.token == b.token;
}

class ZhangShasha {
public:
    ZhangShasha(const AstNode& a, const AstNode& b) : ta_(a), tb_(b) {
        int n = ta_.size();
        int m = tb_.size();
        td_.assign(static_cast<size_t>(n + 1), std::vector<int>(static_cast<size_t>(m + 1), 0));
        for (int i : ta_.keyroots)
            for (int j : tb_.keyroots) forest_dist(i, j, nullptr);
    }

    int distance() const { return td_[ta_.size()][tb_.size()]; }

    // (a postorder, b postorder) matched pairs of the recovered minimal mapping
    std::vector<std::pair<int, int>> mapping() {
        std::vector<std::pair<int, int>> out;
        std::vector<std::pair<int, int>> todo{{ta_.size(), tb_.size()}};
        while (!todo.empty()) {
            auto [i, j] = todo.back();
            todo.pop_back();
            backtrace(i, j, out, todo);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    const FlatTree& left() const { return ta_; }
    const FlatTree& right() const { return tb_; }

private:
    FlatTree ta_, tb_;
    std::vector<std::vector<int>> td_;
    // forest distance table for the most recent forest_dist call, with offsets
    std::vector<std::vector<int>> fd_;
    int off_x_ = 0, off_y_ = 0;

    int cost_relabel(int x, int y) const {
        return label_equal(*ta_.node[x], *tb_.node[y]) ? 0 : 1;
    }

    int& fd(int x, int y) { return fd_[static_cast<size_t>(x - off_x_)][static_cast<size_t>(y - off_y_)]; }

    void forest_dist(int i, int j, bool* dummy) {
        (void)dummy;
        int li = ta_.lml[i];
        int lj = tb_.lml[j];
        off_x_ = li - 1;
        off_y_ = lj - 1;
        fd_.assign(static_cast<size_t>(i - li + 2),
                   std::vector<int>(static_cast<size_t>(j - lj + 2), 0));
        for (int x = li; x <= i; ++x) fd(x, lj - 1) = fd(x - 1, lj - 1) + 1;
        for (int y = lj; y <= j; ++y) fd(li - 1, y) = fd(li - 1, y - 1) + 1;
        for (int x = li; x <= i; ++x) {
            for (int y = lj; y <= j; ++y) {
                if (ta_.lml[x] == li && tb_.lml[y] == lj) {
                    int v = std::min({fd(x - 1, y) + 1, fd(x, y - 1) + 1,
                                      fd(x - 1, y - 1) + cost_relabel(x, y)});
                    fd(x, y) = v;
                    td_[static_cast<size_t>(x)][static_cast<size_t>(y)] = v;
                } else {
                    fd(x, y) = std::min({fd(x - 1, y) + 1, fd(x, y - 1) + 1,
                                         fd(ta_.lml[x] - 1, tb_.lml[y] - 1) +
                                             td_[static_cast<size_t>(x)][static_cast<size_t>(y)]});
                }
            }
        }
    }

    // Walk one forest table backwards; ties resolved toward matching, then
    // deletion, keeping the output deterministic.
    void backtrace(int i, int j, std::vector<std::pair<int, int>>& out,
                   std::vector<std::pair<int, int>>& todo) {
        forest_dist(i, j, nullptr);
        int li = ta_.lml[i];
        int lj = tb_.lml[j];
        int x = i, y = j;
        while (x >= li || y >= lj) {
            if (x >= li && y >= lj) {
                bool whole = ta_.lml[x] == li && tb_.lml[y] == lj;
                if (whole && fd(x, y) == fd(x - 1, y - 1) + cost_relabel(x, y)) {
                    out.emplace_back(x, y);
                    --x;
                    --y;
                    continue;
                }
                if (!whole &&
                    fd(x, y) == fd(ta_.lml[x] - 1, tb_.lml[y] - 1) +
                                    td_[static_cast<size_t>(x)][static_cast<size_t>(y)]) {
                    todo.emplace_back(x, y);
                    x = ta_.lml[x] - 1;
                    y = tb_.lml[y] - 1;
                    continue;
                }
            }
            if (x >= li && fd(x, y) == fd(x - 1, y) + 1) {
                --x;
                continue;
            }
            --y;
        }
    }
};

}  // namespace detail

inline EditScript tree_edit_distance(const AstNode& buggy, const AstNode& fixed) {
    detail::ZhangShasha zs(buggy, fixed);
    auto pairs = zs.mapping();
    const auto& ta = zs.left();
    const auto& tb = zs.right();

    std::vector<int> match_a(static_cast<size_t>(ta.size()) + 1, 0);
    std::vector<int> match_b(static_cast<size_t>(tb.size()) + 1, 0);
    for (auto [x, y] : pairs) {
        match_a[static_cast<size_t>(x)] = y;
        match_b[static_cast<size_t>(y)] = x;
    }

    EditScript script;
    int i = 1, j = 1;
    while (i <= ta.size() || j <= tb.size()) {
        if (i <= ta.size() && match_a[static_cast<size_t>(i)] == 0) {
            script.ops.push_back({EditKind::Delete, ta.node[i]->node_id, -1});
            ++i;
        } else if (j <= tb.size() && match_b[static_cast<size_t>(j)] == 0) {
            script.ops.push_back({EditKind::Insert, -1, tb.node[j]->node_id});
            ++j;
        } else {
            EditKind k = detail::label_equal(*ta.node[i], *tb.node[j]) ? EditKind::Keep
                                                                       : EditKind::Change;
            script.ops.push_back({k, ta.node[i]->node_id, tb.node[j]->node_id});
            ++i;
            ++j;
        }
    }
    for (const auto& op : script.ops)
        if (op.kind != EditKind::Keep) ++script.cost;
    return script;
}

// ---------------------------------------------------------------------------
// Statement-level script
// ---------------------------------------------------------------------------

struct StmtOp {
    EditKind kind = EditKind::Keep;
    int source_node = -1;
    int target_node = -1;
    NodeKind source_kind = NodeKind::Block;  // valid when source_node >= 0
    NodeKind target_kind = NodeKind::Block;  // valid when target_node >= 0
    std::string source_text;
    std::string target_text;
    bool adds_exit = false;      // inserted subtree contains Return or Throw
    int sub_blocks[2] = {-1, -1};  // paired branch blocks for same-kind If pairs
};

struct StatementScript {
    struct BlockPair {
        int buggy_block = -1;  // node id, -1 when this side has no block
        int fixed_block = -1;
        std::vector<int> ops;  // indexes into `ops`, local statement sequence
    };
    std::vector<StmtOp> ops;
    std::vector<BlockPair> blocks;  // [0] is the body pair
    int cost = 0;
};

namespace detail {

class StatementLifter {
public:
    StatementLifter(const AstNode& buggy_body, const AstNode& fixed_body,
                    const EditScript& node_script)
        : buggy_body_(buggy_body), fixed_body_(fixed_body) {
        index_tree(buggy_body_, buggy_nodes_, buggy_parent_);
        index_tree(fixed_body_, fixed_nodes_, fixed_parent_);
        for (const auto& op : node_script.ops) {
            if (op.kind == EditKind::Keep || op.kind == EditKind::Change) {
                fwd_[op.source_node] = op.target_node;
                rev_[op.target_node] = op.source_node;
            }
        }
    }

    StatementScript run() {
        lift_block(&buggy_body_, &fixed_body_);
        for (const auto& op : script_.ops)
            if (op.kind != EditKind::Keep) ++script_.cost;
        return std::move(script_);
    }

private:
    const AstNode& buggy_body_;
    const AstNode& fixed_body_;
    std::map<int, const AstNode*> buggy_nodes_, fixed_nodes_;
    std::map<int, const AstNode*> buggy_parent_, fixed_parent_;
    std::map<int, int> fwd_, rev_;
    StatementScript script_;

    static void index_tree(const AstNode& root, std::map<int, const AstNode*>& nodes,
                           std::map<int, const AstNode*>& parent) {
        nodes[root.node_id] = &root;
        walk_preorder(root, [&](const AstNode& n) {
            nodes[n.node_id] = &n;
            for (const auto& c : n.children) parent[c->node_id] = &n;
        });
    }

    // bS pairs with fS only when the node mapping links them and both sit in
    // the currently paired blocks; anything else is demoted to delete+insert.
    const AstNode* partner_in(const AstNode& b_stmt, const AstNode* f_block) const {
        auto it = fwd_.find(b_stmt.node_id);
        if (it == fwd_.end() || !f_block) return nullptr;
        auto fn = fixed_nodes_.find(it->second);
        if (fn == fixed_nodes_.end()) return nullptr;
        const AstNode* f = fn->second;
        if (!is_statement_kind(f->kind)) return nullptr;
        auto par = fixed_parent_.find(f->node_id);
        if (par == fixed_parent_.end() || par->second != f_block) return nullptr;
        return f;
    }

    bool subtree_fully_kept(const AstNode& b, const AstNode& f) const {
        if (!label_equal(b, f)) return false;
        if (b.children.size() != f.children.size()) return false;
        auto it = fwd_.find(b.node_id);
        if (it == fwd_.end() || it->second != f.node_id) return false;
        for (size_t i = 0; i < b.children.size(); ++i)
            if (!subtree_fully_kept(*b.children[i], *f.children[i])) return false;
        return true;
    }

    static bool contains_exit(const AstNode& n) {
        if (is_return_or_throw(n.kind)) return true;
        for (const auto& c : n.children)
            if (contains_exit(*c)) return true;
        return false;
    }

    int emit(StmtOp op) {
        script_.ops.push_back(std::move(op));
        return static_cast<int>(script_.ops.size()) - 1;
    }

    void one_sided(const AstNode& stmt, EditKind kind, int block_idx) {
        StmtOp op;
        op.kind = kind;
        if (kind == EditKind::Delete) {
            op.source_node = stmt.node_id;
            op.source_kind = stmt.kind;
            op.source_text = pretty_stmt(stmt);
        } else {
            op.target_node = stmt.node_id;
            op.target_kind = stmt.kind;
            op.target_text = pretty_stmt(stmt);
            op.adds_exit = contains_exit(stmt);
        }
        int idx = emit(std::move(op));
        script_.blocks[static_cast<size_t>(block_idx)].ops.push_back(idx);
        if (stmt.kind == NodeKind::If) {
            // branch statements still need their own one-sided ops
            const AstNode* then_b = stmt.children[1].get();
            const AstNode* else_b = stmt.children.size() == 3 ? stmt.children[2].get() : nullptr;
            int sub0, sub1 = -1;
            if (kind == EditKind::Delete) {
                sub0 = lift_block(then_b, nullptr);
                if (else_b) sub1 = lift_block(else_b, nullptr);
            } else {
                sub0 = lift_block(nullptr, then_b);
                if (else_b) sub1 = lift_block(nullptr, else_b);
            }
            script_.ops[static_cast<size_t>(idx)].sub_blocks[0] = sub0;
            script_.ops[static_cast<size_t>(idx)].sub_blocks[1] = sub1;
        }
        // loops stay opaque: the whole subtree is covered by this op
    }

    int lift_block(const AstNode* b_block, const AstNode* f_block) {
        script_.blocks.push_back({b_block ? b_block->node_id : -1,
                                  f_block ? f_block->node_id : -1,
                                  {}});
        int block_idx = static_cast<int>(script_.blocks.size()) - 1;

        std::vector<const AstNode*> bs, fs;
        if (b_block)
            for (const auto& c : b_block->children) bs.push_back(c.get());
        if (f_block)
            for (const auto& c : f_block->children) fs.push_back(c.get());

        size_t i = 0, j = 0;
        while (i < bs.size() || j < fs.size()) {
            const AstNode* b = i < bs.size() ? bs[i] : nullptr;
            const AstNode* f = j < fs.size() ? fs[j] : nullptr;
            const AstNode* bp = b ? partner_in(*b, f_block) : nullptr;
            const AstNode* fp = nullptr;
            if (f) {
                auto it = rev_.find(f->node_id);
                if (it != rev_.end()) {
                    auto bn = buggy_nodes_.find(it->second);
                    if (bn != buggy_nodes_.end() && is_statement_kind(bn->second->kind) &&
                        b_block) {
                        auto par = buggy_parent_.find(it->second);
                        if (par != buggy_parent_.end() && par->second == b_block)
                            fp = bn->second;
                    }
                }
            }
            if (b && !bp) {
                one_sided(*b, EditKind::Delete, block_idx);
                ++i;
                continue;
            }
            if (f && !fp) {
                one_sided(*f, EditKind::Insert, block_idx);
                ++j;
                continue;
            }
            // paired; order preservation of the mapping makes them partners
            StmtOp op;
            op.kind = subtree_fully_kept(*b, *bp) ? EditKind::Keep : EditKind::Change;
            op.source_node = b->node_id;
            op.target_node = bp->node_id;
            op.source_kind = b->kind;
            op.target_kind = bp->kind;
            op.source_text = pretty_stmt(*b);
            op.target_text = pretty_stmt(*bp);
            int idx = emit(std::move(op));
            script_.blocks[static_cast<size_t>(block_idx)].ops.push_back(idx);
            if (b->kind == NodeKind::If && bp->kind == NodeKind::If) {
                const AstNode* b_else = b->children.size() == 3 ? b->children[2].get() : nullptr;
                const AstNode* f_else = bp->children.size() == 3 ? bp->children[2].get() : nullptr;
                int sub0 = lift_block(b->children[1].get(), bp->children[1].get());
                int sub1 = (b_else || f_else) ? lift_block(b_else, f_else) : -1;
                script_.ops[static_cast<size_t>(idx)].sub_blocks[0] = sub0;
                script_.ops[static_cast<size_t>(idx)].sub_blocks[1] = sub1;
            }
            ++i;
            ++j;
        }
        return block_idx;
    }
};

}  // namespace detail

inline StatementScript lift_to_statements(const AstNode& buggy_body, const AstNode& fixed_body,
                                          const EditScript& node_script) {
    return detail::StatementLifter(buggy_body, fixed_body, node_script).run();
}

inline StatementScript statement_script(const FunctionDef& buggy, const FunctionDef& fixed) {
    EditScript node_script = tree_edit_distance(*buggy.body, *fixed.body);
    return lift_to_statements(*buggy.body, *fixed.body, node_script);
}

}  // namespace fep
