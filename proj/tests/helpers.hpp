#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "fep/ast.hpp"
#include "fep/json_io.hpp"
#include "fep/parser.hpp"

#ifndef FEP_REPO_DIR
#define FEP_REPO_DIR "."
#endif

namespace test {

inline std::string corpus_path(const std::string& name) {
    return std::string(FEP_REPO_DIR) + "/corpus/" + name;
}

inline fep::SourceUnit load_corpus(const std::string& name) {
    return fep::parse(fep::slurp(corpus_path(name)));
}

inline const fep::FunctionDef& fn_of(const fep::SourceUnit& u, const std::string& name) {
    const fep::FunctionDef* f = u.find_function(name);
    REQUIRE(f != nullptr);
    return *f;
}

// ---- synthetic labeled trees for the edit distance oracle -------------------

inline std::unique_ptr<fep::AstNode> leaf(const std::string& label) {
    return std::make_unique<fep::AstNode>(fep::NodeKind::Literal, label, fep::Span{0, 0});
}

template <typename... Kids>
std::unique_ptr<fep::AstNode> tree(const std::string& label, Kids... kids) {
    auto n = leaf(label);
    (n->children.push_back(std::move(kids)), ...);
    return n;
}

inline void number_tree(fep::AstNode& root) {
    int next = 0;
    fep::walk_preorder(root, [&](fep::AstNode& n) { n.node_id = next++; });
}

// Minimal-cost valid mapping by exhaustive search; this is the mapping-based
// definition of tree edit distance, independent of the dynamic program.
class BruteForceTed {
public:
    BruteForceTed(const fep::AstNode& a, const fep::AstNode& b) {
        index(a, pre_a_, anc_a_);
        index(b, pre_b_, anc_b_);
    }

    int distance() {
        best_ = static_cast<int>(pre_a_.size() + pre_b_.size());
        used_b_.assign(pre_b_.size(), false);
        pairs_.clear();
        search(0, 0);
        return best_;
    }

private:
    std::vector<const fep::AstNode*> pre_a_, pre_b_;
    std::vector<std::vector<bool>> anc_a_, anc_b_;
    std::vector<bool> used_b_;
    std::vector<std::pair<size_t, size_t>> pairs_;
    int best_ = 0;

    static void index(const fep::AstNode& root, std::vector<const fep::AstNode*>& pre,
                      std::vector<std::vector<bool>>& anc) {
        pre.clear();
        collect(root, pre);
        size_t n = pre.size();
        anc.assign(n, std::vector<bool>(n, false));
        mark(root, pre, anc, {});
    }
    static void collect(const fep::AstNode& n, std::vector<const fep::AstNode*>& pre) {
        pre.push_back(&n);
        for (const auto& c : n.children) collect(*c, pre);
    }
    static size_t idx_of(const fep::AstNode& n, const std::vector<const fep::AstNode*>& pre) {
        for (size_t i = 0; i < pre.size(); ++i)
            if (pre[i] == &n) return i;
        return 0;
    }
    static void mark(const fep::AstNode& n, const std::vector<const fep::AstNode*>& pre,
                     std::vector<std::vector<bool>>& anc, std::vector<size_t> ancestors) {
        size_t me = idx_of(n, pre);
        for (size_t a : ancestors) anc[a][me] = true;
        ancestors.push_back(me);
        for (const auto& c : n.children) mark(*c, pre, anc, ancestors);
    }

    bool consistent(size_t i, size_t j) const {
        for (auto [p, q] : pairs_) {
            bool anc_ap = anc_a_[p][i];
            bool anc_bq = anc_b_[q][j];
            if (anc_ap != anc_bq) return false;
            if (anc_b_[j][q]) return false;  // j above an earlier match; i never is
            if (!anc_ap && q > j) return false;  // left-of must be preserved
        }
        return true;
    }

    void search(size_t i, int cost) {
        if (cost >= best_) return;
        if (i == pre_a_.size()) {
            int unmatched_b = 0;
            for (bool u : used_b_)
                if (!u) ++unmatched_b;
            best_ = std::min(best_, cost + unmatched_b);
            return;
        }
        for (size_t j = 0; j < pre_b_.size(); ++j) {
            if (used_b_[j] || !consistent(i, j)) continue;
            int relabel = (pre_a_[i]->kind == pre_b_[j]->kind &&
                           pre_a_[i]->token == pre_b_[j]->token)
                              ? 0
                              : 1;
            used_b_[j] = true;
            pairs_.emplace_back(i, j);
            search(i + 1, cost + relabel);
            pairs_.pop_back();
            used_b_[j] = false;
        }
        search(i + 1, cost + 1);  // delete a[i]
    }
};

inline int brute_force_ted(const fep::AstNode& a, const fep::AstNode& b) {
    return BruteForceTed(a, b).distance();
}

// All ordered trees with n nodes labeled over the alphabet, built fresh per call.
inline std::vector<std::unique_ptr<fep::AstNode>> all_labeled_trees(
    int n, const std::vector<std::string>& alphabet) {
    std::vector<std::unique_ptr<fep::AstNode>> out;
    if (n == 1) {
        for (const auto& l : alphabet) out.push_back(leaf(l));
        return out;
    }
    // root label x composition of n-1 into child subtree sizes
    std::vector<std::vector<int>> compositions;
    std::vector<int> cur;
    std::function<void(int)> comp = [&](int rest) {
        if (rest == 0) {
            compositions.push_back(cur);
            return;
        }
        for (int k = 1; k <= rest; ++k) {
            cur.push_back(k);
            comp(rest - k);
            cur.pop_back();
        }
    };
    comp(n - 1);
    for (const auto& sizes : compositions) {
        std::vector<std::vector<std::unique_ptr<fep::AstNode>>> child_sets;
        for (int k : sizes) child_sets.push_back(all_labeled_trees(k, alphabet));
        std::vector<size_t> pick(sizes.size(), 0);
        for (;;) {
            for (const auto& root_label : alphabet) {
                auto root = leaf(root_label);
                for (size_t c = 0; c < sizes.size(); ++c)
                    root->children.push_back(child_sets[c][pick[c]]->clone());
                out.push_back(std::move(root));
            }
            size_t c = 0;
            while (c < pick.size() && ++pick[c] == child_sets[c].size()) pick[c++] = 0;
            if (c == pick.size()) break;
        }
    }
    return out;
}

inline std::unique_ptr<fep::AstNode> random_labeled_tree(std::mt19937_64& rng, int max_nodes,
                                                         const std::vector<std::string>& alphabet) {
    int n = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_nodes));
    std::vector<std::unique_ptr<fep::AstNode>> nodes;
    nodes.push_back(leaf(alphabet[rng() % alphabet.size()]));
    std::vector<fep::AstNode*> flat{nodes[0].get()};
    for (int i = 1; i < n; ++i) {
        auto child = leaf(alphabet[rng() % alphabet.size()]);
        fep::AstNode* parent = flat[rng() % flat.size()];
        parent->children.push_back(std::move(child));
        flat.push_back(parent->children.back().get());
    }
    return std::move(nodes[0]);
}

// ---- random valid programs ---------------------------------------------------

// Valid by construction: fresh names, typed expressions, bounded loops.
class ProgramGen {
public:
    explicit ProgramGen(uint64_t seed) : rng_(seed) {}

    fep::SourceUnit unit() {
        src_.clear();
        next_var_ = 0;
        int_vars_ = {"x"};
        src_ += "fn f(x: int";
        bool has_arr = chance(2);
        if (has_arr) src_ += ", a: int[]";
        src_ += ")->int {\n";
        arr_vars_.clear();
        if (has_arr) arr_vars_.push_back("a");
        int stmts = 2 + static_cast<int>(rng_() % 4);
        for (int i = 0; i < stmts; ++i) statement(1);
        src_ += "  return " + int_expr(2) + ";\n}\n";
        return fep::parse(src_);
    }

    std::string source() const { return src_; }

private:
    std::mt19937_64 rng_;
    std::string src_;
    int next_var_ = 0;
    std::vector<std::string> int_vars_;
    std::vector<std::string> arr_vars_;

    bool chance(int one_in) { return rng_() % static_cast<uint64_t>(one_in) == 0; }
    std::string fresh() { return "v" + std::to_string(next_var_++); }
    const std::string& any_int_var() { return int_vars_[rng_() % int_vars_.size()]; }

    std::string int_expr(int depth) {
        switch (depth <= 0 ? rng_() % 2 : rng_() % 6) {
        case 0: return std::to_string(static_cast<int64_t>(rng_() % 41) - 20);
        case 1: return any_int_var();
        case 2: {
            const char* ops[] = {"+", "-", "*", "/", "%"};
            return "(" + int_expr(depth - 1) + " " + ops[rng_() % 5] + " " +
                   int_expr(depth - 1) + ")";
        }
        case 3: return "(-" + int_expr(depth - 1) + ")";
        case 4:
            if (!arr_vars_.empty()) return "len(" + arr_vars_[0] + ")";
            return any_int_var();
        default:
            if (!arr_vars_.empty()) return arr_vars_[0] + "[" + int_expr(depth - 1) + "]";
            return std::to_string(static_cast<int64_t>(rng_() % 9));
        }
    }

    std::string bool_expr(int depth) {
        switch (depth <= 0 ? 0 : rng_() % 4) {
        case 0: {
            const char* ops[] = {"<", "<=", ">", ">=", "==", "!="};
            return "(" + int_expr(depth - 1) + " " + ops[rng_() % 6] + " " +
                   int_expr(depth - 1) + ")";
        }
        case 1: return "(" + bool_expr(depth - 1) + " && " + bool_expr(depth - 1) + ")";
        case 2: return "(" + bool_expr(depth - 1) + " || " + bool_expr(depth - 1) + ")";
        default: return "(!" + bool_expr(depth - 1) + ")";
        }
    }

    void indent(int level) { src_.append(static_cast<size_t>(level) * 2, ' '); }

    void statement(int level) {
        switch (rng_() % 5) {
        case 0: {
            std::string v = fresh();
            indent(level);
            src_ += "let " + v + ": int = " + int_expr(2) + ";\n";
            int_vars_.push_back(v);
            return;
        }
        case 1:
            indent(level);
            src_ += any_int_var() + " = " + int_expr(2) + ";\n";
            return;
        case 2: {
            indent(level);
            src_ += "if (" + bool_expr(2) + ") {\n";
            statement(level + 1);
            indent(level);
            if (chance(2)) {
                src_ += "} else {\n";
                statement(level + 1);
                indent(level);
            }
            src_ += "}\n";
            return;
        }
        case 3: {
            // bounded counting loop
            std::string i = fresh();
            int bound = 1 + static_cast<int>(rng_() % 6);
            indent(level);
            src_ += "let " + i + ": int = 0;\n";
            indent(level);
            src_ += "while (" + i + " < " + std::to_string(bound) + ") {\n";
            int_vars_.push_back(i);
            statement(level + 1);
            indent(level + 1);
            src_ += i + " = " + i + " + 1;\n";
            indent(level);
            src_ += "}\n";
            return;
        }
        default:
            indent(level);
            src_ += "output(" + int_expr(2) + ");\n";
            return;
        }
    }
};

}  // namespace test
