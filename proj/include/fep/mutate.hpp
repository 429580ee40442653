#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fep/ast.hpp"
#include "fep/errors.hpp"
#include "fep/inputgen.hpp"
#include "fep/interp.hpp"
#include "fep/validator.hpp"

namespace fep {

struct Mutant {
    std::string operator_id;
    int locus_node = -1;  // node id in the parent unit
    Span locus_span;
    SourceUnit mutated;
    SourceUnit parent;
};

namespace detail {

inline const char* const kArithOps[] = {"+", "-", "*", "/", "%"};
inline const char* const kRelOps[] = {"<", "<=", ">", ">=", "==", "!="};

struct MutationCandidate {
    std::string operator_id;
    const AstNode* locus = nullptr;
    // builds the replacement subtree; null replacement means delete the statement
    std::function<std::unique_ptr<AstNode>()> build;
};

inline bool is_deletable_statement(const AstNode& n) {
    switch (n.kind) {
    case NodeKind::Assign:
    case NodeKind::ExprStmt:
    case NodeKind::Output:
    case NodeKind::If:
    case NodeKind::While:
    case NodeKind::For:
    case NodeKind::Throw:
        return true;
    default:
        return false;
    }
}

inline bool is_lvalue_position(const AstNode& parent, size_t child_idx) {
    return parent.kind == NodeKind::Assign && child_idx == 0;
}

inline bool is_expression_kind(NodeKind k) {
    switch (k) {
    case NodeKind::Call:
    case NodeKind::BinOp:
    case NodeKind::UnOp:
    case NodeKind::Index:
    case NodeKind::Literal:
    case NodeKind::VarRef:
        return true;
    default:
        return false;
    }
}

inline void collect_candidates(const AstNode& node, const AstNode* parent, size_t child_idx,
                               std::vector<MutationCandidate>& out) {
    auto relabel = [&](const char* family, const std::string& to) {
        out.push_back({std::string(family) + ":" + node.token + "->" + to, &node, [&node, to] {
                           auto copy = node.clone();
                           copy->token = to;
                           return copy;
                       }});
    };

    if (node.kind == NodeKind::BinOp) {
        bool arith = false, rel = false;
        for (const char* op : kArithOps) arith = arith || node.token == op;
        for (const char* op : kRelOps) rel = rel || node.token == op;
        if (arith)
            for (const char* op : kArithOps)
                if (node.token != op) relabel("aor", op);
        if (rel)
            for (const char* op : kRelOps)
                if (node.token != op) relabel("ror", op);
        if (node.token == "&&") relabel("lor", "||");
        if (node.token == "||") relabel("lor", "&&");
    }

    if (node.kind == NodeKind::Literal && node.token != "array" && node.token != "true" &&
        node.token != "false") {
        int64_t c = std::stoll(node.token);
        std::vector<int64_t> seen;
        auto literal = [&](int64_t v) {
            std::string tok = std::to_string(v);
            if (tok == node.token) return;
            for (int64_t s : seen)
                if (s == v) return;
            seen.push_back(v);
            out.push_back({"crp:" + node.token + "->" + tok, &node, [&node, tok] {
                               auto lit = std::make_unique<AstNode>(NodeKind::Literal, tok,
                                                                    node.span);
                               return lit;
                           }});
        };
        literal(0);
        literal(1);
        if (c != INT64_MAX) literal(c + 1);
        if (c != 0) {
            out.push_back({"crp:" + node.token + "->-" + node.token, &node, [&node] {
                               auto neg = std::make_unique<AstNode>(NodeKind::UnOp, "-",
                                                                    node.span);
                               neg->children.push_back(node.clone());
                               return neg;
                           }});
        }
    }

    // unary insertion; the validator drops the ill-typed wrappings later
    bool lvalue = parent && is_lvalue_position(*parent, child_idx);
    if (is_expression_kind(node.kind) && !lvalue) {
        for (const char* op : {"-", "!"}) {
            out.push_back({std::string("uoi:") + op, &node, [&node, op] {
                               auto wrap = std::make_unique<AstNode>(NodeKind::UnOp, op,
                                                                     node.span);
                               wrap->children.push_back(node.clone());
                               return wrap;
                           }});
        }
    }

    if (parent && parent->kind == NodeKind::Block && is_deletable_statement(node))
        out.push_back({"sdl", &node, nullptr});

    for (size_t i = 0; i < node.children.size(); ++i)
        collect_candidates(*node.children[i], &node, i, out);
}

inline bool apply_to_clone(SourceUnit& clone, const MutationCandidate& cand) {
    AstNode* parent = nullptr;
    size_t idx = 0;
    for (auto& f : clone.functions) {
        if (!f.body) continue;
        walk_preorder(*f.body, [&](AstNode& n) {
            for (size_t i = 0; i < n.children.size(); ++i)
                if (n.children[i]->node_id == cand.locus->node_id) {
                    parent = &n;
                    idx = i;
                }
        });
    }
    if (!parent) return false;
    if (cand.build) {
        parent->children[idx] = cand.build();
    } else {
        parent->children.erase(parent->children.begin() + static_cast<long>(idx));
    }
    renumber_preorder(clone);
    return true;
}

}  // namespace detail

// One mutant per applicable (operator, locus); every mutant re-validates and
// differs from the parent at exactly that locus.
inline std::vector<Mutant> generate_mutants(const SourceUnit& unit, const std::string& fn_name) {
    const FunctionDef* fn = unit.find_function(fn_name);
    if (!fn) throw DomainError("generate_mutants: no function named '" + fn_name + "'");
    if (statement_count(*fn) <= 1)
        throw DomainError("generate_mutants: '" + fn_name + "' has a single statement");

    std::vector<detail::MutationCandidate> candidates;
    detail::collect_candidates(*fn->body, nullptr, 0, candidates);

    std::vector<Mutant> mutants;
    for (const auto& cand : candidates) {
        SourceUnit clone;
        clone.globals = unit.globals;
        clone.functions = unit.functions;
        clone.entry = unit.entry;
        if (!detail::apply_to_clone(clone, cand)) continue;
        try {
            validate(clone);
        } catch (const TypeError&) {
            continue;
        }
        if (structurally_equal(clone, unit)) continue;
        Mutant m;
        m.operator_id = cand.operator_id;
        m.locus_node = cand.locus->node_id;
        m.locus_span = cand.locus->span;
        m.mutated = std::move(clone);
        m.parent = unit;
        mutants.push_back(std::move(m));
    }
    return mutants;
}

struct KillabilityResult {
    bool killed = false;
    std::vector<std::string> killing_inputs;
    int64_t executions = 0;
};

// Strong kill: some pool input makes the externally observable state differ.
inline KillabilityResult strong_kill_filter(const Mutant& mutant, const std::string& fn_name,
                                            const InputPool& pool,
                                            const std::vector<int>& mutated_lines,
                                            const ExecLimits& limits = {}) {
    KillabilityResult result;
    bool covered = false;
    for (const auto& [id, input] : pool.inputs) {
        ExecutionOutcome mut = execute_unit(mutant.mutated, fn_name, input, {}, limits);
        ExecutionOutcome ref = execute_unit(mutant.parent, fn_name, input, {}, limits);
        ++result.executions;
        for (int line : mutated_lines)
            if (mut.coverage.count(line)) covered = true;
        if (mut.ext != ref.ext) {
            result.killed = true;
            result.killing_inputs.push_back(id);
        }
    }
    if (!covered)
        throw NoCoveringInput("pool never reaches the mutated statement");
    return result;
}

}  // namespace fep
