#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fep {

enum class NodeKind {
    Block,
    VarDecl,
    Assign,
    If,
    While,
    For,
    Return,
    Throw,
    ExprStmt,
    Output,
    Call,
    BinOp,
    UnOp,
    Index,
    Literal,
    VarRef,
};

inline const char* node_kind_name(NodeKind k) {
    switch (k) {
    case NodeKind::Block: return "Block";
    case NodeKind::VarDecl: return "VarDecl";
    case NodeKind::Assign: return "Assign";
    case NodeKind::If: return "If";
    case NodeKind::While: return "While";
    case NodeKind::For: return "For";
    case NodeKind::Return: return "Return";
    case NodeKind::Throw: return "Throw";
    case NodeKind::ExprStmt: return "ExprStmt";
    case NodeKind::Output: return "Output";
    case NodeKind::Call: return "Call";
    case NodeKind::BinOp: return "BinOp";
    case NodeKind::UnOp: return "UnOp";
    case NodeKind::Index: return "Index";
    case NodeKind::Literal: return "Literal";
    case NodeKind::VarRef: return "VarRef";
    }
    return "?";
}

inline std::optional<NodeKind> node_kind_from_name(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(NodeKind::VarRef); ++i) {
        auto k = static_cast<NodeKind>(i);
        if (s == node_kind_name(k)) return k;
    }
    return std::nullopt;
}

enum class TypeTag { Int, Bool, IntArray, Void };

inline const char* type_name(TypeTag t) {
    switch (t) {
    case TypeTag::Int: return "int";
    case TypeTag::Bool: return "bool";
    case TypeTag::IntArray: return "int[]";
    case TypeTag::Void: return "void";
    }
    return "?";
}

struct Span {
    int line = 0;
    int column = 0;
};

struct AstNode {
    NodeKind kind = NodeKind::Block;
    std::string token;  // operator, identifier or literal payload
    Span span;
    int node_id = -1;
    std::vector<std::unique_ptr<AstNode>> children;

    AstNode() = default;
    AstNode(NodeKind k, std::string tok, Span sp) : kind(k), token(std::move(tok)), span(sp) {}

    std::unique_ptr<AstNode> clone() const {
        auto copy = std::make_unique<AstNode>(kind, token, span);
        copy->node_id = node_id;
        copy->children.reserve(children.size());
        for (const auto& c : children) copy->children.push_back(c->clone());
        return copy;
    }
};

// Statement-kind nodes; Block is a container, everything below BinOp an expression.
inline bool is_statement_kind(NodeKind k) {
    switch (k) {
    case NodeKind::VarDecl:
    case NodeKind::Assign:
    case NodeKind::If:
    case NodeKind::While:
    case NodeKind::For:
    case NodeKind::Return:
    case NodeKind::Throw:
    case NodeKind::ExprStmt:
    case NodeKind::Output:
        return true;
    default:
        return false;
    }
}

inline bool is_loop_kind(NodeKind k) { return k == NodeKind::While || k == NodeKind::For; }

inline bool is_return_or_throw(NodeKind k) { return k == NodeKind::Return || k == NodeKind::Throw; }

struct Param {
    std::string name;
    TypeTag type = TypeTag::Int;
};

struct FunctionDef {
    std::string name;
    std::vector<Param> params;
    TypeTag return_type = TypeTag::Void;
    std::unique_ptr<AstNode> body;  // Block

    FunctionDef() = default;
    FunctionDef(const FunctionDef& other)
        : name(other.name), params(other.params), return_type(other.return_type),
          body(other.body ? other.body->clone() : nullptr) {}
    FunctionDef& operator=(const FunctionDef& other) {
        if (this != &other) {
            name = other.name;
            params = other.params;
            return_type = other.return_type;
            body = other.body ? other.body->clone() : nullptr;
        }
        return *this;
    }
    FunctionDef(FunctionDef&&) = default;
    FunctionDef& operator=(FunctionDef&&) = default;
};

struct GlobalDecl {
    std::string name;
    TypeTag type = TypeTag::Int;
    std::unique_ptr<AstNode> init;  // constant expression, may be null (default value)

    GlobalDecl() = default;
    GlobalDecl(const GlobalDecl& other)
        : name(other.name), type(other.type), init(other.init ? other.init->clone() : nullptr) {}
    GlobalDecl& operator=(const GlobalDecl& other) {
        if (this != &other) {
            name = other.name;
            type = other.type;
            init = other.init ? other.init->clone() : nullptr;
        }
        return *this;
    }
    GlobalDecl(GlobalDecl&&) = default;
    GlobalDecl& operator=(GlobalDecl&&) = default;
};

struct SourceUnit {
    std::vector<GlobalDecl> globals;
    std::vector<FunctionDef> functions;
    std::optional<std::string> entry;  // set when a function named "main" exists

    const FunctionDef* find_function(const std::string& fn_name) const {
        for (const auto& f : functions)
            if (f.name == fn_name) return &f;
        return nullptr;
    }
    FunctionDef* find_function(const std::string& fn_name) {
        for (auto& f : functions)
            if (f.name == fn_name) return &f;
        return nullptr;
    }
};

template <typename Fn>
void walk_preorder(const AstNode& node, Fn&& fn) {
    fn(node);
    for (const auto& c : node.children) walk_preorder(*c, fn);
}

template <typename Fn>
void walk_preorder(AstNode& node, Fn&& fn) {
    fn(node);
    for (auto& c : node.children) walk_preorder(*c, fn);
}

// Preorder ids over global initializers (declaration order) then function bodies.
inline void renumber_preorder(SourceUnit& unit) {
    int next = 0;
    for (auto& g : unit.globals)
        if (g.init) walk_preorder(*g.init, [&](AstNode& n) { n.node_id = next++; });
    for (auto& f : unit.functions)
        if (f.body) walk_preorder(*f.body, [&](AstNode& n) { n.node_id = next++; });
}

inline const AstNode* find_node(const SourceUnit& unit, int node_id) {
    const AstNode* hit = nullptr;
    auto scan = [&](const AstNode& n) {
        if (n.node_id == node_id) hit = &n;
    };
    for (const auto& g : unit.globals)
        if (g.init) walk_preorder(*g.init, scan);
    for (const auto& f : unit.functions)
        if (f.body) walk_preorder(*f.body, scan);
    return hit;
}

inline bool structurally_equal(const AstNode& a, const AstNode& b) {
    if (a.kind != b.kind || a.token != b.token) return false;
    if (a.children.size() != b.children.size()) return false;
    for (size_t i = 0; i < a.children.size(); ++i)
        if (!structurally_equal(*a.children[i], *b.children[i])) return false;
    return true;
}

inline bool structurally_equal(const FunctionDef& a, const FunctionDef& b) {
    if (a.name != b.name || a.return_type != b.return_type) return false;
    if (a.params.size() != b.params.size()) return false;
    for (size_t i = 0; i < a.params.size(); ++i)
        if (a.params[i].name != b.params[i].name || a.params[i].type != b.params[i].type)
            return false;
    if (!a.body != !b.body) return false;
    return !a.body || structurally_equal(*a.body, *b.body);
}

inline bool structurally_equal(const SourceUnit& a, const SourceUnit& b) {
    if (a.globals.size() != b.globals.size() || a.functions.size() != b.functions.size())
        return false;
    if (a.entry != b.entry) return false;
    for (size_t i = 0; i < a.globals.size(); ++i) {
        const auto& ga = a.globals[i];
        const auto& gb = b.globals[i];
        if (ga.name != gb.name || ga.type != gb.type || !ga.init != !gb.init) return false;
        if (ga.init && !structurally_equal(*ga.init, *gb.init)) return false;
    }
    for (size_t i = 0; i < a.functions.size(); ++i)
        if (!structurally_equal(a.functions[i], b.functions[i])) return false;
    return true;
}

// Statements in a function body, loops opaque (their bodies contribute nothing).
inline int statement_count(const AstNode& block) {
    int n = 0;
    for (const auto& child : block.children) {
        if (!is_statement_kind(child->kind)) continue;
        ++n;
        if (child->kind == NodeKind::If) {
            n += statement_count(*child->children[1]);
            if (child->children.size() == 3) n += statement_count(*child->children[2]);
        }
    }
    return n;
}

inline int statement_count(const FunctionDef& fn) {
    return fn.body ? statement_count(*fn.body) : 0;
}

}  // namespace fep
