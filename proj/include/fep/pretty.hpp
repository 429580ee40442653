#pragma once

#include <string>

#include "fep/ast.hpp"
#include "fep/validator.hpp"

namespace fep {

namespace detail {

inline int op_precedence(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    return 6;  // * / %
}

inline int expr_precedence(const AstNode& e) {
    switch (e.kind) {
    case NodeKind::BinOp: return op_precedence(e.token);
    case NodeKind::UnOp: return e.token == "len" ? 8 : 7;
    default: return 8;
    }
}

inline std::string expr_text(const AstNode& e) {
    switch (e.kind) {
    case NodeKind::Literal: {
        if (e.token != "array") return e.token;
        std::string s = "[";
        for (size_t i = 0; i < e.children.size(); ++i) {
            if (i) s += ", ";
            s += expr_text(*e.children[i]);
        }
        return s + "]";
    }
    case NodeKind::VarRef:
        return e.token;
    case NodeKind::Call: {
        std::string s = e.token + "(";
        for (size_t i = 0; i < e.children.size(); ++i) {
            if (i) s += ", ";
            s += expr_text(*e.children[i]);
        }
        return s + ")";
    }
    case NodeKind::Index: {
        const AstNode& base = *e.children[0];
        std::string b = expr_text(base);
        if (expr_precedence(base) < 8) b = "(" + b + ")";
        return b + "[" + expr_text(*e.children[1]) + "]";
    }
    case NodeKind::UnOp: {
        if (e.token == "len") return "len(" + expr_text(*e.children[0]) + ")";
        const AstNode& operand = *e.children[0];
        std::string o = expr_text(operand);
        if (expr_precedence(operand) < 7 ||
            (operand.kind == NodeKind::UnOp && operand.token != "len"))
            o = "(" + o + ")";
        return e.token + o;
    }
    case NodeKind::BinOp: {
        int prec = op_precedence(e.token);
        const AstNode& l = *e.children[0];
        const AstNode& r = *e.children[1];
        std::string ls = expr_text(l);
        std::string rs = expr_text(r);
        if (expr_precedence(l) < prec) ls = "(" + ls + ")";
        if (expr_precedence(r) <= prec) rs = "(" + rs + ")";
        return ls + " " + e.token + " " + rs;
    }
    default:
        return "?";
    }
}

inline std::string stmt_header(const AstNode& s) {
    switch (s.kind) {
    case NodeKind::VarDecl: {
        auto [name, t] = split_decl_token(s.token);
        std::string txt = "let " + name + ": " + type_name(t);
        if (!s.children.empty()) txt += " = " + expr_text(*s.children[0]);
        return txt;
    }
    case NodeKind::Assign:
        return expr_text(*s.children[0]) + " = " + expr_text(*s.children[1]);
    case NodeKind::Return:
        return s.children.empty() ? "return" : "return " + expr_text(*s.children[0]);
    case NodeKind::Throw:
        return "throw \"" + s.token + "\"";
    case NodeKind::Output:
        return "output(" + expr_text(*s.children[0]) + ")";
    case NodeKind::ExprStmt:
        return expr_text(*s.children[0]);
    default:
        return "?";
    }
}

inline void stmt_text(const AstNode& s, std::string& out, int indent);

inline void block_text(const AstNode& block, std::string& out, int indent) {
    if (block.children.empty()) {
        out += "{ }";
        return;
    }
    out += "{\n";
    for (const auto& c : block.children) stmt_text(*c, out, indent + 1);
    out.append(static_cast<size_t>(indent) * 2, ' ');
    out += "}";
}

inline void stmt_text(const AstNode& s, std::string& out, int indent) {
    out.append(static_cast<size_t>(indent) * 2, ' ');
    switch (s.kind) {
    case NodeKind::If:
        out += "if (" + expr_text(*s.children[0]) + ") ";
        block_text(*s.children[1], out, indent);
        if (s.children.size() == 3) {
            out += " else ";
            block_text(*s.children[2], out, indent);
        }
        out += "\n";
        return;
    case NodeKind::While:
        out += "while (" + expr_text(*s.children[0]) + ") ";
        block_text(*s.children[1], out, indent);
        out += "\n";
        return;
    case NodeKind::For:
        out += "for (" + stmt_header(*s.children[0]) + "; " + expr_text(*s.children[1]) + "; " +
               stmt_header(*s.children[2]) + ") ";
        block_text(*s.children[3], out, indent);
        out += "\n";
        return;
    default:
        out += stmt_header(s) + ";\n";
        return;
    }
}

}  // namespace detail

inline std::string pretty_expr(const AstNode& e) { return detail::expr_text(e); }

// Single-line rendering, used in edit script listings.
inline std::string pretty_stmt(const AstNode& s) {
    switch (s.kind) {
    case NodeKind::If: {
        std::string out = "if (" + detail::expr_text(*s.children[0]) + ") { ";
        for (const auto& c : s.children[1]->children) out += pretty_stmt(*c) + " ";
        out += "}";
        if (s.children.size() == 3) {
            out += " else { ";
            for (const auto& c : s.children[2]->children) out += pretty_stmt(*c) + " ";
            out += "}";
        }
        return out;
    }
    case NodeKind::While: {
        std::string out = "while (" + detail::expr_text(*s.children[0]) + ") { ";
        for (const auto& c : s.children[1]->children) out += pretty_stmt(*c) + " ";
        return out + "}";
    }
    case NodeKind::For: {
        std::string out = "for (" + detail::stmt_header(*s.children[0]) + "; " +
                          detail::expr_text(*s.children[1]) + "; " +
                          detail::stmt_header(*s.children[2]) + ") { ";
        for (const auto& c : s.children[3]->children) out += pretty_stmt(*c) + " ";
        return out + "}";
    }
    default:
        return detail::stmt_header(s) + ";";
    }
}

inline std::string pretty(const FunctionDef& f) {
    std::string out = "fn " + f.name + "(";
    for (size_t i = 0; i < f.params.size(); ++i) {
        if (i) out += ", ";
        out += f.params[i].name + ": " + type_name(f.params[i].type);
    }
    out += ")->" + std::string(type_name(f.return_type)) + " ";
    detail::block_text(*f.body, out, 0);
    out += "\n";
    return out;
}

inline std::string pretty(const SourceUnit& unit) {
    std::string out;
    for (const auto& g : unit.globals) {
        out += "global " + g.name + ": " + type_name(g.type);
        if (g.init) out += " = " + detail::expr_text(*g.init);
        out += ";\n";
    }
    if (!unit.globals.empty() && !unit.functions.empty()) out += "\n";
    for (size_t i = 0; i < unit.functions.size(); ++i) {
        if (i) out += "\n";
        out += pretty(unit.functions[i]);
    }
    return out;
}

}  // namespace fep
