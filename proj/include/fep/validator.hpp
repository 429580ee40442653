#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fep/ast.hpp"
#include "fep/errors.hpp"

namespace fep {

inline std::pair<std::string, TypeTag> split_decl_token(const std::string& token) {
    auto colon = token.find(':');
    std::string name = token.substr(0, colon);
    std::string ty = token.substr(colon + 1);
    TypeTag t = TypeTag::Int;
    if (ty == "bool") t = TypeTag::Bool;
    else if (ty == "int[]") t = TypeTag::IntArray;
    return {name, t};
}

namespace detail {

class Validator {
public:
    explicit Validator(const SourceUnit& unit) : unit_(unit) {}

    void run() {
        std::set<std::string> global_names;
        for (const auto& g : unit_.globals) {
            if (!global_names.insert(g.name).second)
                err(g.init ? g.init->span : Span{0, 0}, "duplicate global '" + g.name + "'");
            if (g.init) check_const_init(*g.init, g.type);
        }
        std::set<std::string> fn_names;
        for (const auto& f : unit_.functions)
            if (!fn_names.insert(f.name).second)
                err(f.body->span, "duplicate function '" + f.name + "'");
        if (unit_.entry && !unit_.find_function(*unit_.entry))
            err(Span{0, 0}, "entry function '" + *unit_.entry + "' not defined");
        for (const auto& f : unit_.functions) check_function(f);
    }

private:
    const SourceUnit& unit_;
    const FunctionDef* fn_ = nullptr;
    std::vector<std::map<std::string, TypeTag>> scopes_;

    [[noreturn]] static void err(Span sp, const std::string& msg) {
        throw TypeError(sp.line, sp.column, msg);
    }

    const TypeTag* lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto hit = it->find(name);
            if (hit != it->end()) return &hit->second;
        }
        return nullptr;
    }

    void declare(Span sp, const std::string& name, TypeTag t) {
        if (lookup(name)) err(sp, "'" + name + "' shadows an existing declaration");
        scopes_.back()[name] = t;
    }

    void check_const_init(const AstNode& e, TypeTag want) {
        TypeTag got;
        if (e.kind == NodeKind::Literal && e.token != "array") {
            got = (e.token == "true" || e.token == "false") ? TypeTag::Bool : TypeTag::Int;
        } else if (e.kind == NodeKind::UnOp && e.token == "-") {
            check_const_init(*e.children[0], TypeTag::Int);
            got = TypeTag::Int;
        } else if (e.kind == NodeKind::Literal && e.token == "array") {
            for (const auto& c : e.children) check_const_init(*c, TypeTag::Int);
            got = TypeTag::IntArray;
        } else {
            err(e.span, "global initializer must be a literal");
        }
        if (got != want)
            err(e.span, std::string("initializer type ") + type_name(got) + " does not match " +
                            type_name(want));
    }

    void check_function(const FunctionDef& f) {
        fn_ = &f;
        scopes_.clear();
        scopes_.emplace_back();
        for (const auto& g : unit_.globals) scopes_.back()[g.name] = g.type;
        scopes_.emplace_back();
        for (const auto& p : f.params) declare(f.body->span, p.name, p.type);
        check_block(*f.body);
        if (f.return_type != TypeTag::Void && !always_exits(*f.body))
            err(f.body->span, "function '" + f.name + "' may fall off the end without returning");
        scopes_.clear();
    }

    void check_block(const AstNode& block) {
        scopes_.emplace_back();
        for (size_t i = 0; i < block.children.size(); ++i) {
            const AstNode& s = *block.children[i];
            if (is_return_or_throw(s.kind) && i + 1 < block.children.size())
                err(block.children[i + 1]->span, "unreachable statement");
            check_stmt(s);
        }
        scopes_.pop_back();
    }

    void check_stmt(const AstNode& s) {
        switch (s.kind) {
        case NodeKind::VarDecl: {
            auto [name, t] = split_decl_token(s.token);
            if (!s.children.empty()) {
                TypeTag got = type_of(*s.children[0]);
                if (got != t)
                    err(s.span, "cannot initialize " + name + ": " + type_name(t) + " from " +
                                    type_name(got));
            }
            declare(s.span, name, t);
            break;
        }
        case NodeKind::Assign: {
            const AstNode& lhs = *s.children[0];
            TypeTag rhs = type_of(*s.children[1]);
            if (lhs.kind == NodeKind::VarRef) {
                const TypeTag* t = lookup(lhs.token);
                if (!t) err(lhs.span, "undeclared variable '" + lhs.token + "'");
                if (*t != rhs)
                    err(s.span, "cannot assign " + std::string(type_name(rhs)) + " to " +
                                    type_name(*t));
            } else {  // Index
                if (type_of(lhs) != TypeTag::Int || rhs != TypeTag::Int)
                    err(s.span, "array element assignment requires int");
            }
            break;
        }
        case NodeKind::If: {
            require(*s.children[0], TypeTag::Bool, "condition");
            check_block(*s.children[1]);
            if (s.children.size() == 3) check_block(*s.children[2]);
            break;
        }
        case NodeKind::While: {
            require(*s.children[0], TypeTag::Bool, "condition");
            check_block(*s.children[1]);
            break;
        }
        case NodeKind::For: {
            scopes_.emplace_back();  // loop header scope
            check_stmt(*s.children[0]);
            require(*s.children[1], TypeTag::Bool, "condition");
            check_stmt(*s.children[2]);
            check_block(*s.children[3]);
            scopes_.pop_back();
            break;
        }
        case NodeKind::Return: {
            if (fn_->return_type == TypeTag::Void) {
                if (!s.children.empty()) err(s.span, "void function cannot return a value");
            } else {
                if (s.children.empty()) err(s.span, "missing return value");
                require(*s.children[0], fn_->return_type, "return value");
            }
            break;
        }
        case NodeKind::Throw:
            break;
        case NodeKind::Output:
            type_of(*s.children[0]);
            break;
        case NodeKind::ExprStmt: {
            if (s.children[0]->kind != NodeKind::Call)
                err(s.span, "expression statement must be a call");
            call_type(*s.children[0]);  // void allowed here
            break;
        }
        default:
            err(s.span, "unexpected node in statement position");
        }
    }

    void require(const AstNode& e, TypeTag want, const char* what) {
        TypeTag got = type_of(e);
        if (got != want)
            err(e.span, std::string(what) + " must be " + type_name(want) + ", got " +
                            type_name(got));
    }

    TypeTag call_type(const AstNode& c) {
        const FunctionDef* callee = unit_.find_function(c.token);
        if (!callee) err(c.span, "call to undefined function '" + c.token + "'");
        if (c.children.size() != callee->params.size())
            err(c.span, "call to '" + c.token + "' expects " +
                            std::to_string(callee->params.size()) + " arguments, got " +
                            std::to_string(c.children.size()));
        for (size_t i = 0; i < c.children.size(); ++i)
            require(*c.children[i], callee->params[i].type, "argument");
        return callee->return_type;
    }

    TypeTag type_of(const AstNode& e) {
        switch (e.kind) {
        case NodeKind::Literal:
            if (e.token == "array") {
                for (const auto& c : e.children) require(*c, TypeTag::Int, "array element");
                return TypeTag::IntArray;
            }
            return (e.token == "true" || e.token == "false") ? TypeTag::Bool : TypeTag::Int;
        case NodeKind::VarRef: {
            const TypeTag* t = lookup(e.token);
            if (!t) err(e.span, "undeclared variable '" + e.token + "'");
            return *t;
        }
        case NodeKind::Call: {
            TypeTag t = call_type(e);
            if (t == TypeTag::Void) err(e.span, "void call used as a value");
            return t;
        }
        case NodeKind::Index:
            require(*e.children[0], TypeTag::IntArray, "indexed value");
            require(*e.children[1], TypeTag::Int, "index");
            return TypeTag::Int;
        case NodeKind::UnOp:
            if (e.token == "-") {
                require(*e.children[0], TypeTag::Int, "operand of unary '-'");
                return TypeTag::Int;
            }
            if (e.token == "!") {
                require(*e.children[0], TypeTag::Bool, "operand of '!'");
                return TypeTag::Bool;
            }
            require(*e.children[0], TypeTag::IntArray, "operand of len");
            return TypeTag::Int;
        case NodeKind::BinOp: {
            const std::string& op = e.token;
            if (op == "&&" || op == "||") {
                require(*e.children[0], TypeTag::Bool, "operand");
                require(*e.children[1], TypeTag::Bool, "operand");
                return TypeTag::Bool;
            }
            if (op == "==" || op == "!=") {
                TypeTag l = type_of(*e.children[0]);
                if (l == TypeTag::IntArray) err(e.span, "arrays cannot be compared");
                require(*e.children[1], l, "operand");
                return TypeTag::Bool;
            }
            if (op == "<" || op == "<=" || op == ">" || op == ">=") {
                require(*e.children[0], TypeTag::Int, "operand");
                require(*e.children[1], TypeTag::Int, "operand");
                return TypeTag::Bool;
            }
            require(*e.children[0], TypeTag::Int, "operand");
            require(*e.children[1], TypeTag::Int, "operand");
            return TypeTag::Int;
        }
        default:
            err(e.span, "unexpected node in expression position");
        }
    }

    // Every path through the block reaches Return or Throw.
    bool always_exits(const AstNode& block) const {
        for (const auto& s : block.children) {
            if (is_return_or_throw(s->kind)) return true;
            if (s->kind == NodeKind::If && s->children.size() == 3 &&
                always_exits(*s->children[1]) && always_exits(*s->children[2]))
                return true;
        }
        return false;
    }
};

}  // namespace detail

inline void validate(const SourceUnit& unit) { detail::Validator(unit).run(); }

}  // namespace fep
