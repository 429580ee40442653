#pragma once

#include <cctype>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "fep/ast.hpp"
#include "fep/errors.hpp"
#include "fep/validator.hpp"

namespace fep {

namespace detail {

enum class Tok {
    End, Ident, Int, String,
    KwGlobal, KwFn, KwLet, KwIf, KwElse, KwWhile, KwFor, KwReturn, KwThrow,
    KwOutput, KwLen, KwTrue, KwFalse, KwInt, KwBool, KwVoid,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Comma, Semi, Colon, Arrow,
    Assign, Plus, Minus, Star, Slash, Percent,
    Lt, Le, Gt, Ge, EqEq, NotEq, AndAnd, OrOr, Not,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Span span;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_ws_and_comments();
            Token t = next();
            out.push_back(t);
            if (t.kind == Tok::End) break;
        }
        return out;
    }

private:
    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    char peek(size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_ws_and_comments() {
        for (;;) {
            while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(peek()))) advance();
            if (peek() == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
                continue;
            }
            break;
        }
    }

    Token make(Tok k, std::string text, Span sp) { return Token{k, std::move(text), sp}; }

    Token next() {
        Span sp{line_, col_};
        if (pos_ >= src_.size()) return make(Tok::End, "", sp);
        char c = advance();
        switch (c) {
        case '(': return make(Tok::LParen, "(", sp);
        case ')': return make(Tok::RParen, ")", sp);
        case '{': return make(Tok::LBrace, "{", sp);
        case '}': return make(Tok::RBrace, "}", sp);
        case '[': return make(Tok::LBracket, "[", sp);
        case ']': return make(Tok::RBracket, "]", sp);
        case ',': return make(Tok::Comma, ",", sp);
        case ';': return make(Tok::Semi, ";", sp);
        case ':': return make(Tok::Colon, ":", sp);
        case '+': return make(Tok::Plus, "+", sp);
        case '*': return make(Tok::Star, "*", sp);
        case '/': return make(Tok::Slash, "/", sp);
        case '%': return make(Tok::Percent, "%", sp);
        case '-':
            if (peek() == '>') { advance(); return make(Tok::Arrow, "->", sp); }
            return make(Tok::Minus, "-", sp);
        case '<':
            if (peek() == '=') { advance(); return make(Tok::Le, "<=", sp); }
            return make(Tok::Lt, "<", sp);
        case '>':
            if (peek() == '=') { advance(); return make(Tok::Ge, ">=", sp); }
            return make(Tok::Gt, ">", sp);
        case '=':
            if (peek() == '=') { advance(); return make(Tok::EqEq, "==", sp); }
            return make(Tok::Assign, "=", sp);
        case '!':
            if (peek() == '=') { advance(); return make(Tok::NotEq, "!=", sp); }
            return make(Tok::Not, "!", sp);
        case '&':
            if (peek() == '&') { advance(); return make(Tok::AndAnd, "&&", sp); }
            throw SyntaxError(sp.line, sp.column, "stray '&'");
        case '|':
            if (peek() == '|') { advance(); return make(Tok::OrOr, "||", sp); }
            throw SyntaxError(sp.line, sp.column, "stray '|'");
        case '"': {
            std::string s;
            while (pos_ < src_.size() && peek() != '"' && peek() != '\n') s += advance();
            if (peek() != '"') throw SyntaxError(sp.line, sp.column, "unterminated string");
            advance();
            return make(Tok::String, std::move(s), sp);
        }
        default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num(1, c);
            while (std::isdigit(static_cast<unsigned char>(peek()))) num += advance();
            return make(Tok::Int, std::move(num), sp);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string id(1, c);
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
                id += advance();
            static const std::pair<const char*, Tok> kws[] = {
                {"global", Tok::KwGlobal}, {"fn", Tok::KwFn},       {"let", Tok::KwLet},
                {"if", Tok::KwIf},         {"else", Tok::KwElse},   {"while", Tok::KwWhile},
                {"for", Tok::KwFor},       {"return", Tok::KwReturn}, {"throw", Tok::KwThrow},
                {"output", Tok::KwOutput}, {"len", Tok::KwLen},     {"true", Tok::KwTrue},
                {"false", Tok::KwFalse},   {"int", Tok::KwInt},     {"bool", Tok::KwBool},
                {"void", Tok::KwVoid},
            };
            for (const auto& [kw, tok] : kws)
                if (id == kw) return make(tok, std::move(id), sp);
            return make(Tok::Ident, std::move(id), sp);
        }
        throw SyntaxError(sp.line, sp.column, std::string("unexpected character '") + c + "'");
    }
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    SourceUnit unit() {
        SourceUnit u;
        while (!at(Tok::End)) {
            if (at(Tok::KwGlobal)) {
                u.globals.push_back(global_decl());
            } else if (at(Tok::KwFn)) {
                u.functions.push_back(function_def());
            } else {
                fail("expected 'global' or 'fn'");
            }
        }
        for (const auto& f : u.functions)
            if (f.name == "main") u.entry = "main";
        return u;
    }

private:
    std::vector<Token> toks_;
    size_t idx_ = 0;

    const Token& cur() const { return toks_[idx_]; }
    bool at(Tok k) const { return cur().kind == k; }
    Token eat() { return toks_[idx_++]; }
    Token expect(Tok k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what);
        return eat();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(cur().span.line, cur().span.column,
                          msg + " before '" + (cur().kind == Tok::End ? "<eof>" : cur().text) + "'");
    }

    std::unique_ptr<AstNode> node(NodeKind k, std::string tok, Span sp) {
        return std::make_unique<AstNode>(k, std::move(tok), sp);
    }

    TypeTag value_type() {
        Span sp = cur().span;
        if (at(Tok::KwInt)) {
            eat();
            if (at(Tok::LBracket)) {
                eat();
                expect(Tok::RBracket, "']'");
                return TypeTag::IntArray;
            }
            return TypeTag::Int;
        }
        if (at(Tok::KwBool)) { eat(); return TypeTag::Bool; }
        throw SyntaxError(sp.line, sp.column, "expected type");
    }

    TypeTag return_type() {
        if (at(Tok::KwVoid)) { eat(); return TypeTag::Void; }
        return value_type();
    }

    GlobalDecl global_decl() {
        expect(Tok::KwGlobal, "'global'");
        GlobalDecl g;
        g.name = expect(Tok::Ident, "identifier").text;
        expect(Tok::Colon, "':'");
        g.type = value_type();
        if (at(Tok::Assign)) {
            eat();
            g.init = expression();
        }
        expect(Tok::Semi, "';'");
        return g;
    }

    FunctionDef function_def() {
        expect(Tok::KwFn, "'fn'");
        FunctionDef f;
        f.name = expect(Tok::Ident, "function name").text;
        expect(Tok::LParen, "'('");
        if (!at(Tok::RParen)) {
            for (;;) {
                Param p;
                p.name = expect(Tok::Ident, "parameter name").text;
                expect(Tok::Colon, "':'");
                p.type = value_type();
                f.params.push_back(p);
                if (!at(Tok::Comma)) break;
                eat();
            }
        }
        expect(Tok::RParen, "')'");
        expect(Tok::Arrow, "'->'");
        f.return_type = return_type();
        f.body = block();
        return f;
    }

    std::unique_ptr<AstNode> block() {
        Span sp = cur().span;
        expect(Tok::LBrace, "'{'");
        auto b = node(NodeKind::Block, "", sp);
        while (!at(Tok::RBrace)) b->children.push_back(statement());
        eat();
        return b;
    }

    std::unique_ptr<AstNode> statement() {
        Span sp = cur().span;
        switch (cur().kind) {
        case Tok::KwLet: return var_decl(true);
        case Tok::KwIf: return if_stmt();
        case Tok::KwWhile: {
            eat();
            expect(Tok::LParen, "'('");
            auto w = node(NodeKind::While, "", sp);
            w->children.push_back(expression());
            expect(Tok::RParen, "')'");
            w->children.push_back(block());
            return w;
        }
        case Tok::KwFor: {
            eat();
            expect(Tok::LParen, "'('");
            auto f = node(NodeKind::For, "", sp);
            f->children.push_back(at(Tok::KwLet) ? var_decl(false) : assign_stmt(false));
            expect(Tok::Semi, "';'");
            f->children.push_back(expression());
            expect(Tok::Semi, "';'");
            f->children.push_back(assign_stmt(false));
            expect(Tok::RParen, "')'");
            f->children.push_back(block());
            return f;
        }
        case Tok::KwReturn: {
            eat();
            auto r = node(NodeKind::Return, "", sp);
            if (!at(Tok::Semi)) r->children.push_back(expression());
            expect(Tok::Semi, "';'");
            return r;
        }
        case Tok::KwThrow: {
            eat();
            Token msg = expect(Tok::String, "string literal");
            expect(Tok::Semi, "';'");
            return node(NodeKind::Throw, msg.text, sp);
        }
        case Tok::KwOutput: {
            eat();
            expect(Tok::LParen, "'('");
            auto o = node(NodeKind::Output, "", sp);
            o->children.push_back(expression());
            expect(Tok::RParen, "')'");
            expect(Tok::Semi, "';'");
            return o;
        }
        case Tok::Ident: {
            // call statement or assignment
            if (toks_[idx_ + 1].kind == Tok::LParen) {
                auto e = node(NodeKind::ExprStmt, "", sp);
                e->children.push_back(expression());
                expect(Tok::Semi, "';'");
                return e;
            }
            auto a = assign_stmt(false);
            expect(Tok::Semi, "';'");
            return a;
        }
        default:
            fail("expected statement");
        }
    }

    std::unique_ptr<AstNode> var_decl(bool with_semi) {
        Span sp = cur().span;
        expect(Tok::KwLet, "'let'");
        std::string name = expect(Tok::Ident, "identifier").text;
        expect(Tok::Colon, "':'");
        TypeTag t = value_type();
        auto d = node(NodeKind::VarDecl, name + ":" + type_name(t), sp);
        if (at(Tok::Assign)) {
            eat();
            d->children.push_back(expression());
        }
        if (with_semi) expect(Tok::Semi, "';'");
        return d;
    }

    std::unique_ptr<AstNode> assign_stmt(bool with_semi) {
        Span sp = cur().span;
        Token id = expect(Tok::Ident, "identifier");
        std::unique_ptr<AstNode> lhs = node(NodeKind::VarRef, id.text, id.span);
        if (at(Tok::LBracket)) {
            eat();
            auto ix = node(NodeKind::Index, "", id.span);
            ix->children.push_back(std::move(lhs));
            ix->children.push_back(expression());
            expect(Tok::RBracket, "']'");
            lhs = std::move(ix);
        }
        expect(Tok::Assign, "'='");
        auto a = node(NodeKind::Assign, "", sp);
        a->children.push_back(std::move(lhs));
        a->children.push_back(expression());
        if (with_semi) expect(Tok::Semi, "';'");
        return a;
    }

    std::unique_ptr<AstNode> if_stmt() {
        Span sp = cur().span;
        expect(Tok::KwIf, "'if'");
        expect(Tok::LParen, "'('");
        auto i = node(NodeKind::If, "", sp);
        i->children.push_back(expression());
        expect(Tok::RParen, "')'");
        i->children.push_back(block());
        if (at(Tok::KwElse)) {
            eat();
            i->children.push_back(block());
        }
        return i;
    }

    std::unique_ptr<AstNode> expression() { return or_expr(); }

    // spans stay monotone in preorder: a binop carries its leftmost token's span
    std::unique_ptr<AstNode> binop_chain(std::unique_ptr<AstNode> (Parser::*sub)(),
                                         std::initializer_list<std::pair<Tok, const char*>> ops) {
        auto lhs = (this->*sub)();
        for (;;) {
            bool matched = false;
            for (const auto& [tok, text] : ops) {
                if (at(tok)) {
                    eat();
                    auto b = node(NodeKind::BinOp, text, lhs->span);
                    b->children.push_back(std::move(lhs));
                    b->children.push_back((this->*sub)());
                    lhs = std::move(b);
                    matched = true;
                    break;
                }
            }
            if (!matched) return lhs;
        }
    }

    std::unique_ptr<AstNode> or_expr() {
        return binop_chain(&Parser::and_expr, {{Tok::OrOr, "||"}});
    }
    std::unique_ptr<AstNode> and_expr() {
        return binop_chain(&Parser::eq_expr, {{Tok::AndAnd, "&&"}});
    }
    std::unique_ptr<AstNode> eq_expr() {
        return binop_chain(&Parser::rel_expr, {{Tok::EqEq, "=="}, {Tok::NotEq, "!="}});
    }
    std::unique_ptr<AstNode> rel_expr() {
        return binop_chain(&Parser::add_expr,
                           {{Tok::Lt, "<"}, {Tok::Le, "<="}, {Tok::Gt, ">"}, {Tok::Ge, ">="}});
    }
    std::unique_ptr<AstNode> add_expr() {
        return binop_chain(&Parser::mul_expr, {{Tok::Plus, "+"}, {Tok::Minus, "-"}});
    }
    std::unique_ptr<AstNode> mul_expr() {
        return binop_chain(&Parser::unary_expr,
                           {{Tok::Star, "*"}, {Tok::Slash, "/"}, {Tok::Percent, "%"}});
    }

    std::unique_ptr<AstNode> unary_expr() {
        Span sp = cur().span;
        if (at(Tok::Minus)) {
            eat();
            auto u = node(NodeKind::UnOp, "-", sp);
            u->children.push_back(unary_expr());
            return u;
        }
        if (at(Tok::Not)) {
            eat();
            auto u = node(NodeKind::UnOp, "!", sp);
            u->children.push_back(unary_expr());
            return u;
        }
        return postfix_expr();
    }

    std::unique_ptr<AstNode> postfix_expr() {
        auto e = primary_expr();
        while (at(Tok::LBracket)) {
            eat();
            auto ix = node(NodeKind::Index, "", e->span);
            ix->children.push_back(std::move(e));
            ix->children.push_back(expression());
            expect(Tok::RBracket, "']'");
            e = std::move(ix);
        }
        return e;
    }

    std::unique_ptr<AstNode> primary_expr() {
        Span sp = cur().span;
        switch (cur().kind) {
        case Tok::Int: return node(NodeKind::Literal, eat().text, sp);
        case Tok::KwTrue: eat(); return node(NodeKind::Literal, "true", sp);
        case Tok::KwFalse: eat(); return node(NodeKind::Literal, "false", sp);
        case Tok::KwLen: {
            eat();
            expect(Tok::LParen, "'('");
            auto u = node(NodeKind::UnOp, "len", sp);
            u->children.push_back(expression());
            expect(Tok::RParen, "')'");
            return u;
        }
        case Tok::LParen: {
            eat();
            auto e = expression();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::LBracket: {
            eat();
            auto a = node(NodeKind::Literal, "array", sp);
            if (!at(Tok::RBracket)) {
                for (;;) {
                    a->children.push_back(expression());
                    if (!at(Tok::Comma)) break;
                    eat();
                }
            }
            expect(Tok::RBracket, "']'");
            return a;
        }
        case Tok::Ident: {
            Token id = eat();
            if (at(Tok::LParen)) {
                eat();
                auto c = node(NodeKind::Call, id.text, id.span);
                if (!at(Tok::RParen)) {
                    for (;;) {
                        c->children.push_back(expression());
                        if (!at(Tok::Comma)) break;
                        eat();
                    }
                }
                expect(Tok::RParen, "')'");
                return c;
            }
            return node(NodeKind::VarRef, id.text, id.span);
        }
        default:
            fail("expected expression");
        }
    }
};

}  // namespace detail

// Syntax only; most callers want parse() below, which also validates.
inline SourceUnit parse_syntax(const std::string& text) {
    detail::Lexer lex(text);
    detail::Parser p(lex.run());
    SourceUnit u = p.unit();
    renumber_preorder(u);
    return u;
}

inline SourceUnit parse(const std::string& text) {
    SourceUnit u = parse_syntax(text);
    validate(u);
    return u;
}

}  // namespace fep
