#include "rddym/parser.hpp"

#include <cctype>

#include "rddym/jet_calculus.hpp"

namespace rddym {

namespace {

struct Lexer {
    const std::string& text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "'", pos);
    }
    bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
    bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        if (pos >= text.size() || !ident_start(text[pos])) throw ParseError("expected identifier", pos);
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        return text.substr(start, pos - start);
    }

    long integer() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) throw ParseError("expected integer", pos);
        return std::stol(text.substr(start, pos - start));
    }
};

struct Parser {
    Lexer lex;
    const Workspace& ws;

    Jet jet_from_ident(const std::string& name, size_t at) {
        auto underscore = name.find('_');
        std::string base = underscore == std::string::npos ? name : name.substr(0, underscore);
        auto f = ws.find(base);
        if (!f) throw ParseError("unknown identifier '" + base + "'", at);
        Multi m;
        if (underscore != std::string::npos) {
            std::string suffix = name.substr(underscore + 1);
            if (suffix.empty()) throw ParseError("empty derivative suffix on '" + base + "'", at);
            for (char c : suffix) {
                auto coord = coord_from_char(c);
                if (!coord) throw ParseError(std::string("bad derivative coordinate '") + c + "'", at);
                ++m[*coord];
            }
            FieldKind k = ws.kind(*f);
            if (k == FieldKind::Parameter || k == FieldKind::Coordinate)
                throw ParseError("derivative suffix on " + std::string(kind_name(k)) + " '" + base + "'", at);
        }
        return Jet{*f, m};
    }

    Expr primary() {
        char c = lex.peek();
        size_t at = lex.pos;
        if (std::isdigit(static_cast<unsigned char>(c))) return ex::integer(lex.integer());
        if (c == '(') {
            lex.expect('(');
            Expr e = expr();
            lex.expect(')');
            return e;
        }
        std::string name = lex.ident();
        if (name == "exp") {
            lex.expect('(');
            Expr a = expr();
            lex.expect(')');
            return ex::exp_(a);
        }
        if (name == "D" && lex.peek() == '[') {
            lex.expect('[');
            Expr e = expr();
            std::vector<Coord> coords;
            while (lex.eat(',')) {
                std::string cn = lex.ident();
                auto coord = cn.size() == 1 ? coord_from_char(cn[0]) : std::nullopt;
                if (!coord) throw ParseError("bad coordinate '" + cn + "' in D[...]", lex.pos);
                coords.push_back(*coord);
            }
            lex.expect(']');
            if (coords.empty()) throw ParseError("D[...] needs at least one coordinate", lex.pos);
            bool has_fiber = false;
            for (const auto& j : collect_jets(e))
                if (ws.kind(j.field) == FieldKind::Fiber) has_fiber = true;
            for (Coord coord : coords)
                if (has_fiber && coord != Coord::X)
                    throw ParseError("t/y-derivatives of a fiber field need a covering", at);
            for (Coord coord : coords) e = total_derivative(e, coord, ws, nullptr);
            return e;
        }
        return ex::jet(jet_from_ident(name, at));
    }

    Expr factor() {
        Expr base = primary();
        if (lex.peek() == '^') {
            lex.expect('^');
            long sign = lex.eat('-') ? -1 : 1;
            long e = lex.integer();
            return ex::pow(base, static_cast<int>(sign * e));
        }
        return base;
    }

    Expr unary() {
        if (lex.peek() == '-') {
            lex.expect('-');
            return ex::neg(unary());
        }
        if (lex.peek() == '+') lex.expect('+');
        return factor();
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (lex.peek() == '*') {
                lex.expect('*');
                e = ex::mul(e, unary());
            } else if (lex.peek() == '/') {
                lex.expect('/');
                e = ex::div(e, unary());
            } else {
                return e;
            }
        }
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (lex.peek() == '+') {
                lex.expect('+');
                e = ex::add(e, term());
            } else if (lex.peek() == '-') {
                lex.expect('-');
                e = ex::sub(e, term());
            } else {
                return e;
            }
        }
    }
};

}  // namespace

Expr parse_expression(const std::string& text, const Workspace& ws) {
    Parser p{Lexer{text}, ws};
    Expr e = p.expr();
    p.lex.skip_ws();
    if (p.lex.pos != text.size()) throw ParseError("unexpected trailing input", p.lex.pos);
    return e;
}

Jet parse_jet(const std::string& text, const Workspace& ws) {
    Parser p{Lexer{text}, ws};
    std::string name = p.lex.ident();
    p.lex.skip_ws();
    if (p.lex.pos != text.size()) throw ParseError("expected a single jet variable", p.lex.pos);
    return p.jet_from_ident(name, 0);
}

}  // namespace rddym
