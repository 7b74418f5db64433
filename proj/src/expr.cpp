#include "rddym/expr.hpp"

#include <algorithm>

namespace rddym {

namespace {

// precedence: sum < product < power < atom
constexpr int kSum = 1, kProd = 2, kPow = 3, kAtom = 4;

// splits a leading negative rational off a term for nicer sum rendering
bool negate_term(const Expr& e, Expr& positive) {
    if (auto* q = std::get_if<Rational>(&e->node())) {
        if (sgn(*q) < 0) {
            positive = ex::rational(Rational(-*q));
            return true;
        }
        return false;
    }
    if (auto* p = std::get_if<ExprNode::Prod>(&e->node())) {
        if (auto* q = std::get_if<Rational>(&p->factors.front()->node())) {
            if (sgn(*q) < 0) {
                std::vector<Expr> rest = p->factors;
                if (*q == -1)
                    rest.erase(rest.begin());
                else
                    rest.front() = ex::rational(Rational(-*q));
                positive = ex::prod(std::move(rest));
                return true;
            }
        }
    }
    return false;
}

void print(const Expr& e, const Workspace& ws, int parent, std::string& out) {
    const auto& n = e->node();
    if (auto* q = std::get_if<Rational>(&n)) {
        bool wrap = sgn(*q) < 0 && parent >= kProd;
        if (wrap) out += "(";
        out += rat_str(*q);
        if (wrap) out += ")";
        return;
    }
    if (auto* j = std::get_if<Jet>(&n)) {
        out += jet_name(ws, *j);
        return;
    }
    if (auto* s = std::get_if<ExprNode::Sum>(&n)) {
        if (kSum < parent) out += "(";
        for (size_t i = 0; i < s->terms.size(); ++i) {
            Expr positive;
            bool neg = negate_term(s->terms[i], positive);
            if (i)
                out += neg ? " - " : " + ";
            else if (neg)
                out += "-";
            print(neg ? positive : s->terms[i], ws, kSum + 1, out);
        }
        if (kSum < parent) out += ")";
        return;
    }
    if (auto* p = std::get_if<ExprNode::Prod>(&n)) {
        if (kProd < parent) out += "(";
        Expr positive;
        if (parent < kProd && negate_term(e, positive)) {
            out += "-";
            print(positive, ws, kProd, out);
        } else {
            for (size_t i = 0; i < p->factors.size(); ++i) {
                if (i) out += "*";
                print(p->factors[i], ws, kProd + (i ? 1 : 0), out);
            }
        }
        if (kProd < parent) out += ")";
        return;
    }
    if (auto* pw = std::get_if<ExprNode::Pow>(&n)) {
        bool atom = std::holds_alternative<Jet>(pw->base->node()) ||
                    std::holds_alternative<ExprNode::ExpF>(pw->base->node());
        if (!atom) out += "(";
        print(pw->base, ws, atom ? kAtom : 0, out);
        if (!atom) out += ")";
        out += "^" + std::to_string(pw->exponent);
        return;
    }
    const auto& ef = std::get<ExprNode::ExpF>(n);
    out += "exp(";
    print(ef.arg, ws, 0, out);
    out += ")";
}

}  // namespace

std::string to_string(const Expr& e, const Workspace& ws) {
    std::string out;
    print(e, ws, 0, out);
    return out;
}

namespace {

void collect(const Expr& e, std::vector<Jet>& out) {
    const auto& n = e->node();
    if (auto* j = std::get_if<Jet>(&n)) {
        out.push_back(*j);
    } else if (auto* s = std::get_if<ExprNode::Sum>(&n)) {
        for (const auto& t : s->terms) collect(t, out);
    } else if (auto* p = std::get_if<ExprNode::Prod>(&n)) {
        for (const auto& f : p->factors) collect(f, out);
    } else if (auto* pw = std::get_if<ExprNode::Pow>(&n)) {
        collect(pw->base, out);
    } else if (auto* ef = std::get_if<ExprNode::ExpF>(&n)) {
        collect(ef->arg, out);
    }
}

}  // namespace

std::vector<Jet> collect_jets(const Expr& e) {
    std::vector<Jet> out;
    collect(e, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool contains_field(const Expr& e, FieldId f) {
    for (const auto& j : collect_jets(e))
        if (j.field == f) return true;
    return false;
}

Expr replace_exact_jets(const Expr& e, const std::map<Jet, Expr>& repl) {
    const auto& n = e->node();
    if (std::holds_alternative<Rational>(n)) return e;
    if (auto* j = std::get_if<Jet>(&n)) {
        auto it = repl.find(*j);
        return it == repl.end() ? e : it->second;
    }
    if (auto* s = std::get_if<ExprNode::Sum>(&n)) {
        std::vector<Expr> out;
        for (const auto& t : s->terms) out.push_back(replace_exact_jets(t, repl));
        return ex::sum(std::move(out));
    }
    if (auto* p = std::get_if<ExprNode::Prod>(&n)) {
        std::vector<Expr> out;
        for (const auto& f : p->factors) out.push_back(replace_exact_jets(f, repl));
        return ex::prod(std::move(out));
    }
    if (auto* pw = std::get_if<ExprNode::Pow>(&n))
        return ex::pow(replace_exact_jets(pw->base, repl), pw->exponent);
    const auto& ef = std::get<ExprNode::ExpF>(n);
    return ex::exp_(replace_exact_jets(ef.arg, repl));
}

}  // namespace rddym
