#pragma once

#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "rddym/rational.hpp"
#include "rddym/workspace.hpp"

namespace rddym {

class ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

// Immutable expression tree. Sums and products are kept flat: a Sum never
// directly contains a Sum, a Prod never directly contains a Prod.
class ExprNode {
  public:
    struct Sum {
        std::vector<Expr> terms;
    };
    struct Prod {
        std::vector<Expr> factors;
    };
    struct Pow {
        Expr base;
        int exponent;  // != 0, != 1; may be negative
    };
    struct ExpF {
        Expr arg;
    };
    using Node = std::variant<Rational, Jet, Sum, Prod, Pow, ExpF>;

    explicit ExprNode(Node n) : node_(std::move(n)) {}
    const Node& node() const { return node_; }

  private:
    Node node_;
};

namespace ex {

inline Expr rational(Rational q) { return std::make_shared<ExprNode>(ExprNode::Node{std::move(q)}); }
inline Expr integer(long n) { return rational(rat(n)); }
inline Expr zero() { return integer(0); }
inline Expr one() { return integer(1); }
inline Expr jet(Jet j) { return std::make_shared<ExprNode>(ExprNode::Node{j}); }

inline bool is_rational(const Expr& e, const Rational* val = nullptr) {
    if (auto* q = std::get_if<Rational>(&e->node())) return val ? *q == *val : true;
    return false;
}
inline bool is_zero_literal(const Expr& e) {
    auto* q = std::get_if<Rational>(&e->node());
    return q && is_zero(*q);
}

inline Expr sum(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    for (auto& t : terms) {
        if (!t) continue;
        if (auto* s = std::get_if<ExprNode::Sum>(&t->node()))
            flat.insert(flat.end(), s->terms.begin(), s->terms.end());
        else if (!is_zero_literal(t))
            flat.push_back(std::move(t));
    }
    if (flat.empty()) return zero();
    if (flat.size() == 1) return flat[0];
    return std::make_shared<ExprNode>(ExprNode::Node{ExprNode::Sum{std::move(flat)}});
}

inline Expr prod(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    for (auto& f : factors) {
        if (!f) continue;
        if (is_zero_literal(f)) return zero();
        if (auto* p = std::get_if<ExprNode::Prod>(&f->node()))
            flat.insert(flat.end(), p->factors.begin(), p->factors.end());
        else if (!is_rational(f) || !is_one(std::get<Rational>(f->node())))
            flat.push_back(std::move(f));
    }
    if (flat.empty()) return one();
    if (flat.size() == 1) return flat[0];
    return std::make_shared<ExprNode>(ExprNode::Node{ExprNode::Prod{std::move(flat)}});
}

inline Expr add(Expr a, Expr b) { return sum({std::move(a), std::move(b)}); }
inline Expr mul(Expr a, Expr b) { return prod({std::move(a), std::move(b)}); }
inline Expr neg(Expr a) { return mul(integer(-1), std::move(a)); }
inline Expr sub(Expr a, Expr b) { return add(std::move(a), neg(std::move(b))); }

inline Expr pow(Expr base, int e) {
    if (e == 1) return base;
    if (e == 0) return one();
    if (auto* q = std::get_if<Rational>(&base->node())) {
        if (is_zero(*q) && e < 0) throw ValidationError("division by zero");
        if (!is_zero(*q) || e > 0) return rational(rat_pow(*q, e));
    }
    if (auto* p = std::get_if<ExprNode::Pow>(&base->node()))
        return pow(p->base, p->exponent * e);
    return std::make_shared<ExprNode>(ExprNode::Node{ExprNode::Pow{std::move(base), e}});
}

inline Expr div(Expr a, Expr b) { return mul(std::move(a), pow(std::move(b), -1)); }
inline Expr exp_(Expr arg) {
    if (is_zero_literal(arg)) return one();
    return std::make_shared<ExprNode>(ExprNode::Node{ExprNode::ExpF{std::move(arg)}});
}

}  // namespace ex

// Structural printer with minimal parentheses; used for fixture echo and
// diagnostics. Canonical (bit-exact) printing lives in NormalForm.
std::string to_string(const Expr& e, const Workspace& ws);

// All jets occurring in the tree (exp arguments included), deduplicated.
std::vector<Jet> collect_jets(const Expr& e);

bool contains_field(const Expr& e, FieldId f);

// Replaces exactly the listed jets (no derivative closure).
Expr replace_exact_jets(const Expr& e, const std::map<Jet, Expr>& repl);

}  // namespace rddym
