#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "rddym/expr.hpp"

namespace rddym {

struct Poly;
using PolyPtr = std::shared_ptr<const Poly>;

// One power-product. Jet factors are sorted by the canonical atom order
// (field kind, field name, index lex with t < y < x) with strictly positive
// exponents; exp_part is the fused exponential exponent, a polynomial over
// jet atoms only (null means exp(0), i.e. no exponential factor).
struct Monomial {
    struct Factor {
        Jet jet;
        uint32_t ord;  // workspace sort ordinal of jet.field
        int exp;
    };
    std::vector<Factor> jets;
    PolyPtr exp_part;

    bool is_unit() const { return jets.empty() && !exp_part; }
    int degree() const {
        int d = 0;
        for (const auto& f : jets) d += f.exp;
        return d;
    }
};

struct Term {
    Monomial mono;
    Rational coeff;
};

// Multivariate polynomial, terms sorted descending in the monomial order.
struct Poly {
    std::vector<Term> terms;

    bool is_zero() const { return terms.empty(); }
    bool is_one() const;
    bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms[0].mono.is_unit()); }
};

// -1 / 0 / +1
int cmp_jet_atom(const Monomial::Factor& a, const Monomial::Factor& b);
int cmp_monomial(const Monomial& a, const Monomial& b);
int cmp_poly(const Poly& a, const Poly& b);

Poly poly_zero();
Poly poly_const(const Rational& c);
Poly poly_atom(const Workspace& ws, const Jet& j);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_neg(const Poly& a);
Poly poly_scale(const Poly& a, const Rational& c);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_pow(const Poly& a, int e);  // e >= 0
bool poly_equal(const Poly& a, const Poly& b);
bool poly_has_exp(const Poly& a);

// jets present anywhere, including inside exp parts
void poly_collect_jets(const Poly& a, std::vector<Jet>& out);

// coefficients of powers of one atom: result[k] has the atom removed
std::map<int, Poly> poly_collect_atom(const Poly& a, const Jet& atom);

std::string poly_string(const Poly& a, const Workspace& ws);

// Canonical rational form num/den over the atom alphabet. Invariants:
// den non-zero and monic; common monomial content cancelled; exponential
// factors fused (one exp per monomial) and unit-normalized so the leading
// denominator monomial carries exp(0); equality is structural.
class NormalForm {
  public:
    NormalForm() : num_(poly_zero()), den_(poly_const(1)) {}
    NormalForm(Poly num, Poly den, const Workspace& ws);

    static NormalForm constant(const Rational& c) {
        NormalForm nf;
        nf.num_ = poly_const(c);
        return nf;
    }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool operator==(const NormalForm& o) const { return poly_equal(num_, o.num_) && poly_equal(den_, o.den_); }

    std::vector<Jet> jets() const;
    bool mentions(FieldId f) const;

    std::string str(const Workspace& ws) const;

  private:
    Poly num_;
    Poly den_;
};

NormalForm nf_add(const NormalForm& a, const NormalForm& b, const Workspace& ws);
NormalForm nf_sub(const NormalForm& a, const NormalForm& b, const Workspace& ws);
NormalForm nf_mul(const NormalForm& a, const NormalForm& b, const Workspace& ws);
NormalForm nf_div(const NormalForm& a, const NormalForm& b, const Workspace& ws);
NormalForm nf_pow(const NormalForm& a, int e, const Workspace& ws);
NormalForm nf_neg(const NormalForm& a, const Workspace& ws);

// exp(a): a must normalize to a polynomial (denominator 1) free of
// exponentials, else ValidationError
NormalForm nf_exp(const NormalForm& a, const Workspace& ws);

NormalForm normalize(const Expr& e, const Workspace& ws);

// substitute atoms by normal forms (no derivative semantics); atoms inside
// exponents must map to exp-free polynomials
NormalForm nf_replace_atoms(const NormalForm& a, const std::map<Jet, NormalForm>& repl, const Workspace& ws);

// rebuild an expression tree (used for display and for feeding results back
// through expression-level operations)
Expr nf_to_expr(const NormalForm& a, const Workspace& ws);
Expr poly_to_expr(const Poly& a, const Workspace& ws);

}  // namespace rddym
