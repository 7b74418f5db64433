#include "rddym/normal_form.hpp"

#include <algorithm>
#include <sstream>

namespace rddym {

bool Poly::is_one() const {
    return terms.size() == 1 && terms[0].mono.is_unit() && rddym::is_one(terms[0].coeff);
}

int cmp_jet_atom(const Monomial::Factor& a, const Monomial::Factor& b) {
    if (a.ord != b.ord) return a.ord < b.ord ? -1 : 1;
    if (a.jet.index != b.jet.index) return a.jet.index < b.jet.index ? -1 : 1;
    return 0;
}

namespace {

int cmp_exp_part(const PolyPtr& a, const PolyPtr& b) {
    if (!a && !b) return 0;
    // sign of the leading coefficient of (a - b); translation-invariant
    Poly diff = poly_add(a ? *a : poly_zero(), poly_neg(b ? *b : poly_zero()));
    if (diff.is_zero()) return 0;
    return sgn(diff.terms.front().coeff) > 0 ? 1 : -1;
}

}  // namespace

// graded, then lexicographic in ascending atom order (a larger exponent on an
// earlier atom wins), then the exponential part
int cmp_monomial(const Monomial& a, const Monomial& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db ? -1 : 1;
    size_t i = 0, j = 0;
    while (i < a.jets.size() && j < b.jets.size()) {
        int c = cmp_jet_atom(a.jets[i], b.jets[j]);
        if (c < 0) return 1;   // a has the smaller atom with positive exponent
        if (c > 0) return -1;  // b has it
        if (a.jets[i].exp != b.jets[j].exp) return a.jets[i].exp > b.jets[j].exp ? 1 : -1;
        ++i, ++j;
    }
    if (i < a.jets.size()) return 1;
    if (j < b.jets.size()) return -1;
    return cmp_exp_part(a.exp_part, b.exp_part);
}

int cmp_poly(const Poly& a, const Poly& b) {
    size_t n = std::min(a.terms.size(), b.terms.size());
    for (size_t i = 0; i < n; ++i) {
        int c = cmp_monomial(a.terms[i].mono, b.terms[i].mono);
        if (c != 0) return c;
        if (a.terms[i].coeff != b.terms[i].coeff) return a.terms[i].coeff < b.terms[i].coeff ? -1 : 1;
    }
    if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size() ? -1 : 1;
    return 0;
}

bool poly_equal(const Poly& a, const Poly& b) { return cmp_poly(a, b) == 0; }

Poly poly_zero() { return Poly{}; }

Poly poly_const(const Rational& c) {
    Poly p;
    if (!is_zero(c)) p.terms.push_back({Monomial{}, c});
    return p;
}

Poly poly_atom(const Workspace& ws, const Jet& j) {
    Poly p;
    Monomial m;
    m.jets.push_back({j, ws.ordinal(j.field), 1});
    p.terms.push_back({std::move(m), rat(1)});
    return p;
}

namespace {

bool mono_equal(const Monomial& a, const Monomial& b) { return cmp_monomial(a, b) == 0; }

void sort_terms(Poly& p) {
    std::sort(p.terms.begin(), p.terms.end(),
              [](const Term& x, const Term& y) { return cmp_monomial(x.mono, y.mono) > 0; });
    // combine equal monomials
    std::vector<Term> out;
    for (auto& t : p.terms) {
        if (!out.empty() && mono_equal(out.back().mono, t.mono)) {
            out.back().coeff = Rational(out.back().coeff + t.coeff);
            if (is_zero(out.back().coeff)) out.pop_back();
        } else if (!is_zero(t.coeff)) {
            out.push_back(std::move(t));
        }
    }
    p.terms = std::move(out);
}

PolyPtr exp_sum(const PolyPtr& a, const PolyPtr& b) {
    if (!a) return b;
    if (!b) return a;
    Poly s = poly_add(*a, *b);
    if (s.is_zero()) return nullptr;
    return std::make_shared<const Poly>(std::move(s));
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial m;
    size_t i = 0, j = 0;
    while (i < a.jets.size() || j < b.jets.size()) {
        if (j == b.jets.size() || (i < a.jets.size() && cmp_jet_atom(a.jets[i], b.jets[j]) < 0)) {
            m.jets.push_back(a.jets[i++]);
        } else if (i == a.jets.size() || cmp_jet_atom(a.jets[i], b.jets[j]) > 0) {
            m.jets.push_back(b.jets[j++]);
        } else {
            Monomial::Factor f = a.jets[i];
            f.exp += b.jets[j].exp;
            if (f.exp != 0) m.jets.push_back(f);
            ++i, ++j;
        }
    }
    m.exp_part = exp_sum(a.exp_part, b.exp_part);
    return m;
}

}  // namespace

Poly poly_add(const Poly& a, const Poly& b) {
    Poly out;
    out.terms.reserve(a.terms.size() + b.terms.size());
    size_t i = 0, j = 0;
    while (i < a.terms.size() || j < b.terms.size()) {
        if (j == b.terms.size()) {
            out.terms.push_back(a.terms[i++]);
        } else if (i == a.terms.size()) {
            out.terms.push_back(b.terms[j++]);
        } else {
            int c = cmp_monomial(a.terms[i].mono, b.terms[j].mono);
            if (c > 0) {
                out.terms.push_back(a.terms[i++]);
            } else if (c < 0) {
                out.terms.push_back(b.terms[j++]);
            } else {
                Rational s(a.terms[i].coeff + b.terms[j].coeff);
                if (!is_zero(s)) out.terms.push_back({a.terms[i].mono, std::move(s)});
                ++i, ++j;
            }
        }
    }
    return out;
}

Poly poly_neg(const Poly& a) { return poly_scale(a, rat(-1)); }

Poly poly_scale(const Poly& a, const Rational& c) {
    if (is_zero(c)) return poly_zero();
    Poly out = a;
    for (auto& t : out.terms) t.coeff = Rational(t.coeff * c);
    return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms)
            out.terms.push_back({mono_mul(ta.mono, tb.mono), Rational(ta.coeff * tb.coeff)});
    sort_terms(out);
    return out;
}

Poly poly_pow(const Poly& a, int e) {
    Poly out = poly_const(rat(1));
    Poly base = a;
    int n = e;
    while (n > 0) {
        if (n & 1) out = poly_mul(out, base);
        base = poly_mul(base, base);
        n >>= 1;
    }
    return out;
}

bool poly_has_exp(const Poly& a) {
    for (const auto& t : a.terms)
        if (t.mono.exp_part) return true;
    return false;
}

void poly_collect_jets(const Poly& a, std::vector<Jet>& out) {
    for (const auto& t : a.terms) {
        for (const auto& f : t.mono.jets) out.push_back(f.jet);
        if (t.mono.exp_part) poly_collect_jets(*t.mono.exp_part, out);
    }
}

std::map<int, Poly> poly_collect_atom(const Poly& a, const Jet& atom) {
    std::map<int, Poly> out;
    for (const auto& t : a.terms) {
        int k = 0;
        Term rest = t;
        rest.mono.jets.clear();
        for (const auto& f : t.mono.jets) {
            if (f.jet == atom)
                k = f.exp;
            else
                rest.mono.jets.push_back(f);
        }
        Poly& dst = out.try_emplace(k, poly_zero()).first->second;
        Poly single;
        single.terms.push_back(rest);
        dst = poly_add(dst, single);
    }
    return out;
}

namespace {

std::string mono_string(const Monomial& m, const Rational& c, const Workspace& ws) {
    std::vector<std::string> parts;
    Rational ac = Rational(abs(c));
    if (!is_one(ac) || (m.jets.empty() && !m.exp_part)) parts.push_back(rat_str(ac));
    for (const auto& f : m.jets) {
        std::string a = jet_name(ws, f.jet);
        if (f.exp != 1) a += "^" + std::to_string(f.exp);
        parts.push_back(a);
    }
    if (m.exp_part) parts.push_back("exp(" + poly_string(*m.exp_part, ws) + ")");
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += "*";
        out += parts[i];
    }
    return out;
}

}  // namespace

std::string poly_string(const Poly& a, const Workspace& ws) {
    if (a.terms.empty()) return "0";
    std::string out;
    for (size_t i = 0; i < a.terms.size(); ++i) {
        const auto& t = a.terms[i];
        bool negative = sgn(t.coeff) < 0;
        if (i == 0)
            out += negative ? "-" : "";
        else
            out += negative ? " - " : " + ";
        out += mono_string(t.mono, t.coeff, ws);
    }
    return out;
}

// ---------------------------------------------------------------------------
// NormalForm canonicalization

namespace {

// subtract E from every exponential part of p
Poly shift_exp(const Poly& p, const Poly& e) {
    if (e.is_zero()) return p;
    Poly ne = poly_neg(e);
    Poly out = p;
    for (auto& t : out.terms) {
        Poly s = poly_add(t.mono.exp_part ? *t.mono.exp_part : poly_zero(), ne);
        t.mono.exp_part = s.is_zero() ? nullptr : std::make_shared<const Poly>(std::move(s));
    }
    sort_terms(out);  // exp tiebreaks may reorder equal jet parts
    return out;
}

// per-atom minimum exponent over all monomials of both polynomials
std::vector<Monomial::Factor> common_content(const Poly& a, const Poly& b) {
    std::map<std::pair<uint32_t, Jet>, int> mins;
    bool first = true;
    auto scan = [&](const Poly& p) {
        for (const auto& t : p.terms) {
            std::map<std::pair<uint32_t, Jet>, int> here;
            for (const auto& f : t.mono.jets) here[{f.ord, f.jet}] = f.exp;
            if (first) {
                mins = here;
                first = false;
            } else {
                for (auto it = mins.begin(); it != mins.end();) {
                    auto h = here.find(it->first);
                    int e = h == here.end() ? 0 : h->second;
                    it->second = std::min(it->second, e);
                    if (it->second == 0)
                        it = mins.erase(it);
                    else
                        ++it;
                }
            }
        }
    };
    scan(a);
    scan(b);
    std::vector<Monomial::Factor> out;
    for (const auto& [key, e] : mins) out.push_back({key.second, key.first, e});
    return out;
}

Poly divide_content(const Poly& p, const std::vector<Monomial::Factor>& content) {
    if (content.empty()) return p;
    Poly out = p;
    for (auto& t : out.terms) {
        for (const auto& c : content) {
            for (auto& f : t.mono.jets)
                if (f.jet == c.jet) f.exp -= c.exp;
        }
        std::erase_if(t.mono.jets, [](const Monomial::Factor& f) { return f.exp == 0; });
    }
    return out;
}

bool mono_divides(const Monomial& d, const Monomial& n) {
    size_t i = 0;
    for (const auto& f : d.jets) {
        while (i < n.jets.size() && cmp_jet_atom(n.jets[i], f) < 0) ++i;
        if (i == n.jets.size() || cmp_jet_atom(n.jets[i], f) != 0 || n.jets[i].exp < f.exp) return false;
    }
    return true;
}

Monomial mono_quotient(const Monomial& n, const Monomial& d) {
    Monomial q = n;
    for (const auto& f : d.jets)
        for (auto& g : q.jets)
            if (g.jet == f.jet) g.exp -= f.exp;
    std::erase_if(q.jets, [](const Monomial::Factor& f) { return f.exp == 0; });
    Poly e = poly_add(q.exp_part ? *q.exp_part : poly_zero(),
                      d.exp_part ? poly_neg(*d.exp_part) : poly_zero());
    q.exp_part = e.is_zero() ? nullptr : std::make_shared<const Poly>(std::move(e));
    return q;
}

// exact multivariate division; only attempted for exp-free divisors
std::optional<Poly> poly_exact_div(const Poly& num, const Poly& den) {
    if (den.is_zero()) return std::nullopt;
    Poly q = poly_zero();
    Poly r = num;
    const Term& lead = den.terms.front();
    size_t guard = 0;
    while (!r.is_zero()) {
        if (++guard > 10000) return std::nullopt;
        const Term& lr = r.terms.front();
        if (!mono_divides(lead.mono, lr.mono)) return std::nullopt;
        Term t{mono_quotient(lr.mono, lead.mono), Rational(lr.coeff / lead.coeff)};
        Poly tp;
        tp.terms.push_back(t);
        q = poly_add(q, tp);
        r = poly_add(r, poly_neg(poly_mul(tp, den)));
    }
    return q;
}

}  // namespace

NormalForm::NormalForm(Poly num, Poly den, const Workspace& ws) : num_(std::move(num)), den_(std::move(den)) {
    (void)ws;
    if (den_.is_zero()) throw ValidationError("division by zero");
    if (num_.is_zero()) {
        den_ = poly_const(rat(1));
        return;
    }
    // unit-normalize exponentials against the leading denominator monomial
    if (den_.terms.front().mono.exp_part) {
        Poly shift = *den_.terms.front().mono.exp_part;
        num_ = shift_exp(num_, shift);
        den_ = shift_exp(den_, shift);
    }
    // cancel common monomial content
    auto content = common_content(num_, den_);
    if (!content.empty()) {
        num_ = divide_content(num_, content);
        den_ = divide_content(den_, content);
    }
    // syntactic cancellation: exact division when the denominator is exp-free
    if (!den_.is_one() && !den_.is_constant() && !poly_has_exp(den_)) {
        if (auto q = poly_exact_div(num_, den_)) {
            num_ = std::move(*q);
            den_ = poly_const(rat(1));
        }
    }
    if (num_.is_zero()) {
        den_ = poly_const(rat(1));
        return;
    }
    // monic denominator
    const Rational lc = den_.terms.front().coeff;
    if (!is_one(lc)) {
        Rational inv = Rational(1 / lc);
        num_ = poly_scale(num_, inv);
        den_ = poly_scale(den_, inv);
    }
}

std::vector<Jet> NormalForm::jets() const {
    std::vector<Jet> out;
    poly_collect_jets(num_, out);
    poly_collect_jets(den_, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool NormalForm::mentions(FieldId f) const {
    for (const auto& j : jets())
        if (j.field == f) return true;
    return false;
}

std::string NormalForm::str(const Workspace& ws) const {
    if (den_.is_one()) return poly_string(num_, ws);
    std::string n = poly_string(num_, ws);
    std::string d = poly_string(den_, ws);
    std::string ln = num_.terms.size() > 1 ? "(" + n + ")" : n;
    std::string ld = den_.terms.size() > 1 || den_.terms.front().mono.jets.size() +
                                                      (den_.terms.front().mono.exp_part ? 1 : 0) +
                                                      (is_one(den_.terms.front().coeff) ? 0 : 1) >
                                                  1
                         ? "(" + d + ")"
                         : d;
    return ln + "/" + ld;
}

NormalForm nf_add(const NormalForm& a, const NormalForm& b, const Workspace& ws) {
    if (poly_equal(a.den(), b.den()))
        return NormalForm(poly_add(a.num(), b.num()), a.den(), ws);
    Poly num = poly_add(poly_mul(a.num(), b.den()), poly_mul(b.num(), a.den()));
    return NormalForm(std::move(num), poly_mul(a.den(), b.den()), ws);
}

NormalForm nf_neg(const NormalForm& a, const Workspace& ws) { return NormalForm(poly_neg(a.num()), a.den(), ws); }

NormalForm nf_sub(const NormalForm& a, const NormalForm& b, const Workspace& ws) {
    return nf_add(a, nf_neg(b, ws), ws);
}

NormalForm nf_mul(const NormalForm& a, const NormalForm& b, const Workspace& ws) {
    return NormalForm(poly_mul(a.num(), b.num()), poly_mul(a.den(), b.den()), ws);
}

NormalForm nf_div(const NormalForm& a, const NormalForm& b, const Workspace& ws) {
    if (b.is_zero()) throw ValidationError("division by zero");
    return NormalForm(poly_mul(a.num(), b.den()), poly_mul(a.den(), b.num()), ws);
}

NormalForm nf_pow(const NormalForm& a, int e, const Workspace& ws) {
    if (e >= 0) return NormalForm(poly_pow(a.num(), e), poly_pow(a.den(), e), ws);
    if (a.is_zero()) throw ValidationError("division by zero");
    return NormalForm(poly_pow(a.den(), -e), poly_pow(a.num(), -e), ws);
}

NormalForm nf_exp(const NormalForm& a, const Workspace& ws) {
    if (!a.den().is_one())
        throw ValidationError("exponent is not polynomial: " + a.str(ws));
    if (poly_has_exp(a.num()))
        throw ValidationError("nested exponential in exponent: " + a.str(ws));
    if (a.num().is_zero()) return NormalForm::constant(rat(1));
    Poly p;
    Monomial m;
    m.exp_part = std::make_shared<const Poly>(a.num());
    p.terms.push_back({std::move(m), rat(1)});
    return NormalForm(std::move(p), poly_const(rat(1)), ws);
}

NormalForm normalize(const Expr& e, const Workspace& ws) {
    const auto& n = e->node();
    if (auto* q = std::get_if<Rational>(&n)) return NormalForm::constant(*q);
    if (auto* j = std::get_if<Jet>(&n))
        return NormalForm(poly_atom(ws, *j), poly_const(rat(1)), ws);
    if (auto* s = std::get_if<ExprNode::Sum>(&n)) {
        NormalForm acc;
        for (const auto& t : s->terms) acc = nf_add(acc, normalize(t, ws), ws);
        return acc;
    }
    if (auto* p = std::get_if<ExprNode::Prod>(&n)) {
        NormalForm acc = NormalForm::constant(rat(1));
        for (const auto& f : p->factors) acc = nf_mul(acc, normalize(f, ws), ws);
        return acc;
    }
    if (auto* pw = std::get_if<ExprNode::Pow>(&n)) return nf_pow(normalize(pw->base, ws), pw->exponent, ws);
    const auto& ef = std::get<ExprNode::ExpF>(n);
    return nf_exp(normalize(ef.arg, ws), ws);
}

namespace {

Poly replace_in_exp_poly(const Poly& p, const std::map<Jet, NormalForm>& repl, const Workspace& ws) {
    // exponent polynomials must stay polynomial after replacement
    Poly out = poly_zero();
    for (const auto& t : p.terms) {
        Poly term = poly_const(t.coeff);
        for (const auto& f : t.mono.jets) {
            auto it = repl.find(f.jet);
            if (it == repl.end()) {
                term = poly_mul(term, poly_pow(poly_atom(ws, f.jet), f.exp));
            } else {
                if (!it->second.den().is_one() || poly_has_exp(it->second.num()))
                    throw ValidationError("substitution makes an exponent non-polynomial");
                term = poly_mul(term, poly_pow(it->second.num(), f.exp));
            }
        }
        out = poly_add(out, term);
    }
    return out;
}

NormalForm replace_in_poly(const Poly& p, const std::map<Jet, NormalForm>& repl, const Workspace& ws) {
    NormalForm acc;  // zero
    for (const auto& t : p.terms) {
        NormalForm term = NormalForm::constant(t.coeff);
        for (const auto& f : t.mono.jets) {
            auto it = repl.find(f.jet);
            NormalForm base = it == repl.end()
                                  ? NormalForm(poly_atom(ws, f.jet), poly_const(rat(1)), ws)
                                  : it->second;
            term = nf_mul(term, nf_pow(base, f.exp, ws), ws);
        }
        if (t.mono.exp_part) {
            Poly ep = replace_in_exp_poly(*t.mono.exp_part, repl, ws);
            NormalForm nfep(std::move(ep), poly_const(rat(1)), ws);
            term = nf_mul(term, nf_exp(nfep, ws), ws);
        }
        acc = nf_add(acc, term, ws);
    }
    return acc;
}

}  // namespace

NormalForm nf_replace_atoms(const NormalForm& a, const std::map<Jet, NormalForm>& repl, const Workspace& ws) {
    NormalForm n = replace_in_poly(a.num(), repl, ws);
    NormalForm d = replace_in_poly(a.den(), repl, ws);
    return nf_div(n, d, ws);
}

Expr poly_to_expr(const Poly& a, const Workspace& ws) {
    std::vector<Expr> terms;
    for (const auto& t : a.terms) {
        std::vector<Expr> factors;
        if (!is_one(t.coeff) || (t.mono.jets.empty() && !t.mono.exp_part)) factors.push_back(ex::rational(t.coeff));
        for (const auto& f : t.mono.jets) factors.push_back(ex::pow(ex::jet(f.jet), f.exp));
        if (t.mono.exp_part) factors.push_back(ex::exp_(poly_to_expr(*t.mono.exp_part, ws)));
        terms.push_back(ex::prod(std::move(factors)));
    }
    return ex::sum(std::move(terms));
}

Expr nf_to_expr(const NormalForm& a, const Workspace& ws) {
    Expr n = poly_to_expr(a.num(), ws);
    if (a.den().is_one()) return n;
    return ex::mul(n, ex::pow(poly_to_expr(a.den(), ws), -1));
}

}  // namespace rddym
