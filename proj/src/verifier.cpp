#include "rddym/verifier.hpp"

#include <algorithm>
#include <sstream>

namespace rddym {

namespace {

std::string mixed_ty_jets(const NormalForm& nf, const Workspace& ws) {
    std::vector<std::string> names;
    for (const auto& j : nf.jets())
        if (j.index[Coord::T] >= 1 && j.index[Coord::Y] >= 1) names.push_back(jet_name(ws, j));
    std::string out;
    for (size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
    return out;
}

Expr residual_expr(const OrientedSystem& sys, size_t i, const Workspace& ws) { return sys.residual(i, ws); }

Bindings whole_field_bindings(const std::vector<std::pair<FieldId, Expr>>& subs) {
    Bindings b;
    for (const auto& [f, val] : subs) b.bind_field(f, val);
    return b;
}

}  // namespace

Expr compatibility_residual(const Covering& cov, const Workspace& ws) {
    Expr dy_t = total_derivative(cov.equation(Coord::T), Coord::Y, ws, &cov);
    Expr dt_y = total_derivative(cov.equation(Coord::Y), Coord::T, ws, &cov);
    Expr res = ex::sub(dy_t, dt_y);
    return nf_to_expr(normalize(res, ws), ws);
}

CheckOutcome verify_covering(const Covering& cov, const OrientedSystem& sys, const Workspace& ws) {
    try {
        Expr res = compatibility_residual(cov, ws);
        ReduceResult red = reduce_modulo_traced(res, sys, ws);
        CheckOutcome out;
        out.trace_len = red.passes;
        out.residual = red.nf.str(ws);
        if (red.nf.is_zero()) {
            out.status = CheckStatus::Pass;
        } else {
            out.status = CheckStatus::Fail;
            std::string mixed = mixed_ty_jets(red.nf, ws);
            if (!mixed.empty()) out.diagnostic = "residual contains " + mixed;
        }
        return out;
    } catch (const Error& e) {
        return CheckOutcome::error(e.what());
    }
}

Covering implicit_parameter_swap(const Covering& cov, FieldId new_fiber, const Workspace& ws) {
    if (!cov.parameter()) throw ValidationError("covering carries no parameter to swap");
    FieldId p = cov.fiber();
    NormalForm px = normalize(ex::jet(Jet{p, Multi{}.plus(Coord::X)}), ws);
    NormalForm q_atom = normalize(ex::jet(Jet{new_fiber, Multi{}}), ws);
    Expr eqs[2];
    int slot = 0;
    for (Coord c : {Coord::T, Coord::Y}) {
        NormalForm A = nf_div(normalize(cov.equation(c), ws), px, ws);
        for (const auto& j : A.jets()) {
            if (j.field != p) continue;
            if (j.index.is_zero())
                throw ValidationError("coefficient depends on the fiber variable");
            throw ValidationError("covering is not linear in the fiber x-derivative");
        }
        std::map<Jet, NormalForm> repl{{Jet{*cov.parameter(), Multi{}}, q_atom}};
        NormalForm Aq = nf_replace_atoms(A, repl, ws);
        Expr qx = ex::jet(Jet{new_fiber, Multi{}.plus(Coord::X)});
        eqs[slot++] = ex::mul(nf_to_expr(Aq, ws), qx);
    }
    return Covering(new_fiber, eqs[0], eqs[1], ws, std::nullopt);
}

std::optional<std::string> unit_factor(const NormalForm& ratio, const Workspace& ws) {
    if (ratio.is_zero()) return std::nullopt;
    if (ratio.num().terms.size() != 1 || ratio.den().terms.size() != 1) return std::nullopt;
    for (const Poly* p : {&ratio.num(), &ratio.den()})
        for (const auto& f : p->terms.front().mono.jets)
            if (ws.kind(f.jet.field) != FieldKind::Parameter) return std::nullopt;
    return ratio.str(ws);
}

// Unit c with a == c * b, found from the leading terms and verified by exact
// subtraction (no polynomial gcd involved).
std::optional<std::string> unit_factor_between(const NormalForm& a, const NormalForm& b,
                                               const Workspace& ws) {
    if (a.is_zero() || b.is_zero()) return std::nullopt;
    Poly lhs = poly_mul(a.num(), b.den());
    Poly rhs = poly_mul(b.num(), a.den());
    const Term& la = lhs.terms.front();
    const Term& lb = rhs.terms.front();
    // candidate = la / lb, split into a positive and a negative exponent part
    Monomial cnum, cden;
    std::map<std::pair<uint32_t, Jet>, int> exps;
    for (const auto& f : la.mono.jets) exps[{f.ord, f.jet}] += f.exp;
    for (const auto& f : lb.mono.jets) exps[{f.ord, f.jet}] -= f.exp;
    for (const auto& [key, e] : exps) {
        if (e > 0)
            cnum.jets.push_back({key.second, key.first, e});
        else if (e < 0)
            cden.jets.push_back({key.second, key.first, -e});
        if (e != 0 && ws.kind(key.second.field) != FieldKind::Parameter) return std::nullopt;
    }
    Poly ediff = poly_add(la.mono.exp_part ? *la.mono.exp_part : poly_zero(),
                          lb.mono.exp_part ? poly_neg(*lb.mono.exp_part) : poly_zero());
    if (!ediff.is_zero()) cnum.exp_part = std::make_shared<const Poly>(ediff);
    Rational coeff(la.coeff / lb.coeff);
    Poly pnum, pden;
    pnum.terms.push_back({cnum, coeff});
    pden.terms.push_back({cden, rat(1)});
    // verify a*den_b*cden == c_num * b*den_a exactly
    Poly check = poly_add(poly_mul(lhs, pden), poly_neg(poly_mul(pnum, rhs)));
    if (!check.is_zero()) return std::nullopt;
    return NormalForm(std::move(pnum), std::move(pden), ws).str(ws);
}

namespace {

// try: identically zero | unit multiple of target | zero modulo target
struct MatchResult {
    enum Kind { Identity, Unit, Consequence, Mismatch, ErrorK } kind;
    std::string factor;
    std::string residual;
    std::string diagnostic;
    int trace = 0;
};

MatchResult match_equation(const NormalForm& sub, const NormalForm& target_res, bool allow_unit,
                           const OrientedSystem& target, const Workspace& ws) {
    MatchResult m;
    if (sub.is_zero()) {
        m.kind = MatchResult::Identity;
        m.residual = "0";
        return m;
    }
    if (allow_unit) {
        if (auto f = unit_factor_between(sub, target_res, ws)) {
            m.kind = MatchResult::Unit;
            m.factor = *f;
            m.residual = "0";
            return m;
        }
    }
    try {
        ReduceResult red = reduce_modulo_traced(sub, target, ws);
        m.trace = red.passes;
        m.residual = red.nf.str(ws);
        m.kind = red.nf.is_zero() ? MatchResult::Consequence : MatchResult::Mismatch;
    } catch (const Error& e) {
        m.kind = MatchResult::ErrorK;
        m.diagnostic = e.what();
    }
    return m;
}

NormalForm mapped_target_residual(const ReductionSpec& red, const OrientedSystem& target,
                                  const Workspace& ws) {
    Expr res = target.residual(0, ws);
    if (red.target_map) {
        Bindings b;
        b.bind_field(red.target_map->first, red.target_map->second);
        res = substitute(res, b, ws);
    }
    return normalize(res, ws);
}

}  // namespace

CheckOutcome verify_reduction(const ReductionSpec& red, const OrientedSystem& source,
                              const OrientedSystem& target, const Workspace& ws) {
    try {
        Bindings subs = whole_field_bindings(red.substitutions);
        NormalForm target_res = mapped_target_residual(red, target, ws);
        CheckOutcome out;
        out.status = CheckStatus::Pass;
        std::vector<std::string> notes;
        bool matched = false;
        for (size_t i = 0; i < source.rules().size(); ++i) {
            NormalForm sub = normalize(substitute(residual_expr(source, i, ws), subs, ws), ws);
            MatchResult m = match_equation(sub, target_res, !matched, target, ws);
            out.trace_len += m.trace;
            switch (m.kind) {
                case MatchResult::Identity:
                    notes.push_back("equation " + std::to_string(i + 1) + " is identically zero");
                    break;
                case MatchResult::Unit:
                    matched = true;
                    out.factor = m.factor;
                    notes.push_back("equation " + std::to_string(i + 1) + " equals target times " + m.factor);
                    break;
                case MatchResult::Consequence:
                    notes.push_back("equation " + std::to_string(i + 1) +
                                    " is a differential consequence of the target");
                    break;
                case MatchResult::Mismatch:
                    out.status = CheckStatus::Fail;
                    out.residual = m.residual;
                    break;
                case MatchResult::ErrorK:
                    return CheckOutcome::error(m.diagnostic);
            }
            if (out.status == CheckStatus::Fail) break;
        }
        if (out.status == CheckStatus::Pass && !matched)
            return CheckOutcome::fail("", "no substituted equation matched the target");
        if (out.status == CheckStatus::Pass) {
            out.residual = "0";
            std::string d;
            for (const auto& n : notes) d += (d.empty() ? "" : "; ") + n;
            out.diagnostic = d;
        }
        return out;
    } catch (const Error& e) {
        return CheckOutcome::error(e.what());
    }
}

CheckOutcome verify_point_map(const ReductionSpec& red, const OrientedSystem& from,
                              const OrientedSystem& to, const Workspace& ws) {
    try {
        if (!red.point_map) return CheckOutcome::error("reduction carries no point transformation");
        Bindings b;
        b.bind_field(red.point_map->first, red.point_map->second);
        NormalForm mapped = normalize(substitute(from.residual(0, ws), b, ws), ws);
        NormalForm target_res = normalize(to.residual(0, ws), ws);
        if (auto f = unit_factor_between(mapped, target_res, ws)) {
            CheckOutcome out = CheckOutcome::pass();
            out.factor = *f;
            return out;
        }
        return CheckOutcome::fail(nf_sub(mapped, target_res, ws).str(ws),
                                  "mapped equation is not a unit multiple of the target");
    } catch (const Error& e) {
        return CheckOutcome::error(e.what());
    }
}

namespace {

struct ChangeOfUnknown {
    Bindings vbind;
    Bindings relation;
    Expr u_xx_value;
    Jet u_xx;
    NormalForm scalar_rule_rhs;  // u_ty -> rhs of the v-substituted equation
    Jet u_ty;
};

ChangeOfUnknown prepare_change_of_unknown(const ReductionSpec& red, const OrientedSystem& source,
                                          const Workspace& ws) {
    if (!red.relation) throw ValidationError("reduction carries no change-of-unknown relation");
    ChangeOfUnknown c;
    c.vbind = whole_field_bindings(red.substitutions);
    c.relation.bind_jet(red.relation->first, red.relation->second);
    FieldId u = red.relation->first.field;
    c.u_xx = Jet{u, Multi{{0, 0, 2}}};
    c.u_ty = Jet{u, Multi{{1, 1, 0}}};

    Expr r0 = substitute(residual_expr(source, 0, ws), c.vbind, ws);
    // orient the v-substituted scalar equation on u_ty (for the consequence check)
    NormalForm r0nf = normalize(r0, ws);
    auto by_uty = poly_collect_atom(r0nf.num(), c.u_ty);
    if (by_uty.count(1) == 0 || by_uty.rbegin()->first != 1)
        throw ValidationError("substituted equation is not linear in " + jet_name(ws, c.u_ty));
    Poly p1 = by_uty.at(1);
    Poly p0 = by_uty.count(0) ? by_uty.at(0) : poly_zero();
    c.scalar_rule_rhs = nf_div(NormalForm(poly_neg(p0), p1, ws), NormalForm::constant(rat(1)), ws);

    // rewrite u-jets containing y, then isolate u_xx
    NormalForm r1 = normalize(substitute(r0, c.relation, ws), ws);
    auto by_uxx = poly_collect_atom(r1.num(), c.u_xx);
    int maxdeg = by_uxx.empty() ? 0 : by_uxx.rbegin()->first;
    if (maxdeg != 1)
        throw ValidationError("cannot isolate " + jet_name(ws, c.u_xx) + " from the rewritten relation");
    Poly q1 = by_uxx.at(1);
    Poly q0 = by_uxx.count(0) ? by_uxx.at(0) : poly_zero();
    c.u_xx_value = nf_to_expr(NormalForm(poly_neg(q0), q1, ws), ws);
    return c;
}

}  // namespace

CheckOutcome verify_change_of_unknown(const ReductionSpec& red, const OrientedSystem& source,
                                      const OrientedSystem& target, const Workspace& ws) {
    try {
        ChangeOfUnknown c = prepare_change_of_unknown(red, source, ws);
        Expr r0 = substitute(residual_expr(source, 0, ws), c.vbind, ws);

        // second source equation must follow from the scalar equation
        CheckOutcome out;
        out.status = CheckStatus::Pass;
        if (source.rules().size() > 1) {
            OrientedSystem scalar({{c.u_ty, nf_to_expr(c.scalar_rule_rhs, ws)}}, ws);
            NormalForm sub2 = normalize(substitute(residual_expr(source, 1, ws), c.vbind, ws), ws);
            ReduceResult red2 = reduce_modulo_traced(sub2, scalar, ws);
            out.trace_len += red2.passes;
            if (!red2.nf.is_zero())
                return CheckOutcome::fail(red2.nf.str(ws),
                                          "second equation is not a consequence of the scalar equation");
        }

        Expr s = total_derivative(r0, Coord::Y, ws, nullptr);
        s = substitute(s, c.relation, ws);
        Bindings uxx;
        uxx.bind_jet(c.u_xx, c.u_xx_value);
        s = substitute(s, uxx, ws);
        NormalForm snf = normalize(s, ws);
        NormalForm target_res = mapped_target_residual(red, target, ws);
        if (auto f = unit_factor_between(snf, target_res, ws)) {
            out.factor = *f;
            out.residual = "0";
            out.diagnostic = jet_name(ws, c.u_xx) + " = " + normalize(c.u_xx_value, ws).str(ws) +
                             "; result equals target times " + *f;
            return out;
        }
        return CheckOutcome::fail(snf.str(ws), "pipeline result is not a unit multiple of the target");
    } catch (const Error& e) {
        return CheckOutcome::error(e.what());
    }
}

Covering derive_reduced_covering(const ReductionSpec& red, const OrientedSystem& source,
                                 const Covering& cov, FieldId new_fiber, const Workspace& ws) {
    ChangeOfUnknown c = prepare_change_of_unknown(red, source, ws);
    Bindings uxx;
    uxx.bind_jet(c.u_xx, c.u_xx_value);
    Bindings fiber_change;
    fiber_change.bind_field(cov.fiber(), ex::exp_(ex::jet(Jet{new_fiber, Multi{}})));
    Expr eqs[2];
    int slot = 0;
    for (Coord coord : {Coord::T, Coord::Y}) {
        Expr e = cov.equation(coord);
        e = substitute(e, c.vbind, ws);
        e = substitute(e, c.relation, ws);
        e = substitute(e, uxx, ws);
        e = substitute(e, fiber_change, ws);
        e = ex::mul(e, ex::exp_(ex::neg(ex::jet(Jet{new_fiber, Multi{}}))));
        eqs[slot++] = nf_to_expr(normalize(e, ws), ws);
    }
    return Covering(new_fiber, eqs[0], eqs[1], ws, std::nullopt);
}

CheckOutcome verify_backlund_forward(const TransformationSpec& bt, const Covering& cov_src,
                                     const Covering& cov_dst, const Workspace& ws) {
    try {
        if (cov_src.fiber() != cov_dst.fiber())
            return CheckOutcome::error("coverings use different fiber variables");
        Bindings b;
        std::vector<FieldId> defined;
        for (const auto& [jet, val] : bt.bindings) {
            b.bind_jet(jet, val);
            defined.push_back(jet.field);
        }
        auto bindable = [&](const Jet& j) {
            for (const auto& [key, val] : bt.bindings)
                if (key.field == j.field && j.index.minus(key.index)) return true;
            return false;
        };
        for (Coord c : {Coord::T, Coord::Y}) {
            NormalForm got = normalize(substitute(cov_src.equation(c), b, ws), ws);
            for (const auto& j : got.jets()) {
                bool is_defined = std::find(defined.begin(), defined.end(), j.field) != defined.end();
                if (is_defined && !j.index.is_zero() && !bindable(j))
                    return CheckOutcome::error("substitution leaves an unbound jet " + jet_name(ws, j));
            }
            NormalForm want = normalize(cov_dst.equation(c), ws);
            if (!(got == want))
                return CheckOutcome::fail(nf_sub(got, want, ws).str(ws),
                                          std::string("mismatch in the ") + coord_name(c) + "-equation");
        }
        return CheckOutcome::pass();
    } catch (const Error& e) {
        return CheckOutcome::error(e.what());
    }
}

TransformationSpec solve_backlund_inverse(const TransformationSpec& bt, const std::vector<Jet>& unknowns,
                                          const Workspace& ws) {
    std::vector<NormalForm> eqs;
    for (const auto& [jet, val] : bt.bindings)
        eqs.push_back(normalize(ex::sub(val, ex::jet(jet)), ws));

    auto mentions_any = [&](const Poly& p, const std::vector<Jet>& atoms) {
        std::vector<Jet> js;
        poly_collect_jets(p, js);
        for (const auto& j : js)
            for (const auto& a : atoms)
                if (j == a) return true;
        return false;
    };

    std::vector<Jet> remaining = unknowns;
    std::sort(remaining.begin(), remaining.end());
    std::map<Jet, NormalForm> solution;
    while (!remaining.empty()) {
        bool progress = false;
        for (size_t ei = 0; ei < eqs.size() && !progress; ++ei) {
            for (size_t ui = 0; ui < remaining.size() && !progress; ++ui) {
                Jet unk = remaining[ui];
                auto parts = poly_collect_atom(eqs[ei].num(), unk);
                if (!parts.count(1) || parts.rbegin()->first != 1) continue;
                Poly p1 = parts.at(1);
                Poly p0 = parts.count(0) ? parts.at(0) : poly_zero();
                std::vector<Jet> others;
                for (const auto& r : remaining)
                    if (!(r == unk)) others.push_back(r);
                if (mentions_any(p1, others) || mentions_any(p0, others)) continue;
                NormalForm sol(poly_neg(p0), p1, ws);
                solution.emplace(unk, sol);
                remaining.erase(remaining.begin() + static_cast<long>(ui));
                std::map<Jet, NormalForm> repl{{unk, sol}};
                for (auto& e : eqs) e = nf_replace_atoms(e, repl, ws);
                progress = true;
            }
        }
        if (!progress) throw ValidationError("sequential elimination failed (degenerate transformation)");
    }
    // denominators must stay within the non-degeneracy atoms (powers of u_y)
    for (const auto& [unk, sol] : solution) {
        for (const auto& j : [&] {
                 std::vector<Jet> js;
                 poly_collect_jets(sol.den(), js);
                 return js;
             }()) {
            if (!(j.index == Multi{{0, 1, 0}}))
                throw ValidationError("solved expression for " + jet_name(ws, unk) +
                                      " has an unexpected denominator");
        }
    }
    TransformationSpec out;
    for (const auto& [unk, sol] : solution) out.bindings.emplace_back(unk, nf_to_expr(sol, ws));
    return out;
}

CheckOutcome backlund_roundtrip(const TransformationSpec& forward, const TransformationSpec& inverse,
                                const Workspace& ws) {
    try {
        std::map<Jet, NormalForm> repl;
        for (const auto& [jet, val] : inverse.bindings) repl.emplace(jet, normalize(val, ws));
        for (const auto& [jet, val] : forward.bindings) {
            NormalForm back = nf_replace_atoms(normalize(val, ws), repl, ws);
            NormalForm want = normalize(ex::jet(jet), ws);
            if (!(back == want))
                return CheckOutcome::fail(nf_sub(back, want, ws).str(ws),
                                          "round trip does not return " + jet_name(ws, jet));
        }
        return CheckOutcome::pass();
    } catch (const Error& e) {
        return CheckOutcome::error(e.what());
    }
}

namespace {

// induced substitution for every derivative jet of a defined field, choosing
// the binding with the smallest bound index (deterministic route selection)
struct InducedSubstitution {
    const TransformationSpec& bt;
    const Workspace& ws;

    std::optional<Expr> route(const Jet& j) const {
        const std::pair<Jet, Expr>* best = nullptr;
        for (const auto& bind : bt.bindings) {
            if (bind.first.field != j.field) continue;
            if (!j.index.minus(bind.first.index)) continue;
            if (!best || bind.first.index < best->first.index) best = &bind;
        }
        if (!best) return std::nullopt;
        Multi tau = *j.index.minus(best->first.index);
        return total_derivative(best->second, tau, ws, nullptr);
    }

    bool is_defined_field(FieldId f) const {
        for (const auto& bind : bt.bindings)
            if (bind.first.field == f) return true;
        return false;
    }

    // substitute until no bound derivative jets of defined fields remain
    Expr apply(Expr e, int max_passes = 6) const {
        for (int pass = 0; pass < max_passes; ++pass) {
            std::map<Jet, Expr> exact;
            for (const auto& j : collect_jets(e)) {
                if (j.index.is_zero() || !is_defined_field(j.field)) continue;
                if (auto r = route(j)) exact.emplace(j, *r);
            }
            if (exact.empty()) return e;
            e = replace_exact_jets(e, exact);
        }
        throw ValidationError("induced substitution did not stabilize");
    }
};

}  // namespace

CheckOutcome verify_backlund_compatibility(const TransformationSpec& bt, const OrientedSystem& sys,
                                           const Workspace& ws) {
    try {
        std::map<FieldId, std::vector<std::pair<Multi, Expr>>> by_field;
        for (const auto& [jet, val] : bt.bindings) by_field[jet.field].emplace_back(jet.index, val);
        InducedSubstitution ind{bt, ws};

        CheckOutcome out;
        out.status = CheckStatus::Pass;
        std::vector<std::string> residuals;
        for (auto& [field, binds] : by_field) {
            std::sort(binds.begin(), binds.end());
            for (size_t a = 0; a < binds.size(); ++a) {
                for (size_t b = a + 1; b < binds.size(); ++b) {
                    if (binds[a].first.total() != 1 || binds[b].first.total() != 1) continue;
                    Coord ca = Coord::T, cb = Coord::T;
                    for (Coord c : kCoords) {
                        if (binds[a].first[c]) ca = c;
                        if (binds[b].first[c]) cb = c;
                    }
                    Expr cross = ex::sub(total_derivative(binds[a].second, cb, ws, nullptr),
                                         total_derivative(binds[b].second, ca, ws, nullptr));
                    cross = ind.apply(cross);
                    // leftover derivative jets of defined fields are inexpressible
                    for (const auto& j : collect_jets(cross))
                        if (!j.index.is_zero() && ind.is_defined_field(j.field) && !ind.route(j))
                            return CheckOutcome::error("no admissible derivative order: condition for '" +
                                                       ws.name(field) + "' needs " + jet_name(ws, j));
                    ReduceResult red = reduce_modulo_traced(cross, sys, ws);
                    out.trace_len += red.passes;
                    if (!red.nf.is_zero()) {
                        out.status = CheckStatus::Fail;
                        residuals.push_back(ws.name(field) + ": " + red.nf.str(ws));
                    }
                }
            }
        }
        if (out.status == CheckStatus::Fail) {
            std::string r;
            for (size_t i = 0; i < residuals.size(); ++i) r += (i ? "; " : "") + residuals[i];
            out.residual = r;
            out.diagnostic = "cross-derivative condition does not vanish";
        }
        return out;
    } catch (const Error& e) {
        return CheckOutcome::error(e.what());
    }
}

CheckOutcome verify_backlund_images(const TransformationSpec& bt, const OrientedSystem& source,
                                    const OrientedSystem& target, const Workspace& ws) {
    try {
        InducedSubstitution ind{bt, ws};
        CheckOutcome out;
        out.status = CheckStatus::Pass;
        std::vector<std::string> residuals;
        for (size_t i = 0; i < source.rules().size(); ++i) {
            Expr res = ind.apply(residual_expr(source, i, ws));
            ReduceResult red = reduce_modulo_traced(res, target, ws);
            out.trace_len += red.passes;
            if (!red.nf.is_zero()) {
                out.status = CheckStatus::Fail;
                residuals.push_back("equation " + std::to_string(i + 1) + ": " + red.nf.str(ws));
            }
        }
        if (out.status == CheckStatus::Fail) {
            std::string r;
            for (size_t i = 0; i < residuals.size(); ++i) r += (i ? "; " : "") + residuals[i];
            out.residual = r;
            out.diagnostic = "image of the source system does not vanish modulo the target";
        }
        return out;
    } catch (const Error& e) {
        return CheckOutcome::error(e.what());
    }
}

Expr rename_fields(const Expr& e, const std::map<FieldId, FieldId>& m, const Workspace& ws) {
    const auto& n = e->node();
    if (std::holds_alternative<Rational>(n)) return e;
    if (auto* j = std::get_if<Jet>(&n)) {
        auto it = m.find(j->field);
        if (it == m.end()) return e;
        return ex::jet(make_jet(ws, it->second, j->index));
    }
    if (auto* s = std::get_if<ExprNode::Sum>(&n)) {
        std::vector<Expr> out;
        for (const auto& t : s->terms) out.push_back(rename_fields(t, m, ws));
        return ex::sum(std::move(out));
    }
    if (auto* p = std::get_if<ExprNode::Prod>(&n)) {
        std::vector<Expr> out;
        for (const auto& f : p->factors) out.push_back(rename_fields(f, m, ws));
        return ex::prod(std::move(out));
    }
    if (auto* pw = std::get_if<ExprNode::Pow>(&n)) return ex::pow(rename_fields(pw->base, m, ws), pw->exponent);
    const auto& ef = std::get<ExprNode::ExpF>(n);
    return ex::exp_(rename_fields(ef.arg, m, ws));
}

OrientedSystem rename_fields(const OrientedSystem& sys, const std::map<FieldId, FieldId>& m,
                             const Workspace& ws) {
    std::vector<OrientedSystem::Rule> rules;
    for (const auto& r : sys.rules()) {
        Jet lead = r.lead;
        auto it = m.find(lead.field);
        if (it != m.end()) lead.field = it->second;
        rules.push_back({lead, rename_fields(r.rhs, m, ws)});
    }
    return OrientedSystem(std::move(rules), ws, sys.max_order());
}

}  // namespace rddym
