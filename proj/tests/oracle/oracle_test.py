"""Independent re-derivation of every frozen symbolic fact.

Runs the same claims the C++ suites certify, but through the sympy-based
jet calculus in this directory and the raw fixture files, so agreement means
two unrelated implementations computed the same mathematics.
"""

import os
import sys

try:
    import sympy as sp
except ImportError:
    print("sympy unavailable; skipping the oracle")
    sys.exit(77)

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from fixtures import OracleCatalog, parse_expr
from jetcalc import Ctx, covering_residual, is_zero, jet, reduce_modulo

CATALOG = os.environ.get("RDDYM_CATALOG_DIR", "catalog")
failures = []


def check(name, ok):
    print(("ok   " if ok else "FAIL ") + name)
    if not ok:
        failures.append(name)


def main():
    cat = OracleCatalog(CATALOG)

    # --- covering compatibility: the seven verified pairs reduce to zero
    pairs = [
        ("cov.lambda", "eq.rdDym"),
        ("cov.q", "eq.rdDym"),
        ("cov.gen", "sys.rdDym2"),
        ("cov.boyer_finley", "eq.boyer_finley"),
        ("cov.deformed_bf", "eq.deformed_bf"),
        ("cov.bogdanov", "sys.bogdanov"),
        ("cov.universal", "eq.universal"),
    ]
    for cov_id, sys_id in pairs:
        ctx, fiber, eq_t, eq_y = cat.ctx_for_covering(cov_id)
        res = covering_residual(ctx, eq_t, eq_y)
        red = reduce_modulo(res, cat.system_rules(sys_id), ctx)
        check(f"{cov_id} compatible over {sys_id}", is_zero(red))

    # --- and the two printed variants genuinely are not
    ctx, _, eq_t, eq_y = cat.ctx_for_covering("cov.bogdanov")
    res = covering_residual(ctx, eq_t, eq_y)
    red = reduce_modulo(res, cat.system_rules("sys.bogdanov_printed"), ctx)
    check("cov.bogdanov incompatible over the printed system", not is_zero(red))

    ctx, _, eq_t, eq_y = cat.ctx_for_covering("cov.deformed_bf_printed")
    res = covering_residual(ctx, eq_t, eq_y)
    red = reduce_modulo(res, cat.system_rules("eq.deformed_bf"), ctx)
    check("printed deformed covering incompatible", not is_zero(red))

    # --- iff structure of the generalized covering
    ctx, _, eq_t, eq_y = cat.ctx_for_covering("cov.gen")
    res = covering_residual(ctx, eq_t, eq_y)
    rules = cat.system_rules("sys.rdDym2")
    r12 = reduce_modulo(res, rules[:1], ctx)
    r13 = reduce_modulo(res, rules[1:], ctx)
    check("only the first equation leaves v_ty", (not is_zero(r12)) and r12.has(jet("v", "ty")))
    check("only the second equation leaves u_ty", (not is_zero(r13)) and r13.has(jet("u", "ty")))

    # --- implicit parameter swap reproduces the q-covering
    _, lam_t, lam_y, param = cat.covering("cov.lambda")
    _, q_t, q_y, _ = cat.covering("cov.q")
    lam = sp.Symbol(param)
    px, qsym, qx = jet("p", "x"), jet("q"), jet("q", "x")
    swapped_t = sp.cancel(lam_t / px).subs(lam, qsym) * qx
    swapped_y = sp.cancel(lam_y / px).subs(lam, qsym) * qx
    check("swap reproduces the q-covering", is_zero(swapped_t - q_t) and is_zero(swapped_y - q_y))

    # --- reductions: substituted equations vs targets, with unit factors
    base = Ctx(cat.base, cat.params)
    u_res = lambda rules: rules[0][0] - rules[0][1]

    def whole_sub(expr, field, value, order=3):
        repl = {}
        for s in expr.free_symbols:
            name = s.name
            if name == field or name.startswith(field + "_"):
                suffix = name.split("_", 1)[1] if "_" in name else ""
                v = value
                for c in suffix:
                    v = base.D(v, c)
                repl[s] = v
        return sp.expand(expr.subs(repl))

    rd2 = cat.system_rules("sys.rdDym2")
    res12 = rd2[0][0] - rd2[0][1]
    res13 = rd2[1][0] - rd2[1][1]

    # A: v = 0
    tgt = cat.system_rules("eq.rdDym")
    check("reduction A first member", is_zero(whole_sub(res12, "v", sp.Integer(0)) - u_res(tgt)))
    check("reduction A second member", is_zero(whole_sub(res13, "v", sp.Integer(0))))

    # B: v = -(1/kappa + 1) u_x, then u -> -kappa u maps (the transformed
    # equation) onto the general one with factor -kappa
    kappa = sp.Symbol("kappa")
    vB = -(1 / kappa + 1) * jet("u", "x")
    t14 = cat.system_rules("eq.rdDym_general_transformed")
    check("reduction B first member", is_zero(whole_sub(res12, "v", vB) - u_res(t14)))
    sub13 = whole_sub(res13, "v", vB)
    check("reduction B consequence", is_zero(reduce_modulo(sub13, t14, base)))
    mapped = whole_sub(u_res(t14), "u", -kappa * jet("u"))
    t10 = cat.system_rules("eq.rdDym_general")
    check("reduction B point map factor -kappa", is_zero(sp.cancel(mapped / u_res(t10)) + kappa))

    # C and D: change of unknown pipelines with factors -e^w and e^w
    w = jet("w")

    def pipeline(vsub, eps, target_res):
        r0 = whole_sub(res12, "v", vsub)
        ew = eps * sp.exp(w)

        def usub_y(expr):
            repl = {}
            for s in expr.free_symbols:
                if s.name.startswith("u_") and "y" in s.name:
                    suffix = s.name[2:].replace("y", "", 1)
                    v = ew
                    for c in suffix:
                        v = base.D(v, c)
                    repl[s] = v
            return sp.expand(expr.subs(repl))

        r1 = usub_y(r0)
        uxx = jet("u", "xx")
        poly = sp.Poly(r1, uxx)
        assert poly.degree() == 1
        uxx_value = sp.cancel(-poly.coeff_monomial(1) / poly.coeff_monomial(uxx))
        s_expr = usub_y(base.D(r0, "y")).subs(uxx, uxx_value)
        return sp.simplify(sp.cancel(s_expr / target_res))

    bf = cat.system_rules("eq.boyer_finley")
    dbf = cat.system_rules("eq.deformed_bf")
    check("reduction C factor -exp(w)",
          is_zero(pipeline(-jet("u", "x"), -1, u_res(bf)) + sp.exp(w)))
    check("reduction D factor exp(w)",
          is_zero(pipeline(jet("u", "y") - jet("u", "x"), +1, u_res(dbf)) - sp.exp(w)))

    # s = x collapses the two-component system onto the Boyer-Finley
    # equation written for w = -r (factor e^r)
    bog = cat.system_rules("sys.bogdanov")
    sx_subs = {jet("s", i): (1 if i == "x" else 0) for i in ("x", "t", "ty", "xy", "xx")}
    first = sp.simplify((bog[0][0] - bog[0][1]).subs(sx_subs))
    second = sp.expand((bog[1][0] - bog[1][1]).subs(sx_subs))
    bf_neg = whole_sub(u_res(bf), "w", -jet("r"))
    check("s = x first member identically zero", first == 0)
    check("s = x second member is e^r times the w = -r form",
          sp.simplify(sp.cancel(second / bf_neg) - sp.exp(jet("r"))) == 0)

    # --- Backlund web
    fwd = dict((lhs, rhs) for lhs, rhs in cat.transformation("bt.forward"))
    gen_ctx, fiber, gen_t, gen_y = cat.ctx_for_covering("cov.gen")
    _, bog_t, bog_y, _ = cat.covering("cov.bogdanov")
    img_t = sp.expand(gen_t.subs(fwd))
    img_y = sp.expand(gen_y.subs(fwd))
    # the bare v in the u_x binding cancels inside u_x + v
    check("forward substitution maps covering to covering",
          is_zero(img_t - bog_t) and is_zero(img_y - bog_y))

    def cross(bind_a, ca, bind_b, cb, ctx, more):
        lhs = ctx.D(bind_a, cb)
        rhs = ctx.D(bind_b, ca)
        return sp.expand((lhs - rhs).subs(more))

    sr = Ctx({"s", "r", "u", "v"}, cat.params)
    uv = Ctx({"u", "v"}, cat.params)
    cross_u = cross(fwd[jet("u", "x")], "x", fwd[jet("u", "y")], "y", sr, fwd)
    cross_v = cross(fwd[jet("v", "x")], "x", fwd[jet("v", "y")], "y", sr, fwd)
    check("forward u-pair compatible", is_zero(reduce_modulo(cross_u, bog, sr)))
    check("forward v-pair compatible", is_zero(reduce_modulo(cross_v, bog, sr)))

    # the derived inverse is the algebraic solution and is compatible;
    # the printed one is not
    for variant, expect in (("bt.inverse_derived", True), ("bt.inverse_printed", False)):
        inv = dict(cat.transformation(variant))
        # treat bare r through its bound derivatives
        rt, rx = inv[jet("r", "t")], inv[jet("r", "x")]

        def D_inv(expr, c):
            out = 0
            expr = sp.sympify(expr)
            for s in expr.free_symbols:
                if s == jet("r"):
                    d = rt if c == "t" else rx
                else:
                    d = uv._dsym(s, c)
                if d != 0:
                    out += sp.diff(expr, s) * d
            return sp.expand(out)

        c_s = D_inv(inv[jet("s", "t")], "x") - D_inv(inv[jet("s", "x")], "t")
        c_r = D_inv(rt, "x") - D_inv(rx, "t")
        ok = is_zero(reduce_modulo(c_s, rd2, uv)) and is_zero(reduce_modulo(c_r, rd2, uv))
        check(f"{variant} compatibility is {expect}", ok == expect)

    # round trip: inverse substituted into the forward right-hand sides
    inv = dict(cat.transformation("bt.inverse_derived"))
    for defined, rhs in fwd.items():
        back = sp.simplify(sp.cancel(sp.expand(rhs.subs(inv)) - defined))
        check(f"round trip returns {defined}", back == 0)

    # scalar case: the transformation links the special equation with the
    # universal hierarchy; the hyper-CR equation fails
    sc = dict(cat.transformation("bt.scalar_forward"))
    s_ctx = Ctx({"s"}, cat.params)
    u_ctx = Ctx({"u"}, cat.params)
    uni = cat.system_rules("eq.universal")
    cross_sc = s_ctx.D(sc[jet("u", "x")], "y") - s_ctx.D(sc[jet("u", "y")], "x")
    check("scalar forward cross-condition", is_zero(reduce_modulo(cross_sc, uni, s_ctx)))
    subs2 = {
        jet("u", "ty"): s_ctx.D(sc[jet("u", "y")], "t"),
        jet("u", "xy"): s_ctx.D(sc[jet("u", "y")], "x"),
        jet("u", "yy"): s_ctx.D(sc[jet("u", "y")], "y"),
        jet("u", "xx"): s_ctx.D(sc[jet("u", "x")], "x"),
        jet("u", "tx"): s_ctx.D(sc[jet("u", "x")], "t"),
        jet("u", "x"): sc[jet("u", "x")],
        jet("u", "y"): sc[jet("u", "y")],
    }
    rdDym_img = (cat.system_rules("eq.rdDym")[0][0] - cat.system_rules("eq.rdDym")[0][1]).subs(subs2)
    check("scalar image solves the special equation", is_zero(reduce_modulo(rdDym_img, uni, s_ctx)))
    pav = cat.system_rules("eq.pavlov")
    pav_u = [(jet("u", "tx"), whole_sub(pav[0][1], "s", jet("u")))]
    pav_res = (pav_u[0][0] - pav_u[0][1]).subs(subs2)
    check("scalar image does not solve the hyper-CR equation",
          not is_zero(reduce_modulo(pav_res, uni, s_ctx)))
    inv_sc = dict(cat.transformation("bt.scalar_inverse"))
    cross_inv = u_ctx.D(inv_sc[jet("s", "t")], "x") - u_ctx.D(inv_sc[jet("s", "x")], "t")
    check("scalar inverse compatible over the special equation",
          is_zero(reduce_modulo(cross_inv, cat.system_rules("eq.rdDym"), u_ctx)))
    check("scalar inverse incompatible over the hyper-CR equation",
          not is_zero(reduce_modulo(cross_inv, pav_u, u_ctx)))

    print(f"\noracle: {len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
