"""Minimal jet-space total-derivative calculus on sympy symbols.

This is the independent oracle used to cross-check the C++ engine: a second,
deliberately small implementation of total derivatives, covering rewrites,
and reduction modulo oriented systems, with sympy doing all simplification.
Jets are sympy Symbols named like 'u_tyx' (suffix in the canonical t, y, x
order).
"""

import sympy as sp

COORDS = ("t", "y", "x")


def jet(field, idx=""):
    counts = {c: idx.count(c) for c in COORDS}
    suffix = "".join(c * counts[c] for c in COORDS)
    return sp.Symbol(field + ("_" + suffix if suffix else ""))


def split(sym):
    name = sym.name
    if "_" in name:
        field, suffix = name.split("_", 1)
        return field, suffix
    return name, ""


class Ctx:
    """base: field names whose jets are free; params: constants;
    coverings: {fiber: (eq_t, eq_y)} with equations over base jets and the
    fiber's pure x-jets."""

    def __init__(self, base, params=(), coverings=None):
        self.base = set(base)
        self.params = set(params)
        self.coverings = coverings or {}

    def D(self, expr, c):
        expr = sp.sympify(expr)
        out = 0
        for s in expr.free_symbols:
            ds = self._dsym(s, c)
            if ds != 0:
                out += sp.diff(expr, s) * ds
        return sp.expand(out)

    def _dsym(self, s, c):
        field, suffix = split(s)
        if field in self.params:
            return 0
        if s.name in COORDS:
            return 1 if s.name == c else 0
        if field in self.base:
            return jet(field, suffix + c)
        if field in self.coverings:
            assert set(suffix) <= {"x"}, (s, c)
            if c == "x":
                return jet(field, suffix + "x")
            eq_t, eq_y = self.coverings[field]
            value = eq_t if c == "t" else eq_y
            for _ in suffix:
                value = self.D(value, "x")
            return value
        raise KeyError(f"unknown field {field}")


def reduce_modulo(expr, rules, ctx, max_passes=64):
    """rules: [(lead_symbol, rhs)]; rewrites leads and prolonged leads."""
    expr = sp.together(sp.expand(expr))
    for _ in range(max_passes):
        num, _ = sp.fraction(sp.cancel(expr))
        target = None
        for s in sp.expand(num).free_symbols:
            field, suffix = split(s)
            for lead, rhs in rules:
                lf, ls = split(lead)
                if field != lf:
                    continue
                extra = _multi_minus(suffix, ls)
                if extra is None:
                    continue
                target = (s, rhs, extra)
                break
            if target:
                break
        if not target:
            return sp.cancel(expr)
        s, rhs, extra = target
        value = rhs
        for c in extra:
            value = ctx.D(value, c)
        expr = sp.cancel(expr.subs(s, value))
    raise RuntimeError("reduction cap exceeded")


def _multi_minus(suffix, lead_suffix):
    counts = {c: suffix.count(c) - lead_suffix.count(c) for c in COORDS}
    if any(v < 0 for v in counts.values()):
        return None
    return "".join(c * counts[c] for c in COORDS)


def is_zero(expr):
    return sp.simplify(sp.cancel(sp.together(sp.expand(expr)))) == 0


def covering_residual(ctx, eq_t, eq_y):
    return sp.cancel(ctx.D(eq_t, "y") - ctx.D(eq_y, "t"))
