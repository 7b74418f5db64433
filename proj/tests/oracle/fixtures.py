"""Reads the catalog fixture files into sympy expressions.

A second, independent reading of the same data the C++ engine consumes, so
the oracle checks both the mathematics and the fixtures themselves.
"""

import pathlib
import re

import sympy as sp

from jetcalc import COORDS, Ctx, jet

_D_CALL = re.compile(r"D\[([^\[\]]+)\]")


def _canonical_jets(expr):
    """rename jet symbols to the canonical t,y,x suffix order"""
    repl = {}
    for s in expr.free_symbols:
        if "_" in s.name:
            field, suffix = s.name.split("_", 1)
            if set(suffix) <= set("txy"):
                repl[s] = jet(field, suffix)
    return expr.subs(repl)


def parse_expr(text, base_fields):
    """fixture grammar -> sympy (handles ^ powers and D[expr, coords])"""
    ctx = Ctx(base_fields)
    while True:
        m = _D_CALL.search(text)
        if not m:
            break
        parts = m.group(1).split(",")
        inner = parse_expr(parts[0], base_fields)
        for c in parts[1:]:
            inner = ctx.D(inner, c.strip())
        text = text[: m.start()] + "(" + sp.srepr(inner) + ")" + text[m.end():]
    text = text.replace("^", "**")
    # 'lambda' is a python keyword; route it around sympify
    text = re.sub(r"\blambda\b", "lambda0", text)
    expr = sp.sympify(text, evaluate=True)
    expr = expr.subs(sp.Symbol("lambda0"), sp.Symbol("lambda"))
    return _canonical_jets(expr)


class Entry:
    def __init__(self):
        self.id = None
        self.headers = {}
        self.fields = {}  # name -> kind
        self.section = None
        self.covering_args = []
        self.payload = []  # (lhs, rhs) strings


def read_fixture(path):
    e = Entry()
    in_payload = False
    for raw in pathlib.Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not in_payload:
            words = line.split()
            if words[0] == "field":
                e.fields[words[1]] = words[2]
            elif words[0] == "param":
                e.fields[words[1]] = "param"
            elif words[0] in ("system", "reduction", "transformation"):
                e.section = words[0]
                in_payload = True
            elif words[0] == "covering":
                e.section = "covering"
                e.covering_args = words[1:]
                in_payload = True
            else:
                e.headers[words[0]] = line.split(None, 1)[1]
        else:
            sep = "->" if ("map" in line.split(" ", 1)[0]) else "="
            lhs, rhs = line.split(sep, 1)
            e.payload.append((lhs.strip(), rhs.strip()))
    e.id = e.headers["id"]
    return e


class OracleCatalog:
    def __init__(self, catalog_dir):
        self.entries = {}
        for path in sorted(pathlib.Path(catalog_dir).rglob("*.sys")):
            e = read_fixture(path)
            self.entries[e.id] = e
        # one shared universe of base fields and parameters
        self.base = set()
        self.params = set()
        for e in self.entries.values():
            for name, kind in e.fields.items():
                if kind == "base":
                    self.base.add(name)
                elif kind == "param":
                    self.params.add(name)

    def expr(self, entry, text):
        bases = {n for n, k in entry.fields.items() if k in ("base", "fiber")}
        return parse_expr(text, bases | self.base)

    def system_rules(self, entry_id):
        e = self.entries[entry_id]
        assert e.section == "system", entry_id
        rules = []
        for lhs, rhs in e.payload:
            rules.append((parse_expr(lhs, self.base), self.expr(e, rhs)))
        return rules

    def covering(self, entry_id):
        """returns (fiber, eq_t, eq_y, param_or_None)"""
        e = self.entries[entry_id]
        assert e.section == "covering", entry_id
        fiber = e.covering_args[0]
        param = e.covering_args[1] if len(e.covering_args) > 1 else None
        eqs = dict(e.payload)
        return fiber, self.expr(e, eqs[fiber + "_t"]), self.expr(e, eqs[fiber + "_y"]), param

    def transformation(self, entry_id):
        e = self.entries[entry_id]
        assert e.section == "transformation", entry_id
        return [(parse_expr(lhs, self.base), self.expr(e, rhs)) for lhs, rhs in e.payload]

    def ctx_for_covering(self, entry_id):
        fiber, eq_t, eq_y, param = self.covering(entry_id)
        params = self.params | ({param} if param else set())
        return Ctx(self.base, params, {fiber: (eq_t, eq_y)}), fiber, eq_t, eq_y
