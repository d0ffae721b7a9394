"""Independent Laurent-recursion oracle built directly on sympy.

Only used by the tests to cross-check :mod:`superint.painleve`.
"""

import re

import sympy as sp


def _to_sympy(expr: str, dep: str):
    # U^(4) -> D4, U''' -> D3 ...
    expr = re.sub(rf"\b{dep}\^\((\d+)\)", r"D\1", expr)
    expr = re.sub(rf"\b{dep}('+)", lambda m: f"D{len(m.group(1))}", expr)
    expr = re.sub(rf"\b{dep}\b", "D0", expr)
    expr = re.sub(r"\blambda\b", "lam_", expr)
    return sp.sympify(expr.replace("^", "**"), locals={"lam_": sp.Symbol("lambda"), "Lambda": sp.Symbol("Lambda")})


def laurent_conditions(text: str, p: int, a0, K: int):
    """Return ``{r: condition}`` for each ``r <= K`` where ``t_r`` drops out."""
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    dep = next(ln.split()[1] for ln in lines if ln.startswith("dep "))
    eq = next(ln[3:] for ln in lines if ln.startswith("eq "))
    lhs, rhs = eq.rsplit("=", 1)
    E = _to_sympy(lhs, dep) - _to_sympy(rhs, dep)
    z, z0, chi = sp.symbols("z z0 chi")
    t = sp.symbols(f"t0:{K + 1}")
    u = sum(t[k] * chi ** (p + k) for k in range(K + 1))
    order = max(int(s.name[1:]) for s in E.free_symbols if re.fullmatch(r"D\d+", s.name))
    subs = {sp.Symbol(f"D{n}"): sp.diff(u, chi, n) for n in range(order + 1)}
    subs[z] = z0 + chi
    S = sp.expand(E.subs(subs))
    lead = min(sp.Poly(sp.expand(S * chi ** 200), chi).monoms()[-1][0] - 200, 0)
    S = sp.expand(S * chi ** (-lead))
    sol = {t[0]: sp.sympify(a0)}
    out = {}
    for j in range(1, K + 1):
        c = sp.expand(S.coeff(chi, j).subs(sol))
        if c.coeff(t[j]) == 0:
            out[j] = sp.factor(c)
            continue
        sol[t[j]] = sp.solve(c, t[j])[0]
    return out
