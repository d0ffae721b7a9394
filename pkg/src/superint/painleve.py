"""Ablowitz-Ramani-Segur test for polynomial ODEs with symbolic parameters.

The dependent variable is expanded about a movable point ``z0`` as
``u = sum_k t_k chi^(p+k)`` with ``chi = z - z0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .parsing import parse_expression
from .symcore import (HBAR_SYM, DPoly, base, collect, differentiate, function_deps, param,
                      register_function, symbol_of, to_text)

PASS = "pass"
PASS_CONSTRAINED = "pass-with-constraints"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

GENERIC = "satisfied-generic"
CONSTRAINED = "satisfied-under-constraints"
FAILED = "failed"


class OdeFormatError(ValueError):
    pass


@dataclass
class OdeSpec:
    dep: str
    indep: str
    defining: DPoly
    params: List[str] = field(default_factory=list)
    nonzero: List[str] = field(default_factory=list)
    declared_order: Optional[int] = None

    def __post_init__(self):
        if function_deps(self.dep) is None:
            register_function(self.dep, (self.indep,))

    @property
    def order(self) -> int:
        return max((s.order for s in self.defining.jets(self.dep)), default=0)

    def with_defining(self, p: DPoly) -> "OdeSpec":
        return OdeSpec(self.dep, self.indep, p, list(self.params), list(self.nonzero), None)

    def substitute(self, values: Dict[str, object]) -> "OdeSpec":
        """Fix parameters (e.g. ``hbar = 0``); the assumption list drops them."""
        mapping = {}
        for name, v in values.items():
            s = HBAR_SYM if name == "hbar" else param(name)
            mapping[s] = v
        p = self.defining.subs(mapping)
        keep = [q for q in self.params if q not in values]
        nz = [q for q in self.nonzero if q not in values]
        return OdeSpec(self.dep, self.indep, p, keep, nz)

    def to_text(self) -> str:
        lines = [f"indep {self.indep}", f"dep {self.dep} order {self.order}"]
        if self.params:
            lines.append("param " + " ".join(self.params))
        for n in self.nonzero:
            lines.append(f"assume {n} != 0")
        lines.append(f"eq {to_text(self.defining)} = 0")
        return "\n".join(lines) + "\n"


def parse_ode(text: str) -> OdeSpec:
    """Read the line-oriented ODE format (``indep``, ``dep``, ``param``, ``assume``, ``eq``)."""
    indep, dep, order = None, None, None
    params: List[str] = []
    nonzero: List[str] = []
    eqs: List[DPoly] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "indep":
            indep = rest
        elif head == "dep":
            parts = rest.split()
            if not parts:
                raise OdeFormatError(f"line {lineno}: dep needs a name")
            dep = parts[0]
            if len(parts) == 3 and parts[1] == "order":
                order = int(parts[2])
            if indep is None:
                raise OdeFormatError(f"line {lineno}: declare indep before dep")
            if function_deps(dep) is None:
                register_function(dep, (indep,))
        elif head == "param":
            params += rest.split()
        elif head == "assume":
            bits = rest.replace(" ", "").split("!=")
            if len(bits) != 2 or bits[1] != "0":
                raise OdeFormatError(f"line {lineno}: only 'assume <name> != 0' is supported")
            nonzero.append(bits[0])
        elif head == "eq":
            if "=" not in rest:
                raise OdeFormatError(f"line {lineno}: eq needs '='")
            lhs, rhs = rest.rsplit("=", 1)
            eqs.append(parse_expression(lhs, lineno) - parse_expression(rhs, lineno))
        else:
            raise OdeFormatError(f"line {lineno}: unknown directive {head!r}")
    if indep is None or dep is None or not eqs:
        raise OdeFormatError("ODE file needs indep, dep and eq lines")
    spec = OdeSpec(dep, indep, eqs[0] if len(eqs) == 1 else sum(eqs[1:], eqs[0]), params, nonzero, order)
    if order is not None and spec.order != order:
        raise OdeFormatError(f"declared order {order} but equation has order {spec.order}")
    return spec


def load_ode(path: str) -> OdeSpec:
    with open(path) as fh:
        return parse_ode(fh.read())


# --------------------------------------------------------------------------
# rational polynomial helpers


def _divisors(n: int) -> List[int]:
    n = abs(n)
    out = []
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            out.append(d)
            if d * d != n:
                out.append(n // d)
    return sorted(out)


def _peval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _deflate(coeffs: List[Fraction], root: Fraction) -> List[Fraction]:
    # synthetic division by (x - root); coeffs low -> high
    n = len(coeffs) - 1
    out = [Fraction(0)] * n
    carry = Fraction(0)
    for i in range(n, 0, -1):
        carry = coeffs[i] + carry * root if i < n else coeffs[i]
        out[i - 1] = carry
    return out


def rational_roots(coeffs: Sequence[Fraction]) -> Tuple[List[Fraction], List[Fraction]]:
    """Rational roots with multiplicity, plus the leftover factor (low -> high)."""
    c = [Fraction(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    roots: List[Fraction] = []
    while len(c) > 1 and c[0] == 0:
        roots.append(Fraction(0))
        c = c[1:]
    if len(c) <= 1:
        return roots, c
    found = True
    while found and len(c) > 1:
        found = False
        den = 1
        for v in c:
            den = den * v.denominator // math.gcd(den, v.denominator)
        ints = [int(v * den) for v in c]
        if ints[0] == 0:
            roots.append(Fraction(0))
            c = c[1:]
            found = True
            continue
        for q in _divisors(ints[-1]):
            for pnum in _divisors(ints[0]):
                for s in (1, -1):
                    cand = Fraction(s * pnum, q)
                    if _peval(c, cand) == 0:
                        roots.append(cand)
                        c = _deflate(c, cand)
                        found = True
                        break
                if found:
                    break
            if found:
                break
    return roots, c


def _interpolate(points: Sequence[Tuple[int, Fraction]]) -> List[Fraction]:
    """Coefficients (low -> high) of the polynomial through integer points."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(points):
        if yi == 0:
            continue
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= (xi - xj)
        for k in range(len(basis)):
            coeffs[k] += yi * basis[k] / denom
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _falling(p, k: int):
    acc = 1
    for i in range(k):
        acc = acc * (p - i)
    return acc


def _mono_exponents(p: DPoly) -> Optional[Tuple[Dict[int, int], object]]:
    if len(p.terms) != 1:
        return None
    (m, c), = p.terms.items()
    return dict(m), c


# --------------------------------------------------------------------------
# structure of the equation


@dataclass
class _Term:
    orders: Tuple[int, ...]  # derivative order of each dependent factor (with repetition)
    coeff: DPoly  # function of the independent variable and parameters

    @property
    def degree(self) -> int:
        return len(self.orders)

    @property
    def weight(self) -> int:
        return sum(self.orders)


def _terms(ode: OdeSpec) -> List[_Term]:
    groups: Dict[Tuple[int, ...], Dict] = {}
    for m, c in ode.defining.terms.items():
        orders: List[int] = []
        rest = []
        for s, e in m:
            S = symbol_of(s)
            if S.kind == "jet" and S.name == ode.dep:
                orders += [S.order] * e
            elif S.kind == "jet":
                raise ValueError(f"foreign function {S.text()} in ODE for {ode.dep}")
            else:
                rest.append((s, e))
        key = tuple(sorted(orders))
        groups.setdefault(key, {})[tuple(rest)] = c
    return [_Term(k, DPoly(v)) for k, v in groups.items() if v]


def _at_z0(c: DPoly, indep: str) -> DPoly:
    return c.subs({base(indep): DPoly.from_symbol(param("z0"))})


@dataclass
class Balance:
    p: Fraction
    a0: Optional[DPoly]
    a0_relation: Optional[List[Fraction]] = None  # leftover factor when a0 is not rational
    scale: Optional[DPoly] = None
    dominant: List[Tuple[int, ...]] = field(default_factory=list)
    note: str = ""

    def describe(self) -> dict:
        out = {"p": _frac_text(self.p), "dominant": [list(d) for d in self.dominant]}
        if self.a0 is not None:
            out["a0"] = to_text(self.a0)
        if self.a0_relation is not None:
            out["a0_relation"] = [_frac_text(c) for c in self.a0_relation]
            out["a0_scale"] = to_text(self.scale) if self.scale is not None else "1"
        if self.note:
            out["note"] = self.note
        return out


def _frac_text(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _leading_coeffs(terms: List[_Term], dom: List[_Term], p: Fraction, indep: str) -> Dict[int, DPoly]:
    C: Dict[int, DPoly] = {}
    for t in dom:
        w = Fraction(1)
        for k in t.orders:
            w *= _falling(p, k)
        if w == 0:
            continue
        c = _at_z0(t.coeff, indep).scale(w)
        C[t.degree] = C.get(t.degree, DPoly()) + c
    return {d: c for d, c in C.items() if not c.is_zero()}


def _scaling(C: Dict[int, DPoly]) -> Optional[Tuple[DPoly, Dict[int, Fraction], DPoly]]:
    """Find ``mu`` with ``C_d mu^d = r_d * common`` for rationals ``r_d``."""
    degs = sorted(C)
    monos = {}
    for d in degs:
        e = _mono_exponents(C[d])
        if e is None:
            return None
        monos[d] = e
    d0 = degs[0]
    e0, c0 = monos[d0]
    mu_exp: Dict[int, Fraction] = {}
    syms = set(e0)
    for d in degs[1:]:
        syms |= set(monos[d][0])
    for s in syms:
        val = None
        for d in degs[1:]:
            diff = Fraction(e0.get(s, 0) - monos[d][0].get(s, 0), d - d0)
            if val is None:
                val = diff
            elif val != diff:
                return None
        if val is None:
            val = Fraction(0)
        if val.denominator != 1:
            return None
        if val:
            mu_exp[s] = int(val)
    mu = DPoly._raw({tuple(sorted(mu_exp.items())): Fraction(1)})
    scaled = {d: C[d] * (mu ** d) for d in degs}
    common = DPoly._raw({tuple(sorted(_mono_exponents(scaled[d0])[0].items())): Fraction(1)})
    ratios = {}
    for d in degs:
        e, c = _mono_exponents(scaled[d])
        if e != _mono_exponents(common)[0]:
            return None
        ratios[d] = c
    return mu, ratios, common


def dominant_balances(ode: OdeSpec) -> Tuple[List[Balance], List[str]]:
    """Singular leading behaviours ``u ~ a0 chi^p`` with ``p`` a negative integer."""
    diags: List[str] = []
    if ode.order < 1:
        return [], ["equation has no derivatives of the dependent variable (algebraic)"]
    terms = [t for t in _terms(ode) if t.degree > 0]
    if not terms:
        return [], ["no dependent variable present"]
    cands = set()
    for i, a in enumerate(terms):
        for b in terms[i + 1:]:
            if a.degree != b.degree:
                p = Fraction(a.weight - b.weight, a.degree - b.degree)
                if p < 0:
                    cands.add(p)
    balances: List[Balance] = []
    for p in sorted(cands):
        exps = [t.degree * p - t.weight for t in terms]
        lo = min(exps)
        dom = [t for t, e in zip(terms, exps) if e == lo]
        if len({t.degree for t in dom}) < 2:
            continue
        if p.denominator != 1:
            balances.append(Balance(p, None, dominant=[t.orders for t in dom],
                                    note="non-integer leading exponent"))
            continue
        C = _leading_coeffs(terms, dom, p, ode.indep)
        if len(C) < 2:
            continue
        sc = _scaling(C)
        if sc is None:
            balances.append(Balance(p, None, dominant=[t.orders for t in dom],
                                    note="leading coefficients are not monomials; a0 left symbolic"))
            continue
        mu, ratios, _ = sc
        dmin = min(ratios)
        poly = [Fraction(0)] * (max(ratios) - dmin + 1)
        for d, r in ratios.items():
            poly[d - dmin] = Fraction(r) if not hasattr(r, "re") else None
        if any(v is None for v in poly):
            balances.append(Balance(p, None, dominant=[t.orders for t in dom], note="complex leading coefficients"))
            continue
        roots, rest = rational_roots(poly)
        seen = set()
        for r in roots:
            if r == 0 or r in seen:
                continue
            seen.add(r)
            balances.append(Balance(p, mu.scale(r), dominant=[t.orders for t in dom], scale=mu))
        if len(rest) > 1:
            balances.append(Balance(p, None, rest, mu, [t.orders for t in dom],
                                    note="leading coefficient is an irrational root"))
    if not balances:
        diags.append("no singular dominant balance")
    return balances, diags


# --------------------------------------------------------------------------
# resonances


def _resonance_value(terms: List[_Term], dom: List[Tuple[int, ...]], b: Balance, r: int, indep: str) -> DPoly:
    out = DPoly()
    doms = set(dom)
    for t in terms:
        if t.orders not in doms:
            continue
        c = _at_z0(t.coeff, indep) * (b.a0 ** (t.degree - 1))
        s = Fraction(0)
        for i, k in enumerate(t.orders):
            w = Fraction(_falling(b.p + r, k))
            for j, kk in enumerate(t.orders):
                if j != i:
                    w *= _falling(b.p, kk)
            s += w
        if s:
            out = out + c.scale(s)
    return out


@dataclass
class ResonanceInfo:
    roots: List[Fraction]
    polynomial: List[Fraction]
    normaliser: Optional[DPoly]
    irrational_factor: List[Fraction]
    note: str = ""


def resonances(ode: OdeSpec, b: Balance) -> ResonanceInfo:
    """Roots of the resonance polynomial ``Q(r)`` of a balance with explicit ``a0``."""
    if b.a0 is None:
        return ResonanceInfo([], [], None, [], "symbolic a0")
    terms = _terms(ode)
    n = ode.order
    vals = [(r, _resonance_value(terms, b.dominant, b, r, ode.indep)) for r in range(n + 1)]
    norm = None
    for _, v in vals:
        if not v.is_zero():
            norm = v
            break
    if norm is None:
        return ResonanceInfo([], [], None, [], "resonance polynomial vanishes identically")
    e = _mono_exponents(norm)
    if e is None:
        return ResonanceInfo([], [], None, [], "resonance polynomial has non-monomial coefficients")
    unit = DPoly._raw({tuple(sorted(e[0].items())): Fraction(1)})
    pts = []
    for r, v in vals:
        if v.is_zero():
            pts.append((r, Fraction(0)))
            continue
        me = _mono_exponents(v)
        if me is None or me[0] != e[0] or hasattr(me[1], "re"):
            return ResonanceInfo([], [], None, [], "resonance polynomial is not a rational multiple of one monomial")
        pts.append((r, Fraction(me[1])))
    poly = _interpolate(pts)
    roots, rest = rational_roots(poly)
    return ResonanceInfo(sorted(roots), poly, unit, rest if len(rest) > 1 else [])


# --------------------------------------------------------------------------
# Laurent expansion


class _Series:
    """``chi^lead * sum_{i<=K} c[i] chi^i``."""

    __slots__ = ("lead", "c")

    def __init__(self, lead: int, c: List[DPoly]):
        self.lead = lead
        self.c = c

    def deriv(self) -> "_Series":
        return _Series(self.lead - 1, [v.scale(self.lead + i) if not v.is_zero() else v
                                       for i, v in enumerate(self.c)])

    def mul(self, o: "_Series", K: int) -> "_Series":
        out = [DPoly() for _ in range(K + 1)]
        for i, a in enumerate(self.c[:K + 1]):
            if a.is_zero():
                continue
            for j in range(min(len(o.c), K + 1 - i)):
                b = o.c[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return _Series(self.lead + o.lead, out)


def _taylor(c: DPoly, indep: str, K: int) -> _Series:
    out = []
    cur = c
    fact = 1
    for m in range(K + 1):
        if m:
            fact *= m
        out.append(_at_z0(cur, indep).scale(Fraction(1, fact)) if not cur.is_zero() else DPoly())
        cur = differentiate(cur, indep) if not cur.is_zero() else cur
    return _Series(0, out)


def laurent_coefficient_symbol(k: int) -> DPoly:
    return DPoly.from_symbol(param(f"t{k}"))


def _expand(ode: OdeSpec, b: Balance, K: int) -> List[DPoly]:
    """``E_j`` for ``j = 0..K`` with ``t_1..t_K`` symbolic."""
    p = int(b.p)
    terms = _terms(ode)
    u = _Series(p, [b.a0] + [laurent_coefficient_symbol(k) for k in range(1, K + 1)])
    ders = [u]
    for _ in range(ode.order):
        ders.append(ders[-1].deriv())
    lead = min(t.degree * p - t.weight for t in terms if t.degree > 0)
    out = [DPoly() for _ in range(K + 1)]
    for t in terms:
        tlead = t.degree * p - t.weight
        shift = tlead - lead
        if shift > K:
            continue
        L = K - shift
        s = _taylor(t.coeff, ode.indep, L)
        for k in t.orders:
            s = s.mul(ders[k], L)
        for i in range(L + 1):
            if not s.c[i].is_zero():
                out[i + shift] = out[i + shift] + s.c[i]
    return out


@dataclass
class ResonanceStatus:
    r: int
    status: str
    constraints: List[DPoly] = field(default_factory=list)


def _is_nonzero_for_sure(c: DPoly, nonzero: Sequence[str]) -> bool:
    e = _mono_exponents(c)
    if e is None:
        return False
    allowed = set(nonzero) | {"z0", "hbar"} if "hbar" in nonzero else set(nonzero) | {"z0"}
    return all(symbol_of(s).name in allowed for s in e[0])


def compatibility_check(ode: OdeSpec, b: Balance, res: Sequence[int]) -> Tuple[List[ResonanceStatus], Dict[int, DPoly], List[str]]:
    """Run the Laurent recursion through the largest resonance."""
    positive = sorted(r for r in res if r > 0)
    if not positive:
        return [], {0: b.a0}, []
    K = positive[-1]
    E = _expand(ode, b, K)
    notes = []
    if not E[0].is_zero():
        notes.append("leading equation not satisfied")
    values: Dict[int, DPoly] = {0: b.a0}
    tsyms = {k: param(f"t{k}") for k in range(1, K + 1)}
    statuses: List[ResonanceStatus] = []
    for j in range(1, K + 1):
        sub = {tsyms[k]: v for k, v in values.items() if k >= 1}
        e = E[j].subs(sub) if sub else E[j]
        t = tsyms[j]
        if j in positive:
            if e.degree(t) > 0:
                notes.append(f"t{j} does not drop out at resonance {j}")
            if e.is_zero():
                statuses.append(ResonanceStatus(j, GENERIC))
            else:
                keep = ["z0"] + [f"t{k}" for k in positive if k <= j]
                cons = [c for c in _collect_keep(e, keep)]
                if any(_is_nonzero_for_sure(c, ode.nonzero) for c in cons):
                    statuses.append(ResonanceStatus(j, FAILED, cons))
                else:
                    statuses.append(ResonanceStatus(j, CONSTRAINED, cons))
            continue
        coef = e.coeff(DPoly.from_symbol(t)) if e.degree(t) == 1 else None
        if coef is None or len(coef.terms) != 1:
            notes.append(f"cannot solve for t{j}")
            break
        rest = e - coef * DPoly.from_symbol(t)
        values[j] = (-rest).div_exact(coef)
    return statuses, values, notes


def _collect_keep(e: DPoly, keep: Sequence[str]) -> List[DPoly]:
    targets = [s for s in e.symbols() if s.name in keep and s.kind in ("param", "base")]
    return [c for c in collect(e, targets).values() if not c.is_zero()]


@dataclass
class BranchReport:
    balance: Balance
    resonances: List[Fraction]
    statuses: List[ResonanceStatus]
    verdict: str
    notes: List[str] = field(default_factory=list)

    def integer_resonances(self) -> List[int]:
        return [int(r) for r in self.resonances if r.denominator == 1]

    def to_json(self) -> dict:
        return {
            "balance": self.balance.describe(),
            "resonances": [int(r) if r.denominator == 1 else _frac_text(r) for r in self.resonances],
            "compatibility": [{"r": s.r, "status": s.status,
                               "constraints": [to_text(c) for c in s.constraints]} for s in self.statuses],
            "verdict": self.verdict,
            "notes": self.notes,
        }


@dataclass
class PainleveReport:
    ode: OdeSpec
    branches: List[BranchReport]
    verdict: str
    diagnostics: List[str] = field(default_factory=list)

    def passing_resonance_sets(self) -> List[List[int]]:
        return [sorted(b.integer_resonances()) for b in self.branches if b.verdict in (PASS, PASS_CONSTRAINED)]

    def to_json(self) -> dict:
        return {"dep": self.ode.dep, "indep": self.ode.indep, "order": self.ode.order,
                "equation": to_text(self.ode.defining), "assumptions": [f"{n} != 0" for n in self.ode.nonzero],
                "branches": [b.to_json() for b in self.branches], "verdict": self.verdict,
                "diagnostics": self.diagnostics}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _branch(ode: OdeSpec, b: Balance) -> BranchReport:
    if b.a0 is None:
        return BranchReport(b, [], [], INCONCLUSIVE, [b.note])
    info = resonances(ode, b)
    if info.note:
        return BranchReport(b, [], [], INCONCLUSIVE, [info.note])
    roots = info.roots
    notes = []
    if info.irrational_factor:
        return BranchReport(b, roots, [], FAIL, ["resonance polynomial has irrational roots"])
    if any(r.denominator != 1 for r in roots):
        return BranchReport(b, roots, [], FAIL, ["non-integer resonance"])
    if Fraction(-1) not in roots:
        return BranchReport(b, roots, [], FAIL, ["-1 is not a resonance"])
    if len(set(roots)) != len(roots):
        return BranchReport(b, roots, [], FAIL, ["repeated resonance"])
    statuses, _, notes = compatibility_check(ode, b, [int(r) for r in roots])
    if notes:
        return BranchReport(b, roots, statuses, INCONCLUSIVE, notes)
    if any(s.status == FAILED for s in statuses):
        verdict = FAIL
    elif any(s.status == CONSTRAINED for s in statuses):
        verdict = PASS_CONSTRAINED
    else:
        verdict = PASS
    return BranchReport(b, roots, statuses, verdict, notes)


def _recentre(ode: OdeSpec) -> Tuple[OdeSpec, Fraction]:
    """Translate ``z`` so a coefficient ``L (z + beta)^m`` of the top derivative becomes ``L z^m``.

    The expansion point is generic, so a translation changes nothing in the
    test while keeping the Laurent pivots monomial.
    """
    top = [s for s in ode.defining.jets(ode.dep) if s.order == ode.order]
    if len(top) != 1:
        return ode, Fraction(0)
    c = ode.defining.coeff(DPoly.from_symbol(top[0]))
    if c.jets():
        return ode, Fraction(0)
    zs = base(ode.indep)
    parts = {}
    for k, v in collect(c, [zs]).items():
        parts[k.degree(zs)] = v
    m = max(parts)
    if m == 0 or len(parts) == 1:
        return ode, Fraction(0)
    lead = parts[m]
    if len(lead.terms) != 1 or m - 1 not in parts:
        return ode, Fraction(0)
    ratio = parts[m - 1].div_exact(lead)
    if not ratio.is_constant():
        return ode, Fraction(0)
    val = ratio.constant_value()
    if hasattr(val, "re"):
        return ode, Fraction(0)
    beta = Fraction(val) / m
    z = DPoly.from_symbol(zs)
    if c != lead * (z + DPoly.constant(beta)) ** m:
        return ode, Fraction(0)
    moved = ode.defining.subs({zs: z - DPoly.constant(beta)})
    out = OdeSpec(ode.dep, ode.indep, moved, list(ode.params), list(ode.nonzero))
    return out, beta


def painleve_test(ode: OdeSpec) -> PainleveReport:
    original = ode
    ode, beta = _recentre(ode)
    balances, diags = dominant_balances(ode)
    if beta:
        diags = [f"independent variable translated by {_frac_text(-beta)}"] + diags
    if not balances:
        verdict = FAIL if ode.order < 1 else INCONCLUSIVE
        return PainleveReport(original, [], verdict, diags)
    branches = [_branch(ode, b) for b in balances]
    vs = [b.verdict for b in branches]
    if FAIL in vs:
        verdict = FAIL
    elif INCONCLUSIVE in vs:
        verdict = INCONCLUSIVE
    elif PASS_CONSTRAINED in vs:
        verdict = PASS_CONSTRAINED
    else:
        verdict = PASS
    return PainleveReport(original, branches, verdict, diags)
