"""Compatibility analysis of the determining equations.

Each level ``l`` of the determining system is a chain

    dy f_0 = G_0,   dx f_{j-1} + dy f_j = G_j,   dx f_{n-1} = G_n

whose integrability condition is ``sum_j (-1)^j dx^(n-j) dy^j G_j = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .deteq import IntegralAnsatz, _Builder, f_j0, level_count, unknown_f
from .symcore import (DPoly, HBAR, OdeRelation, Symbol, base, collect, differentiate, integrate_by_parts, jet,
                      param, reduce_mod_ode, sym, symbol_of, to_text, var)


class ChainError(ValueError):
    """Malformed chain or a quadrature that cannot be completed."""

    def __init__(self, message: str, term: Optional[DPoly] = None):
        self.term = term
        if term is not None:
            message = f"{message}: {to_text(term)}"
        super().__init__(message)


@dataclass
class ChainSystem:
    G: List[DPoly]
    unknowns: List[str] = field(default_factory=list)
    level: Optional[int] = None

    @property
    def n(self) -> int:
        return len(self.G) - 1

    def lhs(self, f: Sequence[DPoly]) -> List[DPoly]:
        """Left-hand sides evaluated on candidate ``f_0..f_{n-1}``."""
        n = self.n
        out = []
        for j in range(n + 1):
            e = DPoly()
            if j >= 1:
                e = e + differentiate(f[j - 1], "x")
            if j <= n - 1:
                e = e + differentiate(f[j], "y")
            out.append(e)
        return out

    def residuals(self, f: Sequence[DPoly]) -> List[DPoly]:
        return [l - g for l, g in zip(self.lhs(f), self.G)]


def chain_from_f(f: Sequence[DPoly]) -> ChainSystem:
    """Chain whose right-hand sides are produced by the given ``f``."""
    c = ChainSystem([DPoly()] * (len(f) + 1))
    return ChainSystem(c.lhs(f))


def _mixed(p: DPoly, a: int, b: int) -> DPoly:
    if a:
        p = differentiate(p, "x", a)
    if b:
        p = differentiate(p, "y", b)
    return p


def chain_eliminate(c: ChainSystem) -> DPoly:
    """``sum_{j=0}^{n} (-1)^j dx^(n-j) dy^j G_j``; rejects chains still carrying unknowns."""
    n = c.n
    if n < 0:
        raise ChainError("empty chain")
    names = set(c.unknowns)
    if names:
        for g in c.G:
            left = [s for s in g.jets() if s.name in names]
            if left:
                raise ChainError(f"unknown {left[0].text()} survives elimination")
    out = DPoly()
    for j, g in enumerate(c.G):
        if g.is_zero():
            continue
        t = _mixed(g, n - j, j)
        out = out - t if j % 2 else out + t
    return out


def level_chain(ansatz: IntegralAnsatz, l: int, potential=None) -> ChainSystem:
    """Chain of level ``l``: ``G_j = -(1/2) M_{j,2l}`` with the level's own f's set to zero."""
    N = ansatz.N
    n = N - 2 * l + 1
    if n < 0:
        raise ValueError(f"level {l} is empty for N={N}")
    zeroed = ansatz.with_f({(j, 2 * l): DPoly() for j in range(n)})
    b = _Builder(zeroed, potential)
    G = [b.M(j, l).scale(Fraction(-1, 2)) for j in range(n + 1)]
    return ChainSystem(G, [f"f_{j}_{2 * l}" for j in range(n)], l)


# --------------------------------------------------------------------------
# LCC and classification


def powers_of(p: DPoly, v: str) -> Dict[int, DPoly]:
    """Split ``p`` by the exponent of base variable ``v``."""
    vid = sym(base(v))
    parts: Dict[int, dict] = {}
    for m, c in p.terms.items():
        e = 0
        rest = []
        for s, k in m:
            if s == vid:
                e = k
            else:
                rest.append((s, k))
        parts.setdefault(e, {})[tuple(rest)] = c
    return {e: DPoly(t) for e, t in parts.items()}


@dataclass
class LCCResult:
    full: DPoly
    tau1: DPoly
    ups1: DPoly
    tau2: DPoly
    ups2: DPoly
    extra: List[DPoly] = field(default_factory=list)

    def components(self) -> Dict[str, DPoly]:
        return {"tau1": self.tau1, "ups1": self.ups1, "tau2": self.tau2, "ups2": self.ups2}


def lcc(ansatz: IntegralAnsatz) -> LCCResult:
    """Linear compatibility condition and its four one-variable components."""
    full = chain_eliminate(level_chain(ansatz, 1))
    px = powers_of(differentiate(full, "x", 2), "y")
    py = powers_of(differentiate(full, "y", 2), "x")
    extra = [v for k, v in px.items() if k not in (0, 1)] + [v for k, v in py.items() if k not in (0, 1)]
    return LCCResult(full, px.get(0, DPoly()), px.get(1, DPoly()), py.get(0, DPoly()), py.get(1, DPoly()),
                     extra)


DOUBLY = "doubly-exotic"
SINGLY_X = "singly-exotic-x"
SINGLY_Y = "singly-exotic-y"
STANDARD = "standard"


@dataclass
class ExoticClass:
    name: str
    witness: LCCResult

    def __str__(self):
        return self.name


def classify(ansatz: IntegralAnsatz, result: Optional[LCCResult] = None) -> ExoticClass:
    r = result or lcc(ansatz)
    x_trivial = r.tau1.is_zero() and r.ups1.is_zero()
    y_trivial = r.tau2.is_zero() and r.ups2.is_zero()
    if x_trivial and y_trivial:
        name = DOUBLY
    elif x_trivial:
        name = SINGLY_X
    elif y_trivial:
        name = SINGLY_Y
    else:
        name = STANDARD
    return ExoticClass(name, r)


def family_ansatz(N: int, family: str) -> IntegralAnsatz:
    """Leading terms ``cgamma p1^N + sgamma p2^N`` (I) or ``1/2 {L_z^(N-4), p1^2 p2^2}`` (II)."""
    family = family.upper()
    if family == "I":
        if N % 2 == 0 or N < 3:
            raise ValueError("family I needs odd N >= 3")
        return IntegralAnsatz(N, {(0, N, 0): DPoly.from_symbol(param("cgamma")),
                                  (0, 0, N): DPoly.from_symbol(param("sgamma"))})
    if family == "II":
        if N < 5:
            raise ValueError("family II needs N >= 5")
        return IntegralAnsatz(N, {(N - 4, 2, 2): Fraction(1)})
    raise ValueError(f"unknown family {family!r}")


# --------------------------------------------------------------------------
# trivial integrals


def de_leading_indices(N: int) -> List[Tuple[int, int, int]]:
    """Index set of the leading part allowed for doubly exotic potentials.

    Pure ``p1^N`` and ``p2^N`` plus every term carrying at least ``p1^2 p2^2``;
    this is ``4(N-1)`` fewer than the generic count.
    """
    out = {(0, N, 0), (0, 0, N)}
    for m in range(2, N + 1):
        for n in range(2, N + 1 - m):
            out.add((N - m - n, m, n))
    return sorted(out)


def doubly_exotic_a_map(N: int):
    """Symbolic ``A`` restricted to :func:`de_leading_indices`."""
    from .deteq import a_symbol
    return {k: a_symbol(*k) for k in de_leading_indices(N)}


@dataclass
class TrivialReduction:
    N: int
    A: Dict[Tuple[int, int, int], object]
    removed: List[Tuple[int, int, int]]
    syzygies: Dict[Tuple[int, int, int], Tuple[Tuple[int, int], Tuple[int, int]]]

    def is_empty(self) -> bool:
        return not self.A

    def ansatz(self) -> IntegralAnsatz:
        return IntegralAnsatz(self.N, dict(self.A))


def _syzygy(m: int, n: int) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    # (p1^m p2^n)^2 as a product of two even-even monomials, peeling off the
    # pure power of the dominant momentum when there is one
    N = m + n
    if m > n:
        return (N, 0), (2 * m - N, 2 * n)
    if m < n:
        return (0, N), (2 * m, 2 * n - N)
    return (m + 1, n - 1), (m - 1, n + 1)


def reduce_trivial(A, N: Optional[int] = None) -> TrivialReduction:
    """Drop leading terms that only produce trivial integrals.

    For even ``N`` every pure-momentum term goes: even-even monomials are
    polynomials in ``H`` and ``X``; odd-odd ones square to products of those.
    Odd ``N`` is returned unchanged.
    """
    if isinstance(A, IntegralAnsatz):
        N, A = A.N, A.A
    if N is None:
        raise ValueError("order required")
    kept = dict(A)
    removed, syz = [], {}
    if N % 2 == 0:
        for (a, m, n) in sorted(A):
            if a != 0:
                continue
            removed.append((a, m, n))
            del kept[(a, m, n)]
            if m % 2 == 1:
                syz[(a, m, n)] = _syzygy(m, n)
    return TrivialReduction(N, kept, removed, syz)


# --------------------------------------------------------------------------
# quadrature


@dataclass
class ChainSolution:
    f: List[DPoly]
    conditions: List[DPoly]
    constants: List[str]


def _split_by_dependence(p: DPoly) -> Tuple[DPoly, DPoly, DPoly]:
    xs, ys, poly = {}, {}, {}
    for m, c in p.terms.items():
        deps = set()
        for s, _ in m:
            S = symbol_of(s)
            if S.kind == "jet":
                deps.update(S.deps)
        if not deps:
            poly[m] = c
        elif deps == {"x"}:
            xs[m] = c
        elif deps == {"y"}:
            ys[m] = c
        else:
            raise ChainError("right-hand side mixes x- and y-functions", DPoly({m: c}))
    return DPoly(xs), DPoly(ys), DPoly(poly)


def _integrate(p: DPoly, v: str, times: int = 1) -> DPoly:
    for _ in range(times):
        p, r = integrate_by_parts(p, v, fresh=True)
        if not r.is_zero():
            raise ChainError(f"no antiderivative in {v}", r)
    return p


def _sweep(G: List[DPoly], a: str, b: str) -> Tuple[List[DPoly], List[DPoly]]:
    """Solve ``db f_{j-1} + da f_j = G_j`` when every G is polynomial in ``a``.

    Integrates along ``a`` from ``f_0`` upward; the functions of ``b`` left
    free at each step are fixed by the last equation, power by power in ``a``.
    """
    n = len(G) - 1
    if n == 0:
        return [], ([G[0]] if not G[0].is_zero() else [])
    K: List[DPoly] = []
    for j in range(n):
        rhs = G[j] if j == 0 else G[j] - differentiate(K[-1], b)
        K.append(_integrate(rhs, a))
    R = G[n] - differentiate(K[-1], b)
    parts = powers_of(R, a)
    conditions = [parts[m] for m in sorted(parts) if (m >= n or m < 0) and not parts[m].is_zero()]
    c: List[DPoly] = [DPoly()] * n
    for m in range(n):
        t = parts.get(m)
        if t is None or t.is_zero():
            continue
        c[n - 1 - m] = _integrate(t.scale((-1) ** m * math.factorial(m)), b, m + 1)
    av = var(a)
    f = []
    for j in range(n):
        acc = K[j]
        for k in range(j + 1):
            if c[k].is_zero():
                continue
            d = j - k
            term = differentiate(c[k], b, d) * (av ** d) if d else c[k]
            acc = acc + term.scale(Fraction((-1) ** d, math.factorial(d)))
        f.append(acc)
    return f, conditions


def homogeneous_solution(n: int, prefix: str = "k", start: int = 1) -> Tuple[List[DPoly], List[str]]:
    """General polynomial solution of the chain with zero right-hand sides."""
    M = n - 1
    if M < 0:
        return [], []
    names, A = [], {}
    idx = start
    for m in range(M + 1):
        for nn in range(M + 1 - m):
            name = f"{prefix}{idx}"
            idx += 1
            names.append(name)
            A[(M - m - nn, m, nn)] = DPoly.from_symbol(param(name))
    return f_j0(M, A), names


def solve_chain(c: ChainSystem, homogeneous: bool = True, prefix: str = "k") -> ChainSolution:
    """Quadrature of a chain whose right-hand sides are linear in x- or y-functions.

    The x-function part is integrated along y from ``f_0``; the y-function part
    along x from ``f_{n-1}``; the polynomial part either way.  Leftover
    coefficients of the closing equation are returned as conditions.
    """
    n = c.n
    gx, gy, gp = [], [], []
    for g in c.G:
        a, b, p = _split_by_dependence(g)
        gx.append(a)
        gy.append(b)
        gp.append(p)
    fx, cx = _sweep(gx, "y", "x")
    fy_r, cy = _sweep(list(reversed(gy)), "x", "y")
    fy = list(reversed(fy_r))
    fp, cp = _sweep(gp, "y", "x")
    f = [fx[j] + fy[j] + fp[j] for j in range(n)]
    consts: List[str] = []
    if homogeneous and n > 0:
        h, consts = homogeneous_solution(n, prefix)
        f = [f[j] + h[j] for j in range(n)]
    return ChainSolution(f, cx + cy + cp, consts)


# --------------------------------------------------------------------------
# nonlinear compatibility


def antiderivative_form(p: DPoly, names: Dict[str, str]) -> DPoly:
    """Rewrite ``V^(k)`` as ``hbar^2 F^(k+1)`` for each ``V -> F`` in ``names``."""
    h2 = HBAR ** 2
    out = DPoly()
    cache: Dict[int, DPoly] = {}
    for m, c in p.terms.items():
        term = DPoly.constant(c)
        for s, e in m:
            S = symbol_of(s)
            if S.kind == "jet" and S.name in names:
                if s not in cache:
                    cache[s] = h2 * DPoly.from_symbol(jet(names[S.name], S.order + 1))
                term = term * cache[s] ** e
            else:
                term = term * DPoly._raw({((s, e),): 1})
        out = out + term
    return out


@dataclass
class NLCCResult:
    N: int
    level: int
    full: DPoly
    f_solutions: Dict[Tuple[int, int], DPoly]
    constants: List[str]
    x_part: DPoly
    y_part: DPoly
    mixed: DPoly


def nlcc(ansatz: IntegralAnsatz, level: int = 2, substitute: Optional[Dict[str, str]] = None,
         homogeneous: bool = True) -> NLCCResult:
    """Potential-only condition from level ``level`` after solving the lower levels."""
    if level < 2:
        raise ValueError("nlcc needs level >= 2")
    fsol: Dict[Tuple[int, int], DPoly] = {}
    consts: List[str] = []
    cur = ansatz
    for l in range(1, level):
        ch = level_chain(cur, l)
        sol = solve_chain(ch, homogeneous, prefix="k" if l == 1 else f"r{l}")
        bad = [cnd for cnd in sol.conditions if not cnd.is_zero()]
        if bad:
            raise ChainError(f"level {l} is not identically compatible", bad[0])
        consts += sol.constants
        new = {(j, 2 * l): sol.f[j] for j in range(ch.n)}
        fsol.update(new)
        cur = cur.with_f(new)
    E = chain_eliminate(level_chain(cur, level))
    if substitute:
        E = antiderivative_form(E, substitute)
        fsol = {k: antiderivative_form(v, substitute) for k, v in fsol.items()}
    xs, ys, poly = _split_parts(E)
    return NLCCResult(ansatz.N, level, E, fsol, consts, xs, ys, poly)


def _split_parts(p: DPoly) -> Tuple[DPoly, DPoly, DPoly]:
    xs, ys, rest = {}, {}, {}
    for m, c in p.terms.items():
        deps = set()
        for s, _ in m:
            S = symbol_of(s)
            if S.kind == "jet":
                deps.update(S.deps)
        if deps == {"x"}:
            xs[m] = c
        elif deps == {"y"}:
            ys[m] = c
        else:
            rest[m] = c
    return DPoly(xs), DPoly(ys), DPoly(rest)


# --------------------------------------------------------------------------
# separation of the nonlinear condition and matching against a reference ODE


def jet_degree(m) -> int:
    return sum(e for s, e in m if symbol_of(s).kind == "jet")


def is_linear_in_jets(p: DPoly) -> bool:
    return all(jet_degree(m) <= 1 for m in p.terms)


def equations_from(p: DPoly, keep: Iterable[str] = ("x", "y", "z")) -> List[DPoly]:
    """Coefficients of ``p`` with respect to all jets and the given base variables."""
    keep = set(keep)
    targets = [s for s in p.symbols() if s.kind == "jet" or (s.kind == "base" and s.name in keep)]
    return [c for c in collect(p, targets).values() if not c.is_zero()]


@dataclass
class SolveResult:
    values: Dict[str, DPoly]
    free: List[str]
    unsolved: List[DPoly]

    @property
    def consistent(self) -> bool:
        return not self.unsolved


def _solvable_for(e: DPoly, u: Symbol, others: set) -> Optional[DPoly]:
    if e.degree(u) != 1:
        return None
    c = e.coeff(DPoly.from_symbol(u))
    if len(c.terms) != 1 or c.symbols() & others:
        return None
    return (-(e - c * DPoly.from_symbol(u))).div_exact(c)


def solve_sequential(eqs: Sequence[DPoly], unknowns: Sequence[str],
                     prefer: Sequence[str] = ()) -> SolveResult:
    """Solve equations one unknown at a time.

    An equation is usable once it contains a single remaining unknown, to the
    first power, with a monomial coefficient.  Products of unknowns become
    usable as their factors get fixed.  When that stalls, an equation linear
    in one of the ``prefer`` unknowns is solved for it.
    """
    syms = {u: param(u) for u in unknowns}
    values: Dict[str, DPoly] = {}
    pending = [e for e in eqs if not e.is_zero()]

    def assign(u, sol):
        nonlocal values
        values = {k: v.subs({syms[u]: sol}) for k, v in values.items()}
        values[u] = sol

    while pending:
        progress = False
        rest = []
        for e in pending:
            if values:
                e = e.subs({syms[u]: v for u, v in values.items()})
            if e.is_zero():
                continue
            present = [u for u in unknowns if u not in values and syms[u] in e.symbols()]
            if len(present) == 1:
                sol = _solvable_for(e, syms[present[0]], set())
                if sol is not None:
                    assign(present[0], sol)
                    progress = True
                    continue
            rest.append(e)
        pending = rest
        if progress or not pending:
            continue
        # smallest available pivot among the preferred unknowns
        best = None
        for i, e in enumerate(pending):
            present = [u for u in unknowns if u not in values and syms[u] in e.symbols()]
            for u in prefer:
                if u not in present:
                    continue
                sol = _solvable_for(e, syms[u], {syms[o] for o in present if o != u})
                if sol is not None and (best is None or len(sol.terms) < len(best[2].terms)):
                    best = (i, u, sol)
        if best is None:
            break
        assign(best[1], best[2])
        del pending[best[0]]
        progress = True
    unsolved = []
    for e in pending:
        e = e.subs({syms[u]: v for u, v in values.items()}) if values else e
        if not e.is_zero():
            unsolved.append(e)
    free = [u for u in unknowns if u not in values]
    return SolveResult(values, free, unsolved)


def rename_functions(p: DPoly, names: Dict[str, str], variables: Dict[str, str]) -> DPoly:
    """Rename function jets and base variables, e.g. ``F(z) -> F1(x)``."""
    mapping = {}
    for s in p.symbols():
        if s.kind == "jet" and s.name in names:
            deps = tuple(variables.get(d, d) for d in s.deps)
            mapping[s] = DPoly.from_symbol(jet(names[s.name], s.index, deps))
        elif s.kind == "base" and s.name in variables:
            mapping[s] = var(variables[s.name])
    return p.subs(mapping) if mapping else p


@dataclass
class Separation:
    constraints: Dict[str, DPoly]
    x_odes: List[DPoly]
    y_odes: List[DPoly]
    x_linear: List[DPoly]
    y_linear: List[DPoly]
    separation_constants: List[str]
    inconsistent: List[DPoly]


def separate(res: NLCCResult, prefix: str = "e") -> Separation:
    """Split ``sum y^k X_k(x) + sum x^i Y_i(y) = 0`` into one-variable conditions.

    The two sides must equal a common polynomial ``sum e_{k,i} x^i y^k``.
    Conditions linear in the potential are forced to be trivial by fixing the
    free constants; the nonlinear ones are returned as ODEs.
    """
    if not res.mixed.is_zero():
        raise ChainError("condition does not separate", res.mixed)
    X = powers_of(res.x_part, "y")
    Y = powers_of(res.y_part, "x")
    dk = max(list(X) + [0])
    di = max(list(Y) + [0])
    names, phi = [], {}
    idx = 1
    for k in range(dk + 1):
        for i in range(di + 1):
            nm = f"{prefix}{idx}"
            idx += 1
            names.append(nm)
            phi[(k, i)] = DPoly.from_symbol(param(nm))
    x, y = var("x"), var("y")
    xc = {k: X.get(k, DPoly()) - sum((phi[(k, i)] * x ** i for i in range(di + 1)), DPoly())
          for k in range(dk + 1)}
    yc = {i: Y.get(i, DPoly()) + sum((phi[(k, i)] * y ** k for k in range(dk + 1)), DPoly())
          for i in range(di + 1)}
    lin_eqs = []
    for p in list(xc.values()) + list(yc.values()):
        if is_linear_in_jets(p):
            lin_eqs += equations_from(p)
    unknowns = list(res.constants) + names
    sol = solve_sequential(lin_eqs, unknowns, names)
    subs = {param(u): v for u, v in sol.values.items()}

    def fix(p):
        return p.subs(subs) if subs else p

    x_odes, y_odes, x_lin, y_lin = [], [], [], []
    for p in xc.values():
        q = fix(p)
        if q.is_zero():
            continue
        (x_lin if is_linear_in_jets(q) else x_odes).append(q)
    for p in yc.values():
        q = fix(p)
        if q.is_zero():
            continue
        (y_lin if is_linear_in_jets(q) else y_odes).append(q)
    return Separation(sol.values, x_odes, y_odes, x_lin, y_lin, names, sol.unsolved)


@dataclass
class OdeMatch:
    matches: bool
    mapping: Dict[str, DPoly]
    free: List[str]
    leftover: List[DPoly]


def match_ode(generated: DPoly, reference: DPoly, dep: str, indep: str,
              unknowns: Sequence[str], prefer: Sequence[str] = ()) -> OdeMatch:
    """Is ``generated`` a differential consequence of ``reference``?

    ``generated`` is reduced modulo ``reference`` (solved for its top
    derivative); every remaining coefficient is an equation for ``unknowns``.
    """
    rel = OdeRelation(dep, indep, reference)
    r = reduce_mod_ode(generated, [rel])
    eqs = equations_from(r, keep=(indep,))
    sol = solve_sequential(eqs, unknowns, prefer)
    return OdeMatch(sol.consistent, sol.values, sol.free, sol.unsolved)
