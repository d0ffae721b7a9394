"""Catalog of doubly exotic potentials for N = 3..10 and checks against it.

Each entry pairs an A-map seed with the ODE obeyed by the one-variable
profile.  The x-side ODE is stored; the y-side follows by relabelling the
independent variable and applying the entry's parameter substitution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from . import compat
from .deteq import IntegralAnsatz, level_count
from .painleve import OdeSpec, PainleveReport, parse_ode, painleve_test
from .parsing import parse_expression
from .symcore import (HBAR, DPoly, OdeRelation, ReductionError, base, jet, param, reduce_mod_ode,
                      register_function, symbol_of, to_text)

register_function("Q1", ("x",))
register_function("Q2", ("y",))


class UnknownEntry(KeyError):
    pass


def _parse_map(m: Dict[str, str]) -> Dict[Tuple[int, int, int], DPoly]:
    out = {}
    for k, v in m.items():
        a, b, c = (int(t) for t in k.split(","))
        out[(a, b, c)] = parse_expression(v)
    return out


@dataclass
class CatalogEntry:
    id: str
    N: int
    family: str
    A: Dict[Tuple[int, int, int], DPoly]
    ode: OdeSpec
    expected_resonances: Optional[List[int]]
    assumptions: List[str]
    potential_form: str
    y_substitution: Dict[str, str]
    notes: str = ""

    def ansatz(self) -> IntegralAnsatz:
        return IntegralAnsatz(self.N, dict(self.A))

    @property
    def dep(self) -> str:
        return self.ode.dep

    def side_ode(self, side: str) -> DPoly:
        """Catalog ODE for the x- or y-profile, in that variable."""
        fn = self.profile_name(side)
        p = compat.rename_functions(self.ode.defining, {self.dep: fn}, {self.ode.indep: side})
        if side == "y" and self.y_substitution:
            p = p.subs({param(k): parse_expression(v) for k, v in self.y_substitution.items()})
        return p

    def profile_name(self, side: str) -> str:
        idx = "1" if side == "x" else "2"
        if self.family == "II":
            return "F" + idx
        if self.id == "N3-I":
            return "Q" + idx
        return "U" + idx

    def potential(self) -> Tuple[DPoly, DPoly, List[OdeRelation]]:
        """``(V1, V2, relations)`` with the profiles as jets."""
        h2 = HBAR ** 2
        if self.family == "II":
            v = [h2 * DPoly.from_symbol(jet(self.profile_name(s), 1)) for s in ("x", "y")]
            rels = [OdeRelation(self.profile_name(s), s, self.side_ode(s)) for s in ("x", "y")]
            return v[0], v[1], rels
        if self.id == "N3-I":
            # V_i = hbar^2 w_i^2 P1(w_i s); Q_i(s) = P1(w_i s) obeys Q'' = 6 w^2 Q^2 + w^3 s
            v, rels = [], []
            for s, w in (("x", "omega1"), ("y", "omega2")):
                W = DPoly.from_symbol(param(w))
                q = self.profile_name(s)
                v.append(h2 * W ** 2 * DPoly.from_symbol(jet(q)))
                rel = (DPoly.from_symbol(jet(q, 2)) - (W ** 2).scale(6) * DPoly.from_symbol(jet(q)) ** 2
                       - W ** 3 * DPoly.from_symbol(base(s)))
                rels.append(OdeRelation(q, s, rel))
            return v[0], v[1], rels
        v = [DPoly.from_symbol(jet(self.profile_name(s))) for s in ("x", "y")]
        rels = [OdeRelation(self.profile_name(s), s, self.side_ode(s)) for s in ("x", "y")]
        return v[0], v[1], rels

    def index_record(self) -> dict:
        return {"id": self.id, "N": self.N, "family": self.family,
                "expected_resonances": self.expected_resonances, "assumptions": self.assumptions}


_CACHE: Dict[str, CatalogEntry] = {}
_ORDER: List[str] = []


def _load() -> None:
    if _CACHE:
        return
    base_dir = resources.files("superint") / "data"
    records = json.loads((base_dir / "index.json").read_text())
    for r in records:
        ode = parse_ode((base_dir / r["ode_file"]).read_text())
        e = CatalogEntry(r["id"], r["N"], r["family"], _parse_map(r["a_map"]), ode, r["expected_resonances"],
                         r["assumptions"], r["potential"], r["y_substitution"], r.get("notes", ""))
        _CACHE[e.id] = e
        _ORDER.append(e.id)


def ids() -> List[str]:
    _load()
    return list(_ORDER)


def get(entry_id: str) -> CatalogEntry:
    _load()
    try:
        return _CACHE[entry_id]
    except KeyError:
        raise UnknownEntry(f"unknown catalog id {entry_id!r}; known: {', '.join(_ORDER)}") from None


def index() -> List[dict]:
    return [get(i).index_record() for i in ids()]


# --------------------------------------------------------------------------
# resonance regression


@dataclass
class ResonanceCheck:
    id: str
    expected: Optional[List[int]]
    found: List[List[int]]
    verdict: str
    ok: bool
    report: PainleveReport

    def to_json(self) -> dict:
        return {"id": self.id, "expected": self.expected, "passing_sets": self.found,
                "verdict": self.verdict, "ok": self.ok}


def check_resonances(entry_id: str) -> ResonanceCheck:
    """Expected set (without -1) must appear on a passing branch."""
    e = get(entry_id)
    rep = painleve_test(e.ode)
    sets = [[r for r in s if r != -1 and r > 0] for s in rep.passing_resonance_sets()]
    if e.expected_resonances is None:
        ok = bool(sets)
    else:
        ok = sorted(e.expected_resonances) in [sorted(s) for s in sets]
    return ResonanceCheck(entry_id, e.expected_resonances, sets, rep.verdict, ok, rep)


# --------------------------------------------------------------------------
# potential verification


@dataclass
class LevelCheck:
    level: int
    equations: List[DPoly]
    note: str = ""


@dataclass
class VerifyReport:
    id: str
    max_level: int
    levels: List[LevelCheck]
    constants: Dict[str, DPoly]
    free: List[str]
    constraints: List[DPoly]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None and not self.constraints

    def to_json(self) -> dict:
        return {"id": self.id, "max_level": self.max_level, "ok": self.ok, "error": self.error,
                "levels": [{"level": c.level, "equations": len(c.equations), "note": c.note} for c in self.levels],
                "constants": {k: to_text(v) for k, v in self.constants.items()},
                "free": self.free, "constraints": [to_text(c) for c in self.constraints]}


def _reduce(p: DPoly, rels: Sequence[OdeRelation]) -> DPoly:
    return reduce_mod_ode(p, rels) if rels else p


def verify_with(ansatz: IntegralAnsatz, V1: DPoly, V2: DPoly, rels: Sequence[OdeRelation],
                max_level: Optional[int] = None, label: str = "custom",
                prefer: Sequence[str] = ()) -> VerifyReport:
    """Run the level-by-level well for an explicit potential.

    Levels below the last requested one are solved by quadrature with free
    integration constants; the last requested level is eliminated.  Every condition is reduced
    modulo ``rels`` and split into coefficient equations, which are then
    solved for the integration constants.
    """
    top = level_count(ansatz.N)
    L = top if max_level is None else min(max_level, top)
    cur = ansatz
    consts: List[str] = []
    levels: List[LevelCheck] = []
    eqs: List[DPoly] = []
    for l in range(1, L + 1):
        ch = compat.level_chain(cur, l, (V1, V2))
        try:
            if l < L:
                sol = compat.solve_chain(ch, True, prefix="k" if l == 1 else f"r{l}")
                conds = [c for c in sol.conditions if not c.is_zero()]
                consts += sol.constants
                cur = cur.with_f({(j, 2 * l): sol.f[j] for j in range(ch.n)})
            else:
                conds = [compat.chain_eliminate(ch)]
            found: List[DPoly] = []
            for c in conds:
                found += compat.equations_from(_reduce(c, rels), ("x", "y"))
        except (compat.ChainError, ReductionError) as exc:
            return VerifyReport(label, L, levels, {}, consts, [], f"level {l}: {exc}")
        levels.append(LevelCheck(l, found))
        eqs += found
    res = compat.solve_sequential(eqs, consts + [u for u in prefer if u not in consts], prefer=consts)
    return VerifyReport(label, L, levels, res.values, res.free, res.unsolved)


def verify_potential(entry_id: str, max_level: Optional[int] = None) -> VerifyReport:
    e = get(entry_id)
    V1, V2, rels = e.potential()
    return verify_with(e.ansatz(), V1, V2, rels, max_level, entry_id)


def verify_zero_potential(ansatz: IntegralAnsatz, max_level: Optional[int] = None) -> VerifyReport:
    return verify_with(ansatz, DPoly(), DPoly(), [], max_level, "zero-potential")


# --------------------------------------------------------------------------
# conjectured structural templates


@dataclass
class TemplateSpec:
    conjecture: str  # "I" or "II"
    N: int

    def __post_init__(self):
        if self.conjecture not in ("I", "II"):
            raise ValueError("template must be I or II")
        if self.conjecture == "I" and (self.N < 3 or self.N % 2 == 0):
            raise ValueError("template I needs odd N >= 3")
        if self.conjecture == "II" and self.N < 5:
            raise ValueError("template II needs N >= 5")


@dataclass
class TemplateMatch:
    matches: bool
    unmatched: List[str] = field(default_factory=list)


def _skeleton(ode: OdeSpec) -> Dict[Tuple[Tuple[int, ...], int], DPoly]:
    """Group terms by (dependent jet orders, power of the independent variable)."""
    zid = base(ode.indep)
    out: Dict[Tuple[Tuple[int, ...], int], DPoly] = {}
    for m, c in ode.defining.terms.items():
        orders: List[int] = []
        deg = 0
        rest = []
        for s, e in m:
            S = symbol_of(s)
            if S.kind == "jet" and S.name == ode.dep:
                orders += [S.order] * e
            elif S == zid:
                deg = e
            else:
                rest.append((s, e))
        key = (tuple(sorted(orders)), deg)
        out[key] = out.get(key, DPoly()) + DPoly({tuple(rest): c})
    return {k: v for k, v in out.items() if not v.is_zero()}


def _term_text(key: Tuple[Tuple[int, ...], int], dep: str, indep: str) -> str:
    orders, deg = key
    parts = [f"{dep}^({k})" if k else dep for k in orders]
    if deg:
        parts.append(f"{indep}^{deg}")
    return "*".join(parts) or "1"


def _allowed_ii(orders: Tuple[int, ...], deg: int, N: int) -> bool:
    fixed = {(3,): {N - 4}, (2,): {N - 5}, (1, 1): {N - 4}, (0, 1): {N - 5}, (0, 0): {N - 6}}
    if orders in fixed:
        return deg in fixed[orders]
    poly = set(range(0, N))
    if orders == (1,):
        return deg in poly | {N - 6, N - 2}
    if orders == (0,):
        return deg in poly | {N - 7, N - 3}
    if orders == ():
        return deg in poly | {N}
    return False


def _allowed_i(orders: Tuple[int, ...], deg: int, N: int) -> bool:
    if not orders:
        return deg <= 1
    if deg != 0:
        return False
    d0 = orders.count(0)
    ders = [k for k in orders if k > 0]
    w = sum(ders)
    if not ders:
        return d0 <= (N + 1) // 2
    if w == N - 1:
        return ders == [N - 1] and d0 == 0
    if (N - 1 - w) % 2:
        return False
    k = (N - 1 - w) // 2
    if len(ders) == 1:
        return d0 <= k
    return len(set(ders)) <= 2 and d0 <= k - 1


def template_match(ode: OdeSpec, t: TemplateSpec) -> TemplateMatch:
    """Compare the term skeleton of ``ode`` with a conjectured shape.

    Only jet orders and powers of the independent variable are compared.
    For template II the equation is first normalised so that the third
    derivative carries ``z^(N-4)``.
    """
    N = t.N
    want = N - 1 if t.conjecture == "I" else 3
    if ode.order != want:
        return TemplateMatch(False, [f"order {ode.order}, template needs {want}"])
    sk = _skeleton(ode)
    if t.conjecture == "II":
        lead = [k for k in sk if k[0] == (3,)]
        if len(lead) != 1:
            return TemplateMatch(False, ["third derivative must carry a single power of z"])
        shift = N - 4 - lead[0][1]
        sk = {(o, d + shift): c for (o, d), c in sk.items()}
        allowed = _allowed_ii
        required = [((3,), N - 4), ((1, 1), N - 4)]
    else:
        allowed = _allowed_i
        required = [((N - 1,), 0), ((0,) * ((N + 1) // 2), 0)]
    bad = [_term_text(k, ode.dep, ode.indep) for k in sorted(sk) if not allowed(k[0], k[1], N)]
    missing = [f"missing {_term_text(k, ode.dep, ode.indep)}" for k in required if k not in sk]
    return TemplateMatch(not bad and not missing, bad + missing)


# --------------------------------------------------------------------------
# NLCC agreement for family II


def nlcc_match(entry_id: str, side: str = "x") -> compat.OdeMatch:
    """Match the generated level-2 condition against the catalog ODE.

    Catalog parameters and separation constants are solved for; integration
    constants of the homogeneous solution may be specialised as well, which
    shows up in the returned mapping.
    """
    e = get(entry_id)
    if e.family != "II":
        raise ValueError("nlcc matching is defined for family II entries")
    res = compat.nlcc(e.ansatz(), 2, {"V1": "F1", "V2": "F2"})
    sep = compat.separate(res)
    gen = (sep.x_odes if side == "x" else sep.y_odes)
    if len(gen) != 1:
        return compat.OdeMatch(False, {}, [], [DPoly.constant(len(gen))])
    ref = e.side_ode(side)
    fn = e.profile_name(side)
    unk = sorted({s.name for s in ref.symbols() if s.kind == "param"}) + list(sep.separation_constants)
    m = compat.match_ode(gen[0], ref, fn, side, unk, sep.separation_constants)
    if m.matches:
        return m
    # allow the homogeneous integration constants to specialise
    cat = sorted({s.name for s in ref.symbols() if s.kind == "param"}, key=lambda n: (n[0] == "b", n))
    return compat.match_ode(gen[0], ref, fn, side, unk + list(res.constants),
                            cat + list(sep.separation_constants))
