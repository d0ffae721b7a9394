"""Determining equations M_{j,2l} for an N-th order integral of a separable potential.

The explicit formula path lives here; :func:`cross_check` compares it with the
commutator ``[H, Y_N]`` expanded by :mod:`superint.opalg`.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

from . import opalg
from .symcore import DPoly, HBAR, binom, differentiate, jet, param, to_text, var

AValue = Union[int, Fraction, DPoly]


def _as_poly(v: AValue) -> DPoly:
    return v if isinstance(v, DPoly) else DPoly.constant(v)


def a_symbol(a: int, m: int, n: int) -> DPoly:
    return DPoly.from_symbol(param(f"A_{a}_{m}_{n}"))


@dataclass
class IntegralAnsatz:
    """Order ``N``, leading coefficients ``A`` and any resolved ``f_{j,2l}`` (l >= 1)."""

    N: int
    A: Dict[Tuple[int, int, int], AValue]
    f: Dict[Tuple[int, int], DPoly] = field(default_factory=dict)

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("order must be positive")
        clean = {}
        for (a, m, n), v in self.A.items():
            if a + m + n != self.N or min(a, m, n) < 0:
                raise ValueError(f"A index {(a, m, n)} incompatible with N={self.N}")
            if not (v.is_zero() if isinstance(v, DPoly) else v == 0):
                clean[(a, m, n)] = v
        if not clean:
            raise ValueError("integral not of order N: all A coefficients vanish")
        self.A = clean

    def with_f(self, f: Mapping[Tuple[int, int], DPoly]) -> "IntegralAnsatz":
        merged = dict(self.f)
        merged.update(f)
        return IntegralAnsatz(self.N, dict(self.A), merged)

    def a_text(self) -> Dict[str, str]:
        return {f"A_{a}_{m}_{n}": to_text(_as_poly(v)) for (a, m, n), v in sorted(self.A.items())}


def full_a_map(N: int) -> Dict[Tuple[int, int, int], DPoly]:
    """Every ``A_{N-m-n,m,n}`` as a free parameter."""
    return {(N - m - n, m, n): a_symbol(N - m - n, m, n)
            for m in range(N + 1) for n in range(N + 1 - m)}


def random_a_map(N: int, rng: random.Random, density: float = 0.6) -> Dict[Tuple[int, int, int], Fraction]:
    out = {}
    for m in range(N + 1):
        for n in range(N + 1 - m):
            if rng.random() < density:
                out[(N - m - n, m, n)] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    if not any(v != 0 for v in out.values()):
        out[(0, N, 0)] = Fraction(1)
    return out


def f_j0(N: int, A: Mapping[Tuple[int, int, int], AValue]) -> List[DPoly]:
    """Leading coefficient functions ``f_{j,0}`` for ``j = 0..N``."""
    x, y = var("x"), var("y")
    out = []
    for j in range(N + 1):
        acc = DPoly()
        for n in range(N - j + 1):
            for m in range(j + 1):
                a = A.get((N - n - m, m, n))
                if a is None:
                    continue
                c = binom(N - n - m, j - m)
                if c == 0:
                    continue
                acc = acc + _as_poly(a) * (x ** (N - j - n)) * ((-y) ** (j - m)) * c
        out.append(acc)
    return out


def counts(N: int) -> Tuple[int, int]:
    """Number of determining equations and of unknown functions."""
    if N < 2:
        raise ValueError("N must be at least 2")
    if N % 2:
        return (N + 3) ** 2 // 4, (N + 1) * (N + 3) // 4
    return (N + 2) * (N + 4) // 4, (N + 2) ** 2 // 4


def counts_by_sum(N: int) -> Tuple[int, int]:
    top = (N + 1) // 2
    return (sum(N - 2 * l + 2 for l in range(top + 1)),
            sum(N - 2 * l + 1 for l in range(top + 1)))


def unknown_f(j: int, k: int) -> DPoly:
    return DPoly.from_symbol(jet(f"f_{j}_{k}", (0, 0), ("x", "y")))


class _Builder:
    """Memoized evaluation of f, phi, Q, M for one ansatz."""

    def __init__(self, ansatz: IntegralAnsatz, potential: Optional[Tuple[DPoly, DPoly]] = None):
        self.a = ansatz
        self.N = ansatz.N
        self.f0 = f_j0(self.N, ansatz.A)
        self._f: Dict[Tuple[int, int], DPoly] = {}
        self._df: Dict[Tuple[int, int, int, int], DPoly] = {}
        self._phi: Dict[Tuple[int, int], DPoly] = {}
        if potential is None:
            potential = (DPoly.from_symbol(jet("V1")), DPoly.from_symbol(jet("V2")))
        self.V1, self.V2 = potential
        self._v1: Dict[int, DPoly] = {0: self.V1}
        self._v2: Dict[int, DPoly] = {0: self.V2}
        self.mh2 = -(HBAR ** 2)

    def v1(self, n: int) -> DPoly:
        if n not in self._v1:
            self._v1[n] = differentiate(self.v1(n - 1), "x")
        return self._v1[n]

    def v2(self, n: int) -> DPoly:
        if n not in self._v2:
            self._v2[n] = differentiate(self.v2(n - 1), "y")
        return self._v2[n]

    def f(self, j: int, k: int) -> DPoly:
        if k < 0 or j < 0 or j > self.N - k:
            return DPoly()
        key = (j, k)
        if key not in self._f:
            if k == 0:
                self._f[key] = self.f0[j]
            elif key in self.a.f:
                self._f[key] = self.a.f[key]
            else:
                self._f[key] = unknown_f(j, k)
        return self._f[key]

    def df(self, j: int, k: int, a: int, b: int) -> DPoly:
        key = (j, k, a, b)
        if key not in self._df:
            if a == 0 and b == 0:
                r = self.f(j, k)
            elif a > 0:
                r = differentiate(self.df(j, k, a - 1, b), "x")
            else:
                r = differentiate(self.df(j, k, 0, b - 1), "y")
            self._df[key] = r
        return self._df[key]

    def phi(self, j: int, k: int) -> DPoly:
        """``phi_{j,k}``; zero for ``k <= 0``."""
        if k <= 0:
            return DPoly()
        key = (j, k)
        if key in self._phi:
            return self._phi[key]
        N = self.N
        l = (k + 1) // 2
        eps = 2 * l - k
        acc = DPoly()
        for b in range(1, l + 1):
            w = (self.mh2 ** (b - 1)).scale(Fraction(1, 2))
            inner = DPoly()
            for a in range(0, 2 * b - eps + 1):
                c = binom(j + a, a) * binom(N - 2 * l + 2 * b - j - a, 2 * b - eps - a)
                if c == 0:
                    continue
                d = self.df(j + a, 2 * l - 2 * b, a, 2 * b - eps - a)
                if d.is_zero():
                    continue
                inner = inner + d.scale(c)
            if not inner.is_zero():
                acc = acc + w * inner
        self._phi[key] = acc
        return acc

    def quantum_correction(self, j: int, l: int) -> DPoly:
        N = self.N
        q = (differentiate(self.phi(j - 1, 2 * l), "x").scale(2)
             + differentiate(self.phi(j, 2 * l), "y").scale(2)
             + differentiate(self.phi(j, 2 * l - 1), "x", 2)
             + differentiate(self.phi(j, 2 * l - 1), "y", 2))
        s1 = DPoly()
        for n in range(0, l - 1):
            w = self.mh2 ** n
            t = (self.v2(2 * n + 3) * self.f(j, 2 * l - 2 * n - 4)).scale(binom(N - 2 * l + 2 * n + 4 - j, 2 * n + 3))
            t = t + (self.v1(2 * n + 3) * self.f(j + 2 * n + 3, 2 * l - 2 * n - 4)).scale(binom(j + 2 * n + 3, 2 * n + 3))
            s1 = s1 + w * t
        s2 = DPoly()
        for n in range(1, 2 * l):
            w = self.mh2 ** ((n - 1) // 2)
            t = (self.v2(n) * self.phi(j, 2 * l - n - 1)).scale(binom(N - 2 * l + n + 1 - j, n))
            t = t + (self.v1(n) * self.phi(j + n, 2 * l - n - 1)).scale(binom(j + n, n))
            s2 = s2 + w * t
        return q - s1.scale(2) - s2.scale(2)

    def M(self, j: int, l: int) -> DPoly:
        N = self.N
        out = (differentiate(self.f(j - 1, 2 * l), "x") + differentiate(self.f(j, 2 * l), "y")).scale(2)
        out = out - (self.f(j + 1, 2 * l - 2) * self.v1(1)).scale(2 * (j + 1))
        out = out - (self.f(j, 2 * l - 2) * self.v2(1)).scale(2 * (N - 2 * l + 2 - j))
        if l >= 1:
            out = out - (HBAR ** 2) * self.quantum_correction(j, l)
        return out


def level_count(N: int) -> int:
    return (N + 1) // 2


def phi(j: int, k: int, ansatz: IntegralAnsatz) -> DPoly:
    return _Builder(ansatz).phi(j, k)


def quantum_correction(j: int, l: int, ansatz: IntegralAnsatz) -> DPoly:
    return _Builder(ansatz).quantum_correction(j, l)


@dataclass
class DetSystem:
    N: int
    levels: Dict[int, List[DPoly]]

    def equations(self) -> List[DPoly]:
        return [e for l in sorted(self.levels) for e in self.levels[l]]

    def count(self) -> int:
        return sum(len(v) for v in self.levels.values())

    def is_identically_zero(self) -> bool:
        return all(e.is_zero() for e in self.equations())

    def to_json(self) -> dict:
        return {"N": self.N,
                "levels": [{"l": l, "equations": [to_text(e) for e in self.levels[l]]}
                           for l in sorted(self.levels)]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def determining_system(ansatz: IntegralAnsatz, max_level: Optional[int] = None,
                       potential: Optional[Tuple[DPoly, DPoly]] = None) -> DetSystem:
    """All ``M_{j,2l}``, ``j = 0..N-2l+1``, for ``l = 0..(N+1)//2`` (capped by ``max_level``)."""
    b = _Builder(ansatz, potential)
    top = level_count(ansatz.N) if max_level is None else min(max_level, level_count(ansatz.N))
    levels = {}
    for l in range(top + 1):
        levels[l] = [b.M(j, l) for j in range(ansatz.N - 2 * l + 2)]
    return DetSystem(ansatz.N, levels)


def level_equation(ansatz: IntegralAnsatz, j: int, l: int,
                   potential: Optional[Tuple[DPoly, DPoly]] = None) -> DPoly:
    return _Builder(ansatz, potential).M(j, l)


# --------------------------------------------------------------------------
# commutator oracle


def full_integral(ansatz: IntegralAnsatz) -> opalg.OpPoly:
    """``Y_N = 1/2 sum {f_{j,2l}, p1^j p2^(N-j-2l)}`` with unresolved f's as jets."""
    b = _Builder(ansatz)
    N = ansatz.N
    Y = opalg.OpPoly()
    for l in range(N // 2 + 1):
        for j in range(N - 2 * l + 1):
            f = b.f(j, 2 * l)
            if not f.is_zero():
                Y = Y + opalg.sym_anticommutator(f, (j, N - j - 2 * l))
    return Y


def oracle_equations(ansatz: IntegralAnsatz) -> Dict[Tuple[int, int], DPoly]:
    """Commutator-derived ``M_{j,2l}``.

    ``[H, Y]`` is normal-ordered as ``sum Z_{k,l} dx^k dy^l``; the coefficient
    at ``(j, N-2l-j+1)`` equals ``-(1/2) hbar^2 (-i hbar)^(N-2l) M_{j,2l}``.
    """
    N = ansatz.N
    C = opalg.commutator(opalg.hamiltonian(), full_integral(ansatz))
    G = opalg.extract_coeffs(C)
    out = {}
    for l in range(level_count(N) + 1):
        norm = normalization(N, l)
        for j in range(N - 2 * l + 2):
            g = G.get((j, N - 2 * l - j + 1), DPoly())
            out[(j, l)] = g.div_exact(norm)
    return out


def normalization(N: int, l: int) -> DPoly:
    """Factor relating a symmetric commutator coefficient to ``M_{j,2l}``."""
    return (HBAR ** 2).scale(Fraction(-1, 2)) * (opalg.MINUS_I_HBAR ** (N - 2 * l))


@dataclass
class CrossCheckReport:
    N: int
    agree: bool
    mismatches: List[dict]
    odd_level_nonzero: List[Tuple[int, int]]

    def to_json(self) -> dict:
        return {"N": self.N, "agree": self.agree, "mismatches": self.mismatches,
                "normalization": "M_{j,2l} = Z_{j,N-2l-j+1} / (-(1/2) hbar^2 (-i hbar)^(N-2l))"}


def cross_check(ansatz: IntegralAnsatz, max_level: Optional[int] = None, bound: int = 6) -> CrossCheckReport:
    """Compare formula-generated and commutator-extracted equations level by level."""
    N = ansatz.N
    if N > bound:
        raise ValueError(f"cross_check limited to N <= {bound}")
    oracle = oracle_equations(ansatz)
    b = _Builder(ansatz)
    top = level_count(N) if max_level is None else min(max_level, level_count(N))
    mismatches = []
    for l in range(top + 1):
        for j in range(N - 2 * l + 2):
            mine = b.M(j, l)
            theirs = oracle[(j, l)]
            if mine != theirs:
                mismatches.append({"j": j, "l": l, "formula": to_text(mine), "oracle": to_text(theirs),
                                   "difference": to_text(mine - theirs)})
    return CrossCheckReport(N, not mismatches, mismatches, [])
