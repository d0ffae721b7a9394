"""Normal-ordered differential operators over the Heisenberg algebra.

An :class:`OpPoly` is ``sum f_{c,d}(x, y) * dx^c * dy^d`` with every function
factor to the left of the derivatives.  Momenta are ``p1 = -i*hbar*dx`` and
``p2 = -i*hbar*dy``; ``hbar`` and ``i`` live in the DPoly coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .symcore import (DPoly, GaussRat, HBAR, HBAR_SYM, binom, conj, differentiate, jet, sym,
                      to_text, var)

Word = Tuple[int, int]

MINUS_I_HBAR = DPoly.constant(GaussRat(0, -1)) * HBAR


class OpPoly:
    """Sparse sum of normal-ordered words ``coeff * dx^c * dy^d``."""

    __slots__ = ("words",)

    def __init__(self, words: Optional[Mapping[Word, DPoly]] = None):
        self.words: Dict[Word, DPoly] = {}
        if words:
            for w, f in words.items():
                if not f.is_zero():
                    self.words[w] = f

    @classmethod
    def function(cls, f: DPoly) -> "OpPoly":
        return cls({(0, 0): f})

    @classmethod
    def derivative(cls, c: int, d: int, coeff: Optional[DPoly] = None) -> "OpPoly":
        return cls({(c, d): DPoly.constant(1) if coeff is None else coeff})

    def __add__(self, other: "OpPoly") -> "OpPoly":
        out = dict(self.words)
        for w, f in other.words.items():
            out[w] = out[w] + f if w in out else f
        return OpPoly(out)

    def __neg__(self) -> "OpPoly":
        return OpPoly({w: -f for w, f in self.words.items()})

    def __sub__(self, other: "OpPoly") -> "OpPoly":
        return self + (-other)

    def scale(self, k) -> "OpPoly":
        if isinstance(k, DPoly):
            return OpPoly({w: f * k for w, f in self.words.items()})
        return OpPoly({w: f.scale(k) for w, f in self.words.items()})

    def __mul__(self, other) -> "OpPoly":
        if isinstance(other, OpPoly):
            return op_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other) -> "OpPoly":
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OpPoly):
            return NotImplemented
        return self.words == other.words

    def is_zero(self) -> bool:
        return not self.words

    def order(self) -> int:
        return max((c + d for c, d in self.words), default=-1)

    def adjoint(self) -> "OpPoly":
        """Formal adjoint: reverse each word and conjugate (x, y, jets are real).

        ``(f dx^c dy^d)^+ = (-1)^(c+d) dx^c dy^d conj(f)``, then re-normal-ordered.
        """
        out = OpPoly()
        for (c, d), f in self.words.items():
            sign = -1 if (c + d) % 2 else 1
            out = out + op_mul(OpPoly.derivative(c, d), OpPoly.function(f.conjugate().scale(sign)))
        return out

    def to_text(self) -> str:
        if not self.words:
            return "0"
        parts = []
        for (c, d), f in sorted(self.words.items(), key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0])):
            for e, g in sorted(f.hbar_grades().items()):
                s = f"({to_text(g)}) * dx^{c} * dy^{d}"
                if e:
                    s += f" * hbar^{e}"
                parts.append(s)
        return " + ".join(parts)

    def __repr__(self):
        return f"OpPoly({self.to_text()})"


def _derivs(g: DPoly, cmax: int, dmax: int) -> Dict[Word, DPoly]:
    table = {}
    col = g
    for a in range(cmax + 1):
        row = col
        for b in range(dmax + 1):
            table[(a, b)] = row
            if b < dmax:
                row = differentiate(row, "y")
        if a < cmax:
            col = differentiate(col, "x")
    return table


def op_mul(a: OpPoly, b: OpPoly) -> OpPoly:
    """Product re-normal-ordered with ``dx g = g dx + g_x``."""
    out: Dict[Word, DPoly] = {}
    if not a.words or not b.words:
        return OpPoly()
    cmax = max(c for c, _ in a.words)
    dmax = max(d for _, d in a.words)
    tables = {wb: _derivs(g, cmax, dmax) for wb, g in b.words.items()}
    for (c1, d1), f in a.words.items():
        for (c2, d2), g in b.words.items():
            tab = tables[(c2, d2)]
            for i in range(c1 + 1):
                bi = binom(c1, i)
                for j in range(d1 + 1):
                    dg = tab[(i, j)]
                    if dg.is_zero():
                        continue
                    w = (c1 - i + c2, d1 - j + d2)
                    term = (f * dg).scale(bi * binom(d1, j))
                    out[w] = out[w] + term if w in out else term
    return OpPoly(out)


def commutator(a: OpPoly, b: OpPoly) -> OpPoly:
    return op_mul(a, b) - op_mul(b, a)


# --------------------------------------------------------------------------
# standard operators

def p1() -> OpPoly:
    return OpPoly.derivative(1, 0, MINUS_I_HBAR)


def p2() -> OpPoly:
    return OpPoly.derivative(0, 1, MINUS_I_HBAR)


def momentum_power(j: int, k: int) -> OpPoly:
    """``p1^j p2^k`` as ``(-i hbar)^(j+k) dx^j dy^k``."""
    return OpPoly.derivative(j, k, MINUS_I_HBAR ** (j + k))


def angular_momentum() -> OpPoly:
    """``L_z = x p2 - y p1``."""
    return OpPoly({(0, 1): var("x") * MINUS_I_HBAR, (1, 0): -var("y") * MINUS_I_HBAR})


def hamiltonian(potential: Optional[DPoly] = None) -> OpPoly:
    """``H = (p1^2 + p2^2)/2 + V``; default ``V = V1(x) + V2(y)`` as jets."""
    if potential is None:
        potential = DPoly.from_symbol(jet("V1")) + DPoly.from_symbol(jet("V2"))
    half_h2 = (HBAR ** 2).scale(Fraction(-1, 2))
    return OpPoly({(2, 0): half_h2, (0, 2): half_h2, (0, 0): potential})


def x_integral() -> OpPoly:
    """``X = (p1^2 - p2^2)/2 + V1(x) - V2(y)``."""
    half_h2 = (HBAR ** 2).scale(Fraction(-1, 2))
    return OpPoly({(2, 0): half_h2, (0, 2): -half_h2,
                   (0, 0): DPoly.from_symbol(jet("V1")) - DPoly.from_symbol(jet("V2"))})


def sym_anticommutator(f: DPoly, mono: Word) -> OpPoly:
    """``(f p1^j p2^k + p1^j p2^k f) / 2`` normal-ordered."""
    P = momentum_power(*mono)
    F = OpPoly.function(f)
    return (op_mul(F, P) + op_mul(P, F)).scale(Fraction(1, 2))


def anticommutator_op(a: OpPoly, b: OpPoly) -> OpPoly:
    return (op_mul(a, b) + op_mul(b, a)).scale(Fraction(1, 2))


def _lz_powers(n: int) -> List[OpPoly]:
    L = angular_momentum()
    out = [OpPoly.function(DPoly.constant(1))]
    for _ in range(n):
        out.append(op_mul(out[-1], L))
    return out


def build_wn(N: int, A: Mapping[Tuple[int, int, int], object]) -> OpPoly:
    """Leading part ``1/2 sum A_{N-m-n,m,n} {L_z^(N-m-n), p1^m p2^n}``.

    ``A`` maps ``(a, m, n)`` with ``a + m + n == N`` to a rational or a DPoly
    (a parameter).  Raises ``ValueError`` when every entry is zero.
    """
    nonzero = {k: v for k, v in A.items() if not _is_zero(v)}
    if not nonzero:
        raise ValueError("integral not of order N: all A coefficients vanish")
    for (a, m, n) in nonzero:
        if a + m + n != N or min(a, m, n) < 0:
            raise ValueError(f"A index {(a, m, n)} incompatible with N={N}")
    lz = _lz_powers(max(a for a, _, _ in nonzero))
    out = OpPoly()
    for (a, m, n), coef in sorted(nonzero.items()):
        c = coef if isinstance(coef, DPoly) else DPoly.constant(coef)
        term = anticommutator_op(lz[a], momentum_power(m, n))
        out = out + term.scale(c)
    return out


def _is_zero(v) -> bool:
    if isinstance(v, DPoly):
        return v.is_zero()
    return v == 0


def extract_coeffs(c: OpPoly) -> Dict[Word, DPoly]:
    """Normal-ordered coefficients ``Z_{k,l}`` of ``dx^k dy^l``."""
    return dict(c.words)


def symmetric_coeffs(c: OpPoly) -> Dict[Word, DPoly]:
    """Coefficients ``G`` with ``c = sum 1/2 {G_{k,l}, dx^k dy^l}``.

    Peeled from the highest order down; the decomposition is unique.
    """
    rest = OpPoly(dict(c.words))
    out: Dict[Word, DPoly] = {}
    while not rest.is_zero():
        top = rest.order()
        for w in sorted(w for w in rest.words if w[0] + w[1] == top):
            g = rest.words.get(w)
            if g is None or g.is_zero():
                continue
            out[w] = g
            sym_op = (op_mul(OpPoly.function(g), OpPoly.derivative(*w))
                      + op_mul(OpPoly.derivative(*w), OpPoly.function(g))).scale(Fraction(1, 2))
            rest = rest - sym_op
    return out


def classical_limit(polys: Iterable[DPoly]) -> List[DPoly]:
    """Divide out the common lowest hbar power of the set, then set ``hbar = 0``."""
    polys = list(polys)
    lows = [min(p.hbar_grades()) for p in polys if not p.is_zero()]
    if not lows:
        return polys
    low = min(lows)
    out = []
    for p in polys:
        if p.is_zero():
            out.append(p)
            continue
        grades = p.hbar_grades()
        out.append(grades.get(low, DPoly()))
    return out


def is_hermitian(op: OpPoly) -> bool:
    return op == op.adjoint()
