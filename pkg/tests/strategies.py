"""Hypothesis strategies and a sympy bridge shared by the test modules."""

import re
from fractions import Fraction

import sympy as sp
from hypothesis import strategies as st

from superint.symcore import DPoly, HBAR, gauss, jet, param, to_text, var

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
nonzero_rationals = rationals.filter(lambda q: q != 0)


@st.composite
def coefficients(draw, complex_ok=True):
    re_ = draw(rationals)
    if complex_ok and draw(st.booleans()):
        return gauss(re_, draw(rationals))
    return re_


def _atoms(with_jets=True):
    pool = [var("x"), var("y"), HBAR, DPoly.from_symbol(param("a")), DPoly.from_symbol(param("sigma"))]
    if with_jets:
        pool += [DPoly.from_symbol(jet("V1", k)) for k in range(3)]
        pool += [DPoly.from_symbol(jet("V2", k)) for k in range(3)]
    return pool


@st.composite
def monomials(draw, with_jets=True):
    atoms = _atoms(with_jets)
    m = DPoly.constant(1)
    for _ in range(draw(st.integers(0, 3))):
        m = m * draw(st.sampled_from(atoms)) ** draw(st.integers(1, 2))
    return m


@st.composite
def dpolys(draw, max_terms=4, with_jets=True, complex_ok=True):
    p = DPoly()
    for _ in range(draw(st.integers(0, max_terms))):
        p = p + draw(monomials(with_jets)).scale(draw(coefficients(complex_ok)))
    return p


# --------------------------------------------------------------------------
# sympy bridge: jets become plain symbols J_<name>_<order>

_JET_RE = re.compile(r"\b([A-Za-z][A-Za-z0-9_]*)\^\((-?\d+)\)")


def to_sympy(p: DPoly):
    text = to_text(p)
    text = _JET_RE.sub(lambda m: f"J_{m.group(1)}_{m.group(2).replace('-', 'm')}", text)
    text = re.sub(r"\b(V1|V2|F1|F2|F|U|U1|U2|Q1|Q2)\b(?!\^\()", r"J_\1_0", text)
    loc = {"i": sp.I, "lam_": sp.Symbol("lambda"), "Lambda": sp.Symbol("Lambda")}
    text = re.sub(r"\blambda\b", "lam_", text)
    return sp.expand(sp.sympify(text.replace("^", "**"), locals=loc))


def jet_symbol(name, k):
    return sp.Symbol(f"J_{name}_{k}")


def sympy_dx(e, v, names=("V1", "V2"), deps=None):
    """Total derivative of a sympy expression in jet symbols along ``v``."""
    deps = deps or {"V1": "x", "V2": "y", "F1": "x", "F2": "y"}
    out = sp.diff(e, sp.Symbol(v))
    for s in e.free_symbols:
        m = re.fullmatch(r"J_(\w+?)_(\d+)", s.name)
        if m and deps.get(m.group(1)) == v:
            out += sp.diff(e, s) * jet_symbol(m.group(1), int(m.group(2)) + 1)
    return sp.expand(out)
