import re
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import nonzero_rationals, rationals, to_sympy
from sympy_oracle import laurent_conditions
from superint import catalog, painleve
from superint.painleve import (CONSTRAINED, FAIL, FAILED, GENERIC, INCONCLUSIVE, PASS, PASS_CONSTRAINED,
                               OdeFormatError, compatibility_check, dominant_balances, parse_ode,
                               painleve_test, rational_roots, resonances)
from superint.symcore import DPoly, base, jet, to_text

P1 = """indep z
dep F order 2
eq F'' = 6*F^2 + z
"""
P2 = """indep z
dep F order 2
param alpha
eq F'' = 2*F^3 + z*F + alpha
"""
LINEAR = """indep z
dep F order 2
eq F'' = F
"""
NOT_P = """indep z
dep F order 2
eq F'' = 6*F^2 + z^2
"""


def ints(xs):
    return sorted(int(r) for r in xs)


# -- format -----------------------------------------------------------------

def test_round_trip_through_text():
    ode = parse_ode(P2)
    again = parse_ode(ode.to_text())
    assert again.defining == ode.defining and again.order == 2


@pytest.mark.parametrize("text", [
    "indep z\ndep F order 3\neq F'' = F\n",
    "indep z\ndep F\nfoo bar\neq F = 0\n",
    "dep F\nindep z\neq F = 0\n",
    "indep z\ndep F\nassume hbar > 0\neq F = 0\n",
    "indep z\ndep F\n",
])
def test_format_errors(text):
    with pytest.raises(OdeFormatError):
        parse_ode(text)


def test_rational_roots():
    roots, rest = rational_roots([Fraction(-6), Fraction(-5), Fraction(1)])
    assert sorted(roots) == [-1, 6] and rest == [1]
    roots, rest = rational_roots([Fraction(-2), Fraction(0), Fraction(1)])
    assert roots == [] and len(rest) == 3


# -- ARS on classical equations ------------------------------------------------

def test_p1_balance_and_resonances():
    ode = parse_ode(P1)
    (b,), _ = dominant_balances(ode)
    assert b.p == -2 and b.a0 == DPoly.constant(1)
    assert ints(resonances(ode, b).roots) == [-1, 6]
    rep = painleve_test(ode)
    assert rep.verdict == PASS
    assert [s.status for s in rep.branches[0].statuses] == [GENERIC]


def test_p2_two_branches_pass():
    rep = painleve_test(parse_ode(P2))
    assert rep.verdict == PASS
    assert sorted(to_text(b.balance.a0) for b in rep.branches) == ["-1", "1"]
    assert all(ints(b.resonances) == [-1, 4] for b in rep.branches)


def test_linear_has_no_balance():
    bs, diags = dominant_balances(parse_ode(LINEAR))
    assert bs == [] and diags


def test_forced_p1_fails():
    rep = painleve_test(parse_ode(NOT_P))
    assert rep.verdict == FAIL
    assert rep.branches[0].statuses[0].status == FAILED


def test_n6_principal_branch():
    ode = catalog.get("N6-II").ode
    bs, _ = dominant_balances(ode)
    assert any(b.p == -1 and b.a0 == DPoly.constant(-1) for b in bs)


def test_n5_family_one_resonances():
    rep = painleve_test(catalog.get("N5-I").ode)
    assert [2, 5, 8] in [[r for r in s if r > 0] for s in rep.passing_resonance_sets()]


def test_n9_family_one_resonances():
    rep = painleve_test(catalog.get("N9-I").ode)
    assert [2, 4, 5, 6, 7, 9, 12] in [[r for r in s if r > 0] for s in rep.passing_resonance_sets()]


def test_classical_limit_n5_not_generic_pass():
    ode = catalog.get("N5-I").ode.substitute({"hbar": 0})
    assert painleve_test(ode).verdict != PASS


def test_report_json_serializable():
    import json
    rep = painleve_test(catalog.get("N5-II").ode)
    doc = json.loads(rep.dumps())
    assert doc["verdict"] == rep.verdict
    assert doc["branches"][0]["resonances"][0] == -1


# -- invariants ---------------------------------------------------------------

def _transform(ode, alpha, beta, lam):
    """F(z) -> lam * F(alpha z + beta) written back in the same symbols."""
    z = DPoly.from_symbol(base(ode.indep))
    mapping = {s: DPoly.from_symbol(s).scale(lam * alpha ** (-s.order)) for s in ode.defining.jets(ode.dep)}
    mapping[base(ode.indep)] = z.scale(alpha) + DPoly.constant(beta)
    return ode.with_defining(ode.defining.subs(mapping))


def _signature(rep):
    return rep.verdict, sorted(tuple(ints(b.resonances)) for b in rep.branches)


@settings(max_examples=12, deadline=None)
@given(nonzero_rationals, rationals, nonzero_rationals, st.sampled_from([P1, P2, NOT_P]))
def test_affine_and_scaling_invariance(alpha, beta, lam, text):
    ode = parse_ode(text)
    assert _signature(painleve_test(_transform(ode, alpha, beta, lam))) == _signature(painleve_test(ode))


@pytest.mark.parametrize("entry", ["N5-II", "N6-II", "N5-I"])
def test_catalog_invariance(entry):
    ode = catalog.get(entry).ode
    t = _transform(ode, Fraction(2), Fraction(1, 3), Fraction(-3))
    assert _signature(painleve_test(t)) == _signature(painleve_test(ode))


@pytest.mark.parametrize("entry", catalog.ids())
def test_passing_branch_shape(entry):
    e = catalog.get(entry)
    rep = painleve_test(e.ode)
    for b in rep.branches:
        if b.verdict not in (PASS, PASS_CONSTRAINED):
            continue
        assert len(b.resonances) == e.ode.order
        assert Fraction(-1) in b.resonances
        assert len(set(b.resonances)) == len(b.resonances)
    principal = rep.branches[0]
    positive = [r for r in principal.resonances if r > 0]
    if e.family == "II":
        assert len(positive) == 2
    elif e.N >= 5:
        assert len([r for r in principal.resonances if r != -1]) == e.N - 2


# -- dual route ---------------------------------------------------------------

def _sympy_value(text):
    text = re.sub(r"\blambda\b", "lam_", text)
    return sp.sympify(text.replace("^", "**"), locals={"lam_": sp.Symbol("lambda"), "Lambda": sp.Symbol("Lambda")})


@pytest.mark.parametrize("label,text", [("P1", P1), ("P2", P2), ("forced", NOT_P)]
                         + [(i, catalog.get(i).ode.to_text()) for i in ("N5-II", "N6-II", "N7-II", "N5-I")])
def test_compatibility_matches_sympy_oracle(label, text):
    ode = parse_ode(text)
    bs, _ = dominant_balances(ode)
    for b in bs:
        if b.a0 is None or b.p.denominator != 1:
            continue
        res = [int(r) for r in resonances(ode, b).roots]
        pos = [r for r in res if r > 0]
        if not pos:
            continue
        statuses, _, notes = compatibility_check(ode, b, res)
        assert not notes
        oracle = laurent_conditions(text, int(b.p), _sympy_value(to_text(b.a0)), max(pos))
        assert sorted(oracle) == sorted(pos)
        for s in statuses:
            generic = sp.simplify(oracle[s.r]) == 0
            assert generic == (s.status == GENERIC), (label, s.r, oracle[s.r], s.status)


@pytest.mark.parametrize("text", [P1, P2])
def test_laurent_coefficients_resubstitute(text):
    ode = parse_ode(text)
    for b in dominant_balances(ode)[0]:
        res = [int(r) for r in resonances(ode, b).roots]
        K = max(res)
        _, values, _ = compatibility_check(ode, b, res)
        chi, z0 = sp.symbols("chi z0")
        free = sp.Symbol(f"t{K}")
        u = sum(to_sympy(values[k]) * chi ** (int(b.p) + k) for k in range(K)) + free * chi ** (int(b.p) + K)
        eq = ode.defining
        E = to_sympy(eq)
        subs = {sp.Symbol(f"J_{ode.dep}_{n}"): sp.diff(u, chi, n) for n in range(ode.order + 1)}
        subs[sp.Symbol(ode.indep)] = z0 + chi
        S = sp.expand(E.subs(subs))
        lead = int(b.p) - ode.order if ode.order else 0
        lowest = min(int(b.p) * 3, lead)
        for k in range(lowest, lead + K + 1):
            assert sp.simplify(S.coeff(chi, k)) == 0, k
