import json

import pytest

from superint import catalog
from superint.catalog import (TemplateSpec, UnknownEntry, check_resonances, template_match, verify_potential,
                              verify_with, verify_zero_potential)
from superint.deteq import IntegralAnsatz
from superint.painleve import FAILED, parse_ode
from superint.parsing import parse_expression
from superint.symcore import HBAR, HBAR_SYM, DPoly, to_text

PASSING = ["N3-I", "N5-I", "N5-II", "N6-II", "N7-I", "N9-I"]
# the r = 6 condition of the principal branch contains a nonzero constant
RESONANCE_MISMATCH = ["N7-II", "N8-II", "N9-II", "N10-II"]


def test_ids_and_index():
    ids = catalog.ids()
    assert set(PASSING + RESONANCE_MISMATCH) == set(ids)
    rec = {r["id"]: r for r in catalog.index()}
    assert rec["N9-I"]["expected_resonances"] == [2, 4, 5, 6, 7, 9, 12]
    json.dumps(catalog.index())


def test_unknown_entry():
    with pytest.raises(UnknownEntry):
        catalog.get("N4-II")


def test_n10_tail_is_symbolic():
    syms = {s.name for s in catalog.get("N10-II").ode.defining.symbols() if s.kind == "param"}
    assert {f"b{k}" for k in range(10)} <= syms


@pytest.mark.parametrize("entry", [i for i in catalog.ids() if i.endswith("-II")] + ["N3-I"])
def test_potential_is_hbar_squared_profile(entry):
    V1, V2, _ = catalog.get(entry).potential()
    for v in (V1, V2):
        profile = v.subs({HBAR_SYM: DPoly.constant(1)})
        assert HBAR_SYM not in profile.symbols() and v == HBAR ** 2 * profile


# -- resonances ------------------------------------------------------------------

@pytest.mark.parametrize("entry", PASSING)
def test_expected_resonances_on_passing_branch(entry):
    assert check_resonances(entry).ok


@pytest.mark.parametrize("entry", RESONANCE_MISMATCH)
def test_higher_family_two_resonance_obstruction(entry):
    """Characterises the observed failure: an r = 6 condition that is a nonzero number."""
    chk = check_resonances(entry)
    assert not chk.ok
    principal = chk.report.branches[0]
    assert [int(r) for r in principal.resonances] == [-1, 1, 6]
    (bad,) = [s for s in principal.statuses if s.status == FAILED]
    assert bad.r == 6
    assert any(c.is_constant() and not c.is_zero() for c in bad.constraints)


# -- verification -------------------------------------------------------------------

def test_n3_stated_scale_matching_leaves_constraint():
    rep = verify_potential("N3-I")
    assert rep.error is None
    (c,) = rep.constraints
    assert c == parse_expression("-1/4*hbar^4*omega1^10 + 1/4*hbar^4*omega2^10")


def test_n3_consistent_scale_matching_verifies():
    e = catalog.get("N3-I")
    V1, V2, rels = e.potential()
    A = {(0, 3, 0): parse_expression("-omega2^5"), (0, 0, 3): parse_expression("omega1^5")}
    rep = verify_with(IntegralAnsatz(3, A), V1, V2, rels)
    assert rep.ok, [to_text(c) for c in rep.constraints]


def test_n3_wrong_scale_is_rejected():
    e = catalog.get("N3-I")
    V1, V2, rels = e.potential()
    A = {(0, 3, 0): parse_expression("-2*omega2^5"), (0, 0, 3): parse_expression("omega1^5")}
    rep = verify_with(IntegralAnsatz(3, A), V1, V2, rels)
    assert not rep.ok and rep.constraints


@pytest.mark.parametrize("entry", ["N5-II", "N6-II", "N7-II"])
def test_family_two_nlcc_level_vanishes(entry):
    rep = verify_potential(entry, 2)
    assert rep.ok
    assert rep.constants["k1"] != DPoly()


def test_deeper_level_reports_offending_level():
    rep = verify_potential("N5-II")
    assert not rep.ok and rep.error.startswith("level 2")


def test_perturbed_potential_fails():
    e = catalog.get("N5-II")
    V1, V2, rels = e.potential()
    rep = verify_with(e.ansatz(), V1.scale(2), V2, rels, 2)
    assert not rep.ok


@pytest.mark.parametrize("A", [{(0, 2, 2): 1}, {(0, 3, 0): 1}, {(1, 2, 2): 1}])
def test_zero_potential(A):
    N = sum(next(iter(A)))
    rep = verify_zero_potential(IntegralAnsatz(N, A))
    assert rep.ok
    assert all(lv.equations == [] for lv in rep.levels)


def test_report_json():
    doc = json.loads(json.dumps(verify_potential("N3-I").to_json()))
    assert doc["ok"] is False and doc["constraints"]


# -- templates -------------------------------------------------------------------------

@pytest.mark.parametrize("entry", [i for i in catalog.ids() if i.endswith("-II")])
def test_family_two_template(entry):
    e = catalog.get(entry)
    m = template_match(e.ode, TemplateSpec("II", e.N))
    assert m.matches, m.unmatched


@pytest.mark.parametrize("entry", ["N5-I", "N7-I", "N9-I"])
def test_family_one_template(entry):
    e = catalog.get(entry)
    m = template_match(e.ode, TemplateSpec("I", e.N))
    assert m.matches, m.unmatched


def test_template_negative_control():
    p1 = parse_ode("indep z\ndep F order 2\neq F'' = 6*F^2 + z\n")
    m = template_match(p1, TemplateSpec("II", 6))
    assert not m.matches and m.unmatched


def test_template_rejects_foreign_third_order_term():
    ode = parse_ode("indep z\ndep F order 3\neq z^2*F''' = 6*z^2*F'^2 + F^3\n")
    m = template_match(ode, TemplateSpec("II", 6))
    assert not m.matches and m.unmatched == ["F*F*F"]


def test_template_spec_validation():
    with pytest.raises(ValueError):
        TemplateSpec("I", 4)
    with pytest.raises(ValueError):
        TemplateSpec("III", 5)


# -- NLCC agreement -----------------------------------------------------------------------

@pytest.mark.parametrize("entry", ["N5-II", "N6-II"])
@pytest.mark.parametrize("side", ["x", "y"])
def test_nlcc_matches_catalog(entry, side):
    m = catalog.nlcc_match(entry, side)
    assert m.matches, [to_text(c) for c in m.leftover]
    assert "sigma" in m.mapping and "e4" in m.mapping
    assert "Lambda" in to_text(m.mapping["e4"])


def test_nlcc_match_rejects_family_one():
    with pytest.raises(ValueError):
        catalog.nlcc_match("N5-I")

