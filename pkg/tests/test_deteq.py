import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superint import deteq
from superint.deteq import (IntegralAnsatz, counts, counts_by_sum, cross_check, determining_system, f_j0,
                            level_equation, quantum_correction, random_a_map)
from superint.symcore import HBAR, HBAR_SYM, DPoly, jet, param

half = Fraction(1, 2)
X_ANSATZ = {(0, 2, 0): half, (0, 0, 2): -half}


def test_fj0_examples():
    assert f_j0(2, X_ANSATZ) == [DPoly.constant(-half), DPoly(), DPoly.constant(half)]
    assert f_j0(3, {(0, 3, 0): 1}) == [DPoly(), DPoly(), DPoly(), DPoly.constant(1)]
    assert all(f.is_zero() for f in f_j0(4, {}))


@pytest.mark.parametrize("N,expected", [(3, (9, 6)), (4, (12, 9)), (5, (16, 12)), (10, (42, 36))])
def test_counts_examples(N, expected):
    assert counts(N) == expected


@pytest.mark.parametrize("N", range(2, 13))
def test_counts_match_system_size(N):
    assert counts(N) == counts_by_sum(N)
    a = IntegralAnsatz(N, {(0, N, 0): 1})
    assert determining_system(a).count() == counts(N)[0]


def test_counts_rejects_small_order():
    with pytest.raises(ValueError):
        counts(1)


def test_ansatz_validation():
    with pytest.raises(ValueError):
        IntegralAnsatz(3, {(0, 2, 0): 1})
    with pytest.raises(ValueError):
        IntegralAnsatz(3, {(0, 3, 0): 0})


def test_x_integral_regression():
    f02 = DPoly.from_symbol(jet("V1")) - DPoly.from_symbol(jet("V2"))
    a = IntegralAnsatz(2, dict(X_ANSATZ), {(0, 2): f02})
    assert determining_system(a).is_identically_zero()


def test_quantum_correction_empty_sums_n3():
    a = IntegralAnsatz(3, {(0, 3, 0): DPoly.from_symbol(param("cgamma")), (0, 0, 3): DPoly.from_symbol(param("sgamma"))})
    q = quantum_correction(0, 1, a)
    assert not any(s.name in ("V1", "V2") for s in q.jets())


@pytest.mark.parametrize("ansatz", [
    IntegralAnsatz(3, {(0, 3, 0): DPoly.from_symbol(param("cgamma")), (0, 0, 3): DPoly.from_symbol(param("sgamma"))}),
    IntegralAnsatz(4, {(0, 2, 2): 1}),
    IntegralAnsatz(5, {(1, 2, 2): 1}),
], ids=["N3-I", "N4-A022", "N5-A122"])
def test_cross_check_examples(ansatz):
    rep = cross_check(ansatz)
    assert rep.agree, rep.mismatches[:1]


def test_cross_check_bound():
    with pytest.raises(ValueError):
        cross_check(IntegralAnsatz(7, {(0, 7, 0): 1}))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10 ** 6))
def test_level_zero_closed_by_fj0(N, seed):
    a = IntegralAnsatz(N, random_a_map(N, random.Random(seed)))
    sysm = determining_system(a, max_level=0)
    assert all(e.is_zero() for e in sysm.levels[0])


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10 ** 6))
def test_oracle_equivalence_random(N, seed):
    a = IntegralAnsatz(N, random_a_map(N, random.Random(seed)))
    assert cross_check(a).agree


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 6), st.integers(0, 10 ** 6))
def test_hbar_grading(N, seed):
    a = IntegralAnsatz(N, random_a_map(N, random.Random(seed)))
    for l in range(1, deteq.level_count(N) + 1):
        for j in range(N - 2 * l + 2):
            M = level_equation(a, j, l)
            classical = M + HBAR ** 2 * quantum_correction(j, l, a)
            assert HBAR_SYM not in classical.symbols()


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10 ** 6))
def test_determining_equations_are_real(N, seed):
    a = IntegralAnsatz(N, random_a_map(N, random.Random(seed)))
    assert all(e.is_real() for e in determining_system(a).equations())


def test_json_shape():
    doc = json.loads(determining_system(IntegralAnsatz(3, {(0, 3, 0): 1})).dumps())
    assert doc["N"] == 3
    assert [lv["l"] for lv in doc["levels"]] == [0, 1, 2]
    assert all(isinstance(e, str) for lv in doc["levels"] for e in lv["equations"])
