import math
import pickle
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lorentz_calderon.errors import ExponentError, NonNormable, NoSolution, ParameterError, SpecError
from lorentz_calderon.params import (
    CLAUSES,
    INF,
    Exponent,
    LorentzSpec,
    Verdict,
    as_exponent,
    derive,
    nontrivial_downgrade,
    r1r2_solve,
    scaling_holds,
    verdict_combined,
    verdict_R,
    verdict_S,
)

from conftest import PARAM_SETS

LATTICE = [Exponent(1), Exponent(3, 2), Exponent(2), Exponent(4), INF]


# -- Exponent -------------------------------------------------------------------

def test_exponent_lowest_terms():
    e = Exponent(6, -4)
    assert (e.numerator, e.denominator) == (-3, 2)
    assert Exponent.parse("10/4") == Exponent(5, 2)
    assert str(Exponent.parse(" inf ")) == "inf"


def test_exponent_arithmetic_exact():
    a, b = Exponent(1, 3), Exponent(1, 6)
    assert a + b == Exponent(1, 2)
    assert a - b == b
    assert a * b == Exponent(1, 18)
    assert a / b == 2
    assert a.reciprocal() == 3
    assert INF.reciprocal() == 0
    assert Exponent(2) * INF == INF
    assert INF + 5 == INF


@pytest.mark.parametrize("op", [
    lambda: INF - INF,
    lambda: Exponent(0) * INF,
    lambda: Exponent(1) / Exponent(0),
    lambda: INF / INF,
    lambda: Exponent(0).reciprocal(),
])
def test_exponent_rejects_undefined(op):
    with pytest.raises(ExponentError):
        op()


@pytest.mark.parametrize("bad", ["0.5", "abc", ""])
def test_exponent_parse_rejects(bad):
    with pytest.raises(SpecError):
        Exponent.parse(bad)


def test_exponent_parse_zero_denominator():
    with pytest.raises(ExponentError):
        Exponent.parse("1/0")


def test_as_exponent_rejects_finite_float():
    with pytest.raises(SpecError):
        as_exponent(0.5)
    assert as_exponent(math.inf) == INF
    assert as_exponent(Fraction(3, 2)) == Exponent(3, 2)


def test_exponent_ordering_and_hash():
    assert Exponent(1) < Exponent(3, 2) < INF
    assert not INF < INF
    assert hash(Exponent(2, 4)) == hash(Exponent(1, 2))
    assert pickle.loads(pickle.dumps(INF)) == INF


@given(st.fractions(min_value=-50, max_value=50), st.fractions(min_value=-50, max_value=50))
def test_exponent_matches_fraction(x, y):
    a, b = Exponent(x), Exponent(y)
    assert (a + b).as_fraction() == x + y
    assert (a * b).as_fraction() == x * y
    if y != 0:
        assert (a / b).as_fraction() == x / y
    assert (a < b) == (x < y)


# -- ParamSet -------------------------------------------------------------------

def test_derive_reference():
    P = derive(2, 2, 2, 2, 4)
    assert (P.r, P.alpha, P.r1_min, P.regime_a) == (2, 4, Fraction(4, 3), True)


def test_derive_second_example():
    P = derive(2, 2, 2, 2, 3)
    assert (P.r, P.alpha, P.r1_min, P.regime_a) == (3, 6, Fraction(3, 2), True)


def test_derive_rejects_p0_ge_q():
    with pytest.raises(ParameterError, match="p0 < q"):
        derive(4, 1, 2, 1, 3)


@pytest.mark.parametrize("raw, needle", [
    ((1, 1, 2, 2, 4), "p0 > 1"),
    ((2, 1, 1, 2, 4), "p1"),
    ((2, 3, 2, 2, 4), "q0 <= q1"),
    ((2, Fraction(1, 2), 2, 2, 4), "q0 >= 1"),
    ((2, 1, 2, 2, "inf"), "q < inf"),
])
def test_derive_reports_failed_bound(raw, needle):
    with pytest.raises(ParameterError, match=needle):
        derive(*raw)


def test_regime_b_exists():
    P = derive(2, 2, 4, 2, 4)
    assert not P.regime_a
    assert P.r1_min < 1


exps = st.fractions(min_value=Fraction(11, 10), max_value=10, max_denominator=12)


@given(exps, exps, exps)
def test_alpha_identity_and_regime(p0, p1, dq):
    P = derive(p0, 1, p1, 2, p0 + dq)
    assert P.alpha == P.r * P.p1
    assert Exponent(1) / P.alpha == Exponent(1) / P.p0 - Exponent(1) / P.q
    assert P.regime_a == (P.r1_min >= 1)


# -- r1r2 -------------------------------------------------------------------------

def test_r1r2_examples(reference):
    assert r1r2_solve(reference, r1=2) == 2
    assert r1r2_solve(reference, r1=4) == INF
    assert r1r2_solve(reference, r1=3) == 6
    assert r1r2_solve(reference, r2=INF) == 4


def test_r1r2_no_solution(reference):
    with pytest.raises(NoSolution):
        r1r2_solve(reference, r1=5)
    with pytest.raises(NoSolution):
        r1r2_solve(reference, r1=0)


@given(st.sampled_from(PARAM_SETS), st.fractions(min_value=Fraction(1, 10), max_value=Fraction(99, 10), max_denominator=24))
def test_r1r2_involution(raw, r1):
    P = derive(*raw)
    if r1 > P.q.as_fraction():
        return
    r2 = r1r2_solve(P, r1=r1)
    assert r1r2_solve(P, r2=r2) == r1
    assert scaling_holds(P, r1, r2)


# -- Lorentz pairs ----------------------------------------------------------------

@pytest.mark.parametrize("p, s, normable", [
    (1, 1, True), (1, 2, False), (2, 1, True), (2, INF, True),
    (INF, INF, True), (INF, 2, False), (Fraction(1, 2), 1, False),
])
def test_normable(p, s, normable):
    assert LorentzSpec(p, s).normable is normable


def test_lorentz_spec_parse():
    assert LorentzSpec.parse("3/2,inf") == LorentzSpec(Exponent(3, 2), INF)
    with pytest.raises(SpecError):
        LorentzSpec.parse("2")
    with pytest.raises(SpecError):
        LorentzSpec(2, Fraction(1, 2))


@pytest.mark.parametrize("X, p0, expected", [((2, INF), 2, True), ((2, 2), 2, False), ((3, 1), 2, True),
                                              ((INF, INF), 2, True), ((Fraction(3, 2), INF), 2, False)])
def test_nontrivial_downgrade(X, p0, expected):
    assert nontrivial_downgrade(LorentzSpec(*X), p0) is expected


# -- verdicts -----------------------------------------------------------------------

def test_verdict_R_examples(reference):
    v = verdict_R(reference, 2, 2, 2, INF)
    assert (v.bounded, v.clause) == (True, "R-i")
    assert not verdict_R(reference, 3, 2, 6, 1).bounded
    v = verdict_R(reference, 3, 2, 5, 3)
    assert (v.bounded, v.clause) == (False, "R-r1r2")


def test_verdict_S_examples(reference):
    v = verdict_S(reference, Fraction(4, 3), 1, 1, 1)
    assert (v.bounded, v.clause) == (True, "S-A-i")
    v = verdict_S(reference, 3, 2, 6, 1)
    assert not v.bounded and v.witness_family == "logpow"
    v = verdict_S(reference, 4, 1, INF, INF)
    assert (v.bounded, v.clause) == (True, "S-A-iii")


def test_verdict_combined_examples(reference):
    assert (verdict_combined(reference, 2, 2, 2, INF).clause, verdict_combined(reference, 2, 2, 2, INF).bounded) == ("C-i", True)
    v = verdict_combined(reference, 3, 2, 6, 3)
    assert (v.bounded, v.clause) == (True, "C-ii")
    v = verdict_combined(reference, 4, 2, INF, INF)
    assert (v.bounded, v.clause) == (False, "C-iii")


def test_S_at_q_needs_infinite_target(reference):
    v = verdict_S(reference, 4, 1, None, 1)
    assert not v.bounded


def test_regime_b_lower_endpoint():
    P = derive(2, 2, 4, 2, 4)
    v = verdict_S(P, 1, 1, None, 3)
    assert (v.bounded, v.clause) == (True, "S-B-i")


def test_verdict_rejects_non_normable(reference):
    with pytest.raises(NonNormable):
        verdict_R(reference, 1, 2, 1, 1)
    with pytest.raises(NonNormable):
        verdict_S(reference, 3, 2, INF, 2)


@pytest.mark.parametrize("raw", PARAM_SETS)
def test_R_below_p0_unbounded(raw):
    P = derive(*raw)
    for k in range(12, int(P.p0.as_fraction() * 12)):  # normable domains only
        r1 = Fraction(k, 12)
        for s1 in LATTICE:
            if r1 == 1 and s1 != 1:
                continue
            assert not verdict_R(P, r1, s1, None, 2).bounded


def test_verdict_clauses_are_known(reference):
    for v in (verdict_R(reference, 3, 1, None, 2), verdict_S(reference, 3, 1, None, 2),
              verdict_combined(reference, 3, 1, None, 2)):
        assert v.clause in CLAUSES
        assert v.to_dict()["condition"] == CLAUSES[v.clause]
    with pytest.raises(ValueError):
        Verdict(True, "Z-ix")


def lattice_points(P):
    low = max(Fraction(1), P.r1_min.as_fraction())
    for k in range(math.ceil(low * 12), int(P.q.as_fraction() * 12) + 1):
        r1 = Exponent(k, 12)
        r2 = r1r2_solve(P, r1=r1)
        for s1 in LATTICE:
            for s2 in LATTICE:
                if (r2.infinite and not s2.infinite) or (r2 == 1 and s2 != 1):
                    continue
                if r1 == 1 and s1 != 1:
                    continue
                yield r1, s1, r2, s2


def test_combined_is_conjunction_on_lattice():
    points = 0
    regimes = set()
    for raw in PARAM_SETS + [(2, 2, 2, 2, 3)]:
        P = derive(*raw)
        regimes.add(P.regime_a)
        for r1, s1, r2, s2 in lattice_points(P):
            points += 1
            c = verdict_combined(P, r1, s1, r2, s2).bounded
            assert c == (verdict_R(P, r1, s1, r2, s2).bounded and verdict_S(P, r1, s1, r2, s2).bounded), (raw, r1, s1, s2)
    assert points >= 500
    assert regimes == {True, False}
