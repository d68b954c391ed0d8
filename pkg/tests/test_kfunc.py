import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import PARAM_SETS, rel_err, step_functions
from lorentz_calderon import calderon as cal
from lorentz_calderon.kfunc import (
    bracket,
    decomposition_table,
    domain_couple,
    holmstedt_domain,
    holmstedt_target,
    oracle_K,
    oracle_K_profile,
    target_couple,
)
from lorentz_calderon.lorentz import lorentz_norm
from lorentz_calderon.params import derive
from lorentz_calderon.stepfn import StepFunction

CHI = StepFunction.indicator(0, 1)
TS = np.logspace(-3, 3, 25)


def couples(P):
    return [domain_couple(P), target_couple(P.p1, P.q1)]


def test_holmstedt_domain_examples(reference):
    assert holmstedt_domain(CHI, 1.0, reference) == pytest.approx(1.0, rel=1e-15)
    # (1/2)^2 + 4 (1/2) (1 - (1/16)^(1/4))
    assert holmstedt_domain(CHI, 0.5, reference) == pytest.approx(1.25, rel=1e-14)
    assert holmstedt_domain(StepFunction.zero(), 0.5, reference) == 0.0
    with pytest.raises(ValueError):
        holmstedt_domain(CHI, 0.0, reference)


def test_holmstedt_target_examples():
    assert holmstedt_target(CHI, 0.5, 2, 2) == pytest.approx(0.5, rel=1e-15)
    assert holmstedt_target(CHI, 10.0, 2, 2) == pytest.approx(lorentz_norm(CHI, (2, 2)), rel=1e-15)
    assert holmstedt_target(StepFunction.zero(), 0.5, 2, 2) == 0.0


def test_oracle_examples(reference):
    assert oracle_K(CHI, 0.5, target_couple(2, 2)) == pytest.approx(0.5, rel=1e-15)
    for c in couples(reference):
        assert oracle_K(CHI, 1e9, c) == pytest.approx(lorentz_norm(CHI, c.X), rel=1e-15)
        assert oracle_K(StepFunction.zero(), 0.5, c) == 0.0


@pytest.mark.parametrize("params", PARAM_SETS, ids=lambda p: "/".join(map(str, p)))
def test_holmstedt_matches_operator_sum(params, mixed_corpus):
    P = derive(*params)
    p1 = float(P.p1)
    ts = np.logspace(-2, 2, 50)
    for f in mixed_corpus:
        R, S = cal.op_R(f, P), cal.op_S(f, P)
        x = np.power(ts, p1)
        rhs = ts * (np.asarray(R(x)) + np.asarray(S(x)))
        lhs = np.array([holmstedt_domain(f, t, P) for t in ts])
        assert np.max(np.abs(lhs - rhs) / rhs) <= 1e-10


def test_oracle_concavity(reference, monotone_corpus):
    for c in couples(reference):
        for f in monotone_corpus[:8]:
            K = oracle_K_profile(f, TS, c)
            assert np.all(np.diff(K) >= 0)
            q = K / TS
            assert np.all(np.diff(q) <= 4 * np.spacing(q[:-1]))


def test_oracle_trivial_split_bounds(reference, mixed_corpus):
    for c in couples(reference):
        for f in mixed_corpus[:8]:
            K = oracle_K_profile(f, TS, c)
            assert np.all(K <= lorentz_norm(f, c.X))
            assert np.all(K <= TS * lorentz_norm(f, c.Y))


@settings(max_examples=25, deadline=None)
@given(step_functions(max_cells=8))
def test_oracle_bounds_property(f):
    P = derive(2, 2, 2, 2, 4)
    for c in couples(P):
        tab = decomposition_table(f, c, 8)
        K = oracle_K_profile(f, TS, c, table=tab)
        assert np.all(K <= lorentz_norm(f, c.X))
        assert np.all(np.diff(K) >= 0)


def test_bracket_singleton_contains_one(reference):
    for c in couples(reference):
        lo, hi = bracket([CHI], TS, c)
        assert 0.25 <= lo <= 1.0 <= hi <= 4.0


def test_bracket_examples(reference, monotone_corpus):
    lo, hi = bracket(monotone_corpus, TS, target_couple(2, 2))
    assert hi / lo < 10
    lo, hi = bracket(monotone_corpus, TS, domain_couple(reference))
    assert 0 < lo and hi / lo < 100


def test_bracket_rejects_empty():
    with pytest.raises(ValueError):
        bracket([StepFunction.zero()], TS, target_couple(2, 2))


@pytest.mark.parametrize("which", ["domain", "target"])
def test_bracket_stable_under_refinement(reference, monotone_corpus, which):
    c = domain_couple(reference) if which == "domain" else target_couple(3, 2)
    a = bracket(monotone_corpus, TS, c, 32)
    b = bracket(monotone_corpus, TS, c, 64)
    assert rel_err(a[0], b[0]) < 0.05 and rel_err(a[1], b[1]) < 0.05


def test_target_couple_infinite_q1():
    g = StepFunction([1.0, 3.0], [2.0, 1.0])
    # sup_{s < t^p1} s^(1/p1) g*(s) with p1 = 2, t = 1.5: s < 2.25 gives max(1*2, sqrt(2.25)*1)
    assert holmstedt_target(g, 1.5, 2, math.inf) == pytest.approx(2.0, rel=1e-15)
