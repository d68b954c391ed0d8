import math

import numpy as np
import pytest

from lorentz_calderon.errors import NonNormable, SpecError
from lorentz_calderon.families import (
    FamilySpec,
    corpus,
    counterexample_table,
    generate,
    logpow_profile,
    parse_function,
    pow_profile,
    randmono,
    sweep_ratio,
)
from lorentz_calderon.lorentz import lorentz_norm
from lorentz_calderon.stepfn import StepFunction


def test_char_literal():
    assert parse_function("char:0,1") == StepFunction.indicator(0, 1)


def test_step_literal():
    f = parse_function("step:1,2;3,0.5")
    assert f == StepFunction([1, 3], [2, 0.5])


def test_logpow_is_one_near_zero():
    f = parse_function("logpow:3,1,1e4")
    assert np.all(f(np.array([1e-6, 1e-3, 0.5, 1.0])) == 1.0)
    # beyond the knee it follows the profile at the left end of each cell
    x = float(f.breakpoints[5])
    assert f(x) == pytest.approx(x ** (-1 / 3) / math.log(math.e - 1 + x), rel=1e-14)


def test_profiles_dominate_on_cells():
    f = pow_profile(0.5, 4.0, 100.0, 16)
    t = np.geomspace(1e-4, 99.9, 400)
    assert np.all(f(t) >= np.minimum(4.0, t ** -0.5) * (1 - 1e-15))
    g = logpow_profile(3.0, 1.0, 1e3, 16)
    t = np.geomspace(1.01, 999, 400)
    assert np.all(g(t) >= t ** (-1 / 3) / np.log(math.e - 1 + t) * (1 - 1e-15))


def test_randmono_reproducible_and_distinct():
    fam = FamilySpec.parse("randmono:7", count=2)
    a, b = generate(fam), generate(fam)
    assert a == b
    assert a[0] != a[1]
    assert all(f.is_nonincreasing() for f in a)
    assert randmono(7) == a[0]


def test_corpus_deterministic():
    assert corpus(3, 12) == corpus(3, 12)
    assert all(f.is_nonincreasing() for f in corpus(3, 12, monotone_only=True))


@pytest.mark.parametrize("text", [
    "circle:1", "char", "char:1", "char:a,b", "char:2,1", "pow:1:2", "logpow:3,1",
    "randmono:x", "step:1,2;1,3", "char:0,inf",
])
def test_parse_errors(text):
    with pytest.raises(SpecError):
        parse_function(text)


@pytest.mark.parametrize("text", ["circle:1", "char", "pow:1:2", "logpow:3,1", "randstep:z"])
def test_family_parse_errors(text):
    with pytest.raises(SpecError):
        FamilySpec.parse(text)


def test_family_count_must_be_positive():
    with pytest.raises(SpecError):
        FamilySpec("char", (0.0, 1.0), count=0)


def test_member_growth_parameters():
    assert FamilySpec.parse("char:0,1", count=3).member_params() == [1.0, 2.0, 4.0]
    assert FamilySpec.parse("logpow:3,1,10", count=3).member_params() == [10.0, 100.0, 10000.0]
    assert FamilySpec.parse("step:1,1", count=5).count == 1


def test_sweep_S_endpoint_equality(reference):
    rep = sweep_ratio("S", (4, 1), ("inf", "inf"), FamilySpec.parse("char:0,1", count=5), reference)
    assert all(abs(r.ratio - 1.0) <= 1e-10 for r in rep.rows)
    assert not rep.increasing


def test_sweep_R_bracket(reference):
    rep = sweep_ratio("R", (2, 2), (2, "inf"), FamilySpec.parse("char:0,1", count=6), reference)
    ratios = [r.ratio for r in rep.rows]
    assert max(ratios) / min(ratios) < 10


def test_sweep_logpow_growth(reference):
    rep = sweep_ratio("S", (3, 2), (6, 1), FamilySpec.parse("logpow:3,1,100", count=4), reference)
    assert rep.increasing
    assert rep.argmax == 3
    assert "growth witness" in rep.label


def test_sweep_rejects_bad_input(reference):
    fam = FamilySpec.parse("char:0,1")
    with pytest.raises(NonNormable):
        sweep_ratio("S", ("1/2", 1), (6, 1), fam, reference)
    with pytest.raises(SpecError):
        sweep_ratio("T", (3, 2), (6, 1), fam, reference)


def test_counterexample_growth(reference):
    rows = counterexample_table(reference, [1e2, 1e4, 1e8, 1e16], 3, 2, 1)
    nf = np.array([r.norm_f0 for r in rows])
    ns = np.array([r.truncated_S_norm for r in rows])
    inc = np.diff(nf)
    assert np.all(inc > 0) and np.all(np.diff(inc) < 0)
    assert np.all(np.diff(ns) > 0) and np.all(np.diff(np.diff(ns)) > 0)
    assert abs(rows[-1].loglog_ratio - rows[-2].loglog_ratio) / rows[-1].loglog_ratio < 0.2


def test_counterexample_rejects_small_T(reference):
    with pytest.raises(SpecError):
        counterexample_table(reference, [2.0])


def test_logpow_norm_converges(reference):
    norms = [lorentz_norm(logpow_profile(3, 1, B), (3, 2)) for B in (1e2, 1e4, 1e8, 1e16)]
    assert np.all(np.diff(norms) > 0) and np.all(np.diff(np.diff(norms)) < 0)
