import math

import numpy as np
import pytest

from lorentz_calderon import calderon as cal
from lorentz_calderon import calibrate
from lorentz_calderon.errors import DegenerateInput, ParameterError
from lorentz_calderon.lorentz import lorentz_norm
from lorentz_calderon.params import INF, derive, r1r2_solve
from lorentz_calderon.rearrange import maximal, rearrange
from lorentz_calderon.stepfn import StepFunction, dilate

from conftest import PARAM_SETS, rel_err

CHI = StepFunction.indicator(0, 1)
ZERO = StepFunction.zero()


def test_R_examples(reference):
    R = cal.op_R(CHI, reference)
    assert R(1.0) == pytest.approx(1.0, rel=1e-15)
    assert R(4.0) == pytest.approx(0.5, rel=1e-15)
    Z = cal.op_R(ZERO, reference)
    assert np.all(Z(np.logspace(-3, 3, 7)) == 0)


def test_R_sup_branch():
    P = derive(2, INF, 2, INF, 4)
    R = cal.op_R(StepFunction([1, 4], [2, 1]), P)
    # t^(-1/2) sup_{s < t^2} s^(1/2) f*(s): at t = 3, t^2 = 9, sup is max(2*1, 1*2) = 2
    assert R(3.0) == pytest.approx(2 / math.sqrt(3), rel=1e-15)


def test_S_examples(reference):
    S = cal.op_S(CHI, reference)
    assert S(0.25) == pytest.approx(2.0, rel=1e-14)
    assert S(1.0) == 0
    assert S(1e-8) == pytest.approx(4.0 * (1.0 - 1e-4), rel=1e-12)  # 4 (1 - t^(r/4))
    assert S(0.0) == pytest.approx(4.0, rel=1e-15)


def test_S_is_S1_of_rearrangement(reference, mixed_corpus):
    ts = np.logspace(-3, 2, 40)
    for f in mixed_corpus:
        assert np.array_equal(cal.op_S(f, reference)(ts), cal.op_S1(rearrange(f), reference)(ts))


def test_recovery_examples(reference):
    T = cal.op_recovery(CHI, reference)
    assert T(2.0) == pytest.approx(math.sqrt(2) / 4, rel=1e-15)
    assert T(0.5) == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert np.all(cal.op_recovery(ZERO, reference)(np.array([0.1, 1, 10])) == 0)


def test_Y_examples():
    P = derive(2, 1, 2, 2, 4)
    Y = cal.op_Y(CHI, P)
    assert Y(0.5) == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert Y(2.0) == 0
    with pytest.raises(ParameterError):
        cal.op_Y(CHI, derive(2, 2, 2, 2, 4))


@pytest.mark.parametrize("raw", [(2, 1, 2, INF, 4), (2, 2, 4, INF, 4), (3, 1, 2, INF, 5), (2, "3/2", 3, INF, 3)])
def test_Y_endpoint_is_scaled_R(mixed_corpus, raw):
    P = derive(*raw)
    scale = float(P.r) ** (-1.0 / float(P.q0))
    ts = np.logspace(-3, 3, 61)
    for f in mixed_corpus:
        y, r = cal.op_Y(f, P)(ts), cal.op_R(f, P)(ts)
        assert np.allclose(y, scale * r, rtol=1e-13, atol=0)


def test_Y_endpoint_equals_R_when_r_is_one(mixed_corpus):
    P = derive(2, 2, 4, INF, 4)
    assert P.r == 1
    ts = np.logspace(-3, 3, 61)
    for f in mixed_corpus:
        y, r = cal.op_Y(f, P)(ts), cal.op_R(f, P)(ts)
        assert np.all(np.abs(y - r) <= 2 * np.spacing(np.maximum(np.abs(r), 1e-300)))


def test_Y_diagonal_formula(monotone_corpus):
    P = derive(2, 2, 2, 2, 4)
    ts = np.logspace(-2, 2, 41)
    e = float((P.r * P.p1 - P.p0) / (P.p0 * P.p1))
    for f in monotone_corpus:
        diag = cal.op_Y_diagonal(f, P)(ts)
        assert np.allclose(diag, ts ** e * f(ts ** float(P.r)), rtol=1e-15, atol=0)
        # f* <= f** makes the diagonal formula a minorant of the recovery operator
        assert np.all(diag <= cal.op_recovery(f, P)(ts) * (1 + 1e-12))
        assert np.allclose(cal.op_recovery(f, P)(ts), ts ** e * maximal(f)(ts ** float(P.r)), rtol=1e-15, atol=0)


@pytest.mark.parametrize("op", sorted(cal.OPERATORS))
def test_samples_match_evaluator(mixed_corpus, op):
    P = derive(2, 1, 2, 2, 4)
    for f in mixed_corpus[:8]:
        out = cal.apply(op, f, P)
        left = out.samples.left_endpoints
        exact = np.asarray(out(left))
        assert np.all(np.abs(out.samples.values - exact) <= 2 * np.spacing(np.maximum(exact, 1e-300)))


def test_unknown_operator(reference):
    with pytest.raises(ValueError):
        cal.apply("T3", CHI, reference)


# -- identities ------------------------------------------------------------------------

@pytest.mark.parametrize("raw", PARAM_SETS)
def test_S_nonincreasing_and_endpoint(mixed_corpus, raw):
    P = derive(*raw)
    for f in mixed_corpus:
        S = cal.op_S(f, P)
        vals = S.samples.values
        # evaluator rounding may tick up by a few ulp
        assert np.all(np.diff(vals) <= 4 * np.spacing(vals[:-1]))
        assert rel_err(S(0.0), lorentz_norm(f, (P.q, 1))) <= 1e-10


@pytest.mark.parametrize("raw", PARAM_SETS)
def test_fubini_identity(mixed_corpus, raw):
    P = derive(*raw)
    if P.r1_min < 1:
        pytest.skip("regime B: the weight exponent leaves the normable range")
    for f in mixed_corpus[:10]:
        exact = lorentz_norm(f, (P.r1_min, 1))
        e32 = rel_err(cal.output_norm(cal.op_S(f, P, ppd=32), (1, 1)), exact)
        e64 = rel_err(cal.output_norm(cal.op_S(f, P, ppd=64), (1, 1)), exact)
        assert e32 <= 1e-6
        assert e64 < e32 or e64 <= 1e-13


def test_fubini_worked_value(reference):
    assert cal.output_norm(cal.op_S(CHI, reference), (1, 1)) == pytest.approx(4 / 3, rel=1e-6)
    assert lorentz_norm(CHI, (reference.r1_min, 1)) == pytest.approx(4 / 3, rel=1e-14)


@pytest.mark.parametrize("raw", PARAM_SETS)
def test_zmonot(mixed_corpus, raw):
    P = derive(*raw)
    for f in mixed_corpus:
        grid = cal.output_grid(f, P)
        z = cal.zmonot_profile(f, P, grid)
        assert np.all(np.diff(z) <= 1e-12 * z[:-1])


@pytest.mark.parametrize("raw, r1, s2", [((2, 2, 2, 2, 4), 3, 2), ((2, 2, 2, 2, 4), "5/2", 1),
                                         ((2, 1, 2, 2, 4), 3, INF), ((3, 1, 2, 3, 5), 4, 3)])
def test_scaling_laws(mixed_corpus, raw, r1, s2):
    P = derive(*raw)
    r2 = r1r2_solve(P, r1=r1)
    expo = -(1.0 / float(P.q) + 1.0 / float(P.r * r2))
    for f in mixed_corpus[:8]:
        for k in (-3, 5):
            # a grid-compatible factor for the source: the output grid shifts by exactly k cells
            lam = 10.0 ** (k * float(P.r) / 32)
            for op in (cal.op_R, cal.op_S):
                a = cal.output_norm(op(dilate(f, lam), P), (r2, s2))
                b = lam ** expo * cal.output_norm(op(f, P), (r2, s2))
                assert rel_err(a, b) <= 1e-6, (op.__name__, k)


@pytest.mark.parametrize("op", ["R", "S", "recovery", "Y"])
def test_output_norm_refinement(mixed_corpus, op):
    P = derive(2, 1, 2, 2, 4)
    for f in mixed_corpus[:10]:
        for spec in [(6, 2), (3, 1), (4, INF)]:
            a = cal.output_norm(cal.apply(op, f, P, ppd=32), spec)
            b = cal.output_norm(cal.apply(op, f, P, ppd=64), spec)
            assert rel_err(a, b) < 1e-3, (spec, a, b)


@pytest.mark.parametrize("raw, r1", calibrate.RQ0_CASES)
@pytest.mark.parametrize("s2", calibrate.RQ0_S2)
def test_norm_reduction_bracket(mixed_corpus, calibrated, raw, r1, s2):
    coarse = calibrate.rq0_ratios(mixed_corpus, raw, r1, s2, 32)
    fine = calibrate.rq0_ratios(mixed_corpus, raw, r1, s2, 64)
    spread = max(coarse) / min(coarse)
    assert spread < 10
    assert spread <= calibrated["constants"]["rq0_spread"][calibrate._name(*raw, r1, s2, "spread")]["frozen"]
    assert rel_err(min(fine), min(coarse)) < 0.05
    assert rel_err(max(fine), max(coarse)) < 0.05


# -- target-side functional -------------------------------------------------------------

def test_kint_target_examples(reference):
    assert cal.kint_target(CHI, reference, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert cal.kint_target(CHI, reference, 4.0) == pytest.approx(0.5, rel=1e-15)
    assert cal.kint_target(ZERO, reference, 2.0) == 0


def test_kint_degenerate(reference):
    with pytest.raises(DegenerateInput):
        cal.kint_ratio_profile("recovery", ZERO, reference)


@pytest.mark.parametrize("op, raw", [("recovery", (2, 2, 2, 2, 4)), ("Y", (2, 1, 2, 2, 4)), ("S1", (2, 2, 2, 2, 4))])
def test_kint_example_stable(op, raw):
    P = derive(*raw)
    a = cal.kint_ratio_profile(op, CHI, P, ppd=32)
    b = cal.kint_ratio_profile(op, CHI, P, ppd=64)
    assert math.isfinite(a) and a > 0
    assert rel_err(b, a) < 0.05
