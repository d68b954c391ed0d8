"""Fast invariant suite behind ``lorentz-calderon selftest``.

Each check returns ``(ok, detail)``; the runner prints one line per check in a
fixed order so the output is byte-identical across runs.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, List, Tuple

import numpy as np

from . import calderon as cal
from . import kfunc, lorentz
from .families import corpus, counterexample_table
from .params import INF, Exponent, derive, r1r2_solve, verdict_combined, verdict_R, verdict_S
from .rearrange import distribution, rearrange
from .stepfn import StepFunction, add, excess, truncate_level

SELFTEST_PARAMS = [(2, 2, 2, 2, 4), (2, 2, 2, 2, 3), (2, 2, 4, 2, 4), (Fraction(3, 2), 1, 2, 3, 3)]
EXPONENT_LATTICE = [Exponent(1), Exponent(3, 2), Exponent(2), Exponent(4), INF]


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def check_param_examples():
    P = derive(2, 2, 2, 2, 4)
    ok = (P.r, P.alpha, P.r1_min, P.regime_a) == (2, 4, Fraction(4, 3), True)
    ok &= r1r2_solve(P, r1=3) == 6 and r1r2_solve(P, r1=4) == INF and r1r2_solve(P, r1=2) == 2
    return ok, f"r={P.r} alpha={P.alpha} r1_min={P.r1_min}"


def check_verdict_lattice():
    points = mismatches = 0
    for raw in SELFTEST_PARAMS:
        P = derive(*raw)
        low = max(Fraction(1), P.r1_min.as_fraction())
        for k in range(math.ceil(low * 12), int(P.q.as_fraction() * 12) + 1):
            r1 = Exponent(k, 12)
            r2 = r1r2_solve(P, r1=r1)
            for s1 in EXPONENT_LATTICE:
                for s2 in EXPONENT_LATTICE:
                    if (r2.infinite and not s2.infinite) or (r2 == 1 and s2 != 1) or r2 < 1:
                        continue
                    if r1 == 1 and s1 != 1:
                        continue
                    points += 1
                    c = verdict_combined(P, r1, s1, r2, s2).bounded
                    if c != (verdict_R(P, r1, s1, r2, s2).bounded and verdict_S(P, r1, s1, r2, s2).bounded):
                        mismatches += 1
    return mismatches == 0 and points >= 500, f"{points} points, {mismatches} mismatches"


def check_truncation_split():
    bad = 0
    for f in corpus(0, 12):
        for c in np.unique(f.values):
            if not add(truncate_level(f, c), excess(f, c)).equals(f):
                bad += 1
    return bad == 0, f"{bad} inexact splits"


def check_equimeasurable():
    bad = 0
    for f in corpus(1, 12):
        fs = rearrange(f)
        for lam in np.concatenate(([0.0], np.unique(f.values))):
            if distribution(f, lam) != distribution(fs, lam):
                bad += 1
    return bad == 0, f"{bad} mismatches"


def check_endpoint_identity():
    worst = 0.0
    for raw in SELFTEST_PARAMS[:3]:
        P = derive(*raw)
        for f in corpus(2, 8):
            S = cal.op_S(f, P)
            worst = max(worst, _rel(S(0.0), lorentz.lorentz_norm(f, (P.q, 1))))
    return worst <= 1e-10, f"max rel err {worst:.3e}"


def check_fubini():
    P = derive(2, 2, 2, 2, 4)
    f = StepFunction.indicator(0, 1)
    err = _rel(cal.output_norm(cal.op_S(f, P), (1, 1)), 4 / 3)
    return err <= 1e-6, f"rel err {err:.3e}"


def check_downgrade_identity():
    worst = 0.0
    P = derive(2, 2, 2, 2, 4)
    for f in corpus(3, 8):
        worst = max(worst, _rel(lorentz.downgrade_norm(f, (P.p0, INF), P.p0, P.q0), lorentz.lorentz_norm(f, (P.p0, P.q0))))
    return worst <= 1e-10, f"max rel err {worst:.3e}"


def check_holmstedt_identity():
    worst = 0.0
    P = derive(2, 2, 2, 2, 4)
    p1 = float(P.p1)
    for f in corpus(4, 6):
        R, S = cal.op_R(f, P), cal.op_S(f, P)
        for t in np.logspace(-2, 2, 9):
            rhs = t * (R(t ** p1) + S(t ** p1))
            worst = max(worst, _rel(kfunc.holmstedt_domain(f, t, P), rhs))
    return worst <= 1e-10, f"max rel err {worst:.3e}"


def check_kfunc_concavity():
    P = derive(2, 2, 2, 2, 4)
    ts = np.logspace(-3, 3, 25)
    bad = 0
    for couple in (kfunc.domain_couple(P), kfunc.target_couple(2, 2)):
        for f in corpus(5, 4, monotone_only=True):
            K = kfunc.oracle_K_profile(f, ts, couple, ppd=8)
            bad += int(np.any(np.diff(K) < 0)) + int(np.any(np.diff(K / ts) > 1e-12 * (K / ts)[1:]))
    return bad == 0, f"{bad} violations"


def check_counterexample():
    rows = counterexample_table(derive(2, 2, 2, 2, 4), [1e2, 1e4, 1e8, 1e16])
    nf = np.array([r.norm_f0 for r in rows])
    ns = np.array([r.truncated_S_norm for r in rows])
    inc = np.diff(nf)
    ok = bool(np.all(inc > 0) and np.all(np.diff(inc) < 0) and np.all(np.diff(ns) > 0))
    spread = abs(rows[-1].loglog_ratio - rows[-2].loglog_ratio) / rows[-1].loglog_ratio
    return ok and spread < 0.2, f"loglog spread {spread:.3f}"


CHECKS: List[Tuple[str, Callable]] = [
    ("params.examples", check_param_examples),
    ("params.verdict_lattice", check_verdict_lattice),
    ("stepfn.truncation_split", check_truncation_split),
    ("rearrange.equimeasurable", check_equimeasurable),
    ("calderon.endpoint_identity", check_endpoint_identity),
    ("calderon.fubini", check_fubini),
    ("lorentz.downgrade_identity", check_downgrade_identity),
    ("kfunc.holmstedt_identity", check_holmstedt_identity),
    ("kfunc.oracle_concavity", check_kfunc_concavity),
    ("families.counterexample", check_counterexample),
]


def run(stream) -> int:
    failures = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # report, keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        stream.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
        if not ok:
            failures.append(name)
    stream.write(f"# {len(CHECKS) - len(failures)}/{len(CHECKS)} checks passed\n")
    if failures:
        stream.write("# failed: " + ", ".join(failures) + "\n")
    return 1 if failures else 0
