"""K-functionals for the couples ``(L^{p0,q0}, L^{q,1})`` and ``(L^{p1,q1}, L^inf)``.

Closed forms of Holmstedt type are compared with a brute-force oracle that
minimizes ``||f0||_X + t ||f1||_Y`` over explicit decompositions ``f = f0 + f1``.
Each candidate decomposition contributes an affine function of ``t``, so the
oracle is a minimum of affine functions: concave and non-decreasing in ``t``
with ``K(t)/t`` non-increasing, exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .lorentz import DEFAULT_PPD, lorentz_norm
from .params import INF, Exponent, LorentzSpec, ParamSet, as_exponent
from .rearrange import rearrange
from .stepfn import StepFunction, excess, integrate_power, make_log_grid, truncate_level

__all__ = [
    "Couple",
    "domain_couple",
    "target_couple",
    "holmstedt_domain",
    "holmstedt_target",
    "decomposition_table",
    "oracle_K",
    "oracle_K_profile",
    "bracket",
]


@dataclass(frozen=True)
class Couple:
    name: str
    X: LorentzSpec
    Y: LorentzSpec
    params: Optional[ParamSet] = None

    def holmstedt(self, f: StepFunction, t: float) -> float:
        if self.name == "domain":
            return holmstedt_domain(f, t, self.params)
        return holmstedt_target(f, t, self.X.p, self.X.s)


def domain_couple(params: ParamSet) -> Couple:
    return Couple("domain", LorentzSpec(params.p0, params.q0), LorentzSpec(params.q, Exponent(1)), params)


def target_couple(p1, q1) -> Couple:
    return Couple("target", LorentzSpec(as_exponent(p1), as_exponent(q1)), LorentzSpec(INF, INF))


def holmstedt_domain(f: StepFunction, t: float, params: ParamSet) -> float:
    """``||f*||_{L^{p0,q0}(0,t^alpha)} + t int_(t^alpha)^inf s^(1/q-1) f*(s) ds``."""
    t = float(t)
    if not t > 0:
        raise ValueError("t must be positive")
    fs = rearrange(f)
    if fs.is_zero:
        return 0.0
    x = t ** float(params.alpha)
    head = lorentz_norm(fs, LorentzSpec(params.p0, params.q0), T=x)
    tail = integrate_power(fs, float(Exponent(1) / params.q), x, math.inf)
    return head + t * tail


def holmstedt_target(g: StepFunction, t: float, p1, q1) -> float:
    """``(int_0^(t^p1) s^(q1/p1-1) g*(s)^q1 ds)^(1/q1)``; supremum form when ``q1 = inf``."""
    t = float(t)
    if not t > 0:
        raise ValueError("t must be positive")
    p1, q1 = as_exponent(p1), as_exponent(q1)
    return lorentz_norm(g, LorentzSpec(p1, q1), T=t ** float(p1))


def _shift_left(fs: StepFunction, s: float) -> StepFunction:
    """Rearrangement of ``f* chi_[s, inf)``, i.e. ``tau -> f*(tau + s)``."""
    b = fs.breakpoints
    k = np.searchsorted(b, s, side="right")
    if k >= b.size:
        return StepFunction.zero()
    return StepFunction(b[k:] - s, fs.values[k:])


def _cut_head(fs: StepFunction, s: float) -> StepFunction:
    """``f* chi_(0, s)``."""
    b = fs.breakpoints
    k = np.searchsorted(b, s, side="left")
    if k >= b.size:
        return fs
    return StepFunction(np.append(b[:k], s), fs.values[: k + 1])


def decomposition_table(f: StepFunction, couple: Couple, ppd: int = DEFAULT_PPD) -> np.ndarray:
    """Rows ``(||f0||_X, ||f1||_Y)`` for every candidate split of ``f*``.

    Level cuts ``f1 = min(f*, c)``, ``f0 = (f* - c)_+`` for ``c`` in ``{0}``, the
    values of ``f`` and a geometric level grid; support cuts
    ``f0 = f* chi_(0,s)``, ``f1 = f* chi_[s,inf)`` for ``s`` at the breakpoints of
    ``f*`` and on a log grid over the support.
    """
    fs = rearrange(f)
    if fs.is_zero:
        return np.zeros((1, 2))
    X, Y = couple.X, couple.Y
    vals = np.unique(fs.values[fs.values > 0])
    levels = [0.0, *vals.tolist()]
    if vals[-1] > vals[0]:
        # geometric levels over at most 30 decades below the maximum; every value of f is a level anyway
        levels.extend(make_log_grid(max(vals[0], vals[-1] * 1e-30), vals[-1], ppd).tolist())
    vmin = float(vals[0])
    levels.extend((vmin * 10.0 ** (-np.arange(1, ppd + 1) / ppd)).tolist())
    rows = []
    for c in sorted(set(levels)):
        f1 = truncate_level(fs, c)
        f0 = excess(fs, c)
        rows.append((lorentz_norm(f0, X), lorentz_norm(f1, Y)))
    b1, bn = float(fs.breakpoints[0]), float(fs.breakpoints[-1])
    cuts = set(fs.breakpoints.tolist())
    cuts.update(make_log_grid(b1 / 1e3, bn, ppd).tolist())
    for s in sorted(cuts):
        rows.append((lorentz_norm(_cut_head(fs, s), X), lorentz_norm(_shift_left(fs, s), Y)))
    return np.asarray(rows, dtype=np.float64)


def oracle_K_profile(f: StepFunction, ts: Sequence[float], couple: Couple, ppd: int = DEFAULT_PPD, table=None) -> np.ndarray:
    """``min_i (a_i + t b_i)`` over the decomposition table, for every ``t`` in ``ts``."""
    tab = decomposition_table(f, couple, ppd) if table is None else table
    ts = np.asarray(ts, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        cand = tab[:, :1] + ts[None, :] * tab[:, 1:2]
    cand = np.where(np.isnan(cand), np.inf, cand)
    return cand.min(axis=0)


def oracle_K(f: StepFunction, t: float, couple: Couple, ppd: int = DEFAULT_PPD) -> float:
    t = float(t)
    if not t > 0:
        raise ValueError("t must be positive")
    return float(oracle_K_profile(f, [t], couple, ppd)[0])


def bracket(corpus: Iterable[StepFunction], tgrid: Sequence[float], couple: Couple, ppd: int = DEFAULT_PPD) -> Tuple[float, float]:
    """Extremal ratios ``oracle_K / holmstedt`` over all ``(f, t)``."""
    lo, hi = math.inf, 0.0
    count = 0
    for f in corpus:
        if rearrange(f).is_zero:
            continue
        K = oracle_K_profile(f, tgrid, couple, ppd)
        H = np.array([couple.holmstedt(f, t) for t in tgrid])
        ratio = K / H
        lo = min(lo, float(ratio.min()))
        hi = max(hi, float(ratio.max()))
        count += 1
    if count == 0:
        raise ValueError("bracket needs a nonempty corpus of nonzero functions")
    return lo, hi
