"""Non-increasing rearrangement, distribution function and the running average f**.

Cell lengths are accumulated as exact rationals (every float is a dyadic
rational, so ``Fraction(b_i) - Fraction(b_{i-1})`` is exact) and converted
back with a single correctly rounded ``float()``.  As a consequence
``distribution(f, lam) == distribution(rearrange(f), lam)`` holds bitwise.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict

import numpy as np

from .stepfn import StepFunction, accurate_cumsum

__all__ = ["rearrange", "distribution", "MaximalFunction", "maximal", "dominated_maximal"]


def _exact_lengths(f: StepFunction):
    prev = Fraction(0)
    out = []
    for b in f.breakpoints.tolist():
        fb = Fraction(b)
        out.append(fb - prev)
        prev = fb
    return out


def rearrange(f: StepFunction) -> StepFunction:
    """Return ``f*``: values sorted in decreasing order, equal values merged."""
    if f.is_nonincreasing():
        return f.normalize()
    mass: Dict[float, Fraction] = {}
    for v, length in zip(f.values.tolist(), _exact_lengths(f)):
        if v > 0:
            mass[v] = mass.get(v, Fraction(0)) + length
    if not mass:
        return StepFunction.zero()
    levels = sorted(mass, reverse=True)
    acc = Fraction(0)
    bps, vals = [], []
    for v in levels:
        acc += mass[v]
        b = float(acc)
        if bps and b == bps[-1]:
            continue  # measure below one ulp of the running total: the cell has float length 0
        bps.append(b)
        vals.append(v)
    return StepFunction(bps, vals)


def distribution(f: StepFunction, lam: float) -> float:
    """Lebesgue measure of ``{f > lam}``."""
    lam = float(lam)
    total = Fraction(0)
    for v, length in zip(f.values.tolist(), _exact_lengths(f)):
        if v > lam:
            total += length
    return float(total)


class MaximalFunction:
    """Exact ``t -> f**(t) = (1/t) int_0^t f*``.

    Stores, for every cell of ``f*``, the integral up to the cell start and the
    cell value; evaluation is ``(C_i + v_i (t - b_{i-1})) / t``.
    """

    def __init__(self, f: StepFunction):
        fs = rearrange(f)
        self.rearranged = fs
        self.breakpoints = fs.breakpoints
        self.values = fs.values
        self.left = fs.left_endpoints
        cells = fs.values * fs.lengths
        self.cumulative = np.concatenate(([0.0], accurate_cumsum(cells)))
        self.total = float(math.fsum(cells.tolist()))

    def integral(self, t):
        """``int_0^t f*``; vectorized."""
        t = np.asarray(t, dtype=np.float64)
        k = np.searchsorted(self.breakpoints, t, side="right")
        inside = k < self.breakpoints.size
        kk = np.minimum(k, self.breakpoints.size - 1)
        partial = self.cumulative[kk] + self.values[kk] * (t - self.left[kk])
        out = np.where(inside, partial, self.total)
        return float(out) if out.ndim == 0 else out

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(t > 0, self.integral(t) / np.where(t > 0, t, 1.0), self.values[0])
        return float(out) if out.ndim == 0 else out

    def kinks(self) -> np.ndarray:
        return self.breakpoints


def maximal(f: StepFunction) -> MaximalFunction:
    return MaximalFunction(f)


def dominated_maximal(f: StepFunction, g: StepFunction, rel: float = 0.0) -> bool:
    """Decide ``f**(t) <= g**(t)`` for every ``t > 0``.

    ``t f**(t)`` and ``t g**(t)`` are piecewise linear with kinks at the
    breakpoints of ``f*`` and ``g*``, so checking the merged kinks, the slopes
    at the origin and the totals is exact.
    """
    F, G = maximal(f), maximal(g)
    if F.values[0] > G.values[0] * (1 + rel):
        return False
    knots = np.union1d(F.breakpoints, G.breakpoints)
    fi, gi = F.integral(knots), G.integral(knots)
    return bool(np.all(fi <= gi * (1 + rel)))
