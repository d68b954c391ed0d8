"""Calderon-type operators on rearrangements, evaluated exactly at any point.

Every operator returns an :class:`OperatorOutput` holding

* ``evaluator`` - the exact pointwise value (closed form on the step
  function ``f*``), vectorized and valid at ``t = 0`` as the right limit;
* ``samples`` - a step function with the evaluator value at each cell's left
  endpoint on the output grid;
* enough structure (monotonicity, exact power tail) for :func:`output_norm`
  to compute Lorentz norms of the output.

Norms of non-increasing outputs (``S``, ``S1``) are computed with a composite
Gauss-Legendre rule in ``log t`` on the evaluator.  The other outputs are an
exact power below the first kink and an exact power tail (or zero) beyond the
last; in between they are fitted by a power law per grid cell, and the norm
comes from the closed-form distribution function of that profile.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._levels import LevelSet, interior_power_fit
from ._quad import log_gauss
from .errors import DegenerateInput, ParameterError
from .lorentz import DEFAULT_PPD, _spec, lorentz_norm
from .params import Exponent, ParamSet
from .rearrange import maximal, rearrange
from .stepfn import (
    PowerPrimitive,
    PowerSupremum,
    StepFunction,
    integrate_power,
    power,
)

__all__ = [
    "OperatorOutput",
    "PowerHead",
    "PowerTail",
    "output_grid",
    "op_R",
    "op_S1",
    "op_S",
    "op_recovery",
    "op_Y",
    "op_Y_diagonal",
    "OPERATORS",
    "apply",
    "output_norm",
    "kint_target",
    "kint_ratios",
    "kint_ratio_profile",
    "zmonot_profile",
    "claim1_ratio",
    "sup_hlp_ratio",
]

GRID_MARGIN = 1e3
TAIL_DECADES = 6


@dataclass(frozen=True)
class PowerTail:
    """``F(t) = constant * t^(-decay)`` for ``t >= start``."""

    start: float
    constant: float
    decay: Exponent


@dataclass(frozen=True)
class PowerHead:
    """``F(t) = constant * t^exponent`` for ``0 < t <= end``."""

    end: float
    constant: float
    exponent: float


@dataclass(frozen=True, eq=False)
class OperatorOutput:
    name: str
    grid: np.ndarray
    evaluator: Callable
    samples: StepFunction
    nonincreasing: bool
    tail: Optional[PowerTail] = None
    ppd: int = DEFAULT_PPD
    meta: dict = field(default_factory=dict)
    head: Optional[PowerHead] = None

    def __call__(self, t):
        return self.evaluator(t)

    @property
    def ratio(self) -> float:
        g = self.grid
        return float(g[1] / g[0]) if g.size > 1 else 10.0 ** (1.0 / self.ppd)

    @functools.cached_property
    def resampled(self) -> StepFunction:
        """Geometric-midpoint step resampling, extended along the power tail."""
        g = self.grid
        rho = self.ratio
        edges = g
        if self.tail is not None:
            n_ext = TAIL_DECADES * self.ppd
            ext = g[-1] * 10.0 ** (np.arange(1, n_ext + 1) / self.ppd)
            edges = np.concatenate((g, ext))
        mids = np.sqrt(edges[:-1] * edges[1:])
        head = self.evaluator(g[0] / math.sqrt(rho))
        values = np.concatenate(([head], np.atleast_1d(self.evaluator(mids))))
        return StepFunction(edges, values)

    @functools.cached_property
    def rearranged(self) -> StepFunction:
        return rearrange(self.resampled)

    @functools.cached_property
    def level_set(self) -> LevelSet:
        """Distribution-function model: exact head, per-cell power fits, exact tail."""
        h, tail = self.head, self.tail
        g = self.grid
        body = g[(g >= h.end) & (g <= tail.start)]
        if body.size > 1:
            B, k = interior_power_fit(body, self.evaluator)
        else:
            body, B, k = body[:1], np.empty(0), np.empty(0)
        return LevelSet((h.end, h.constant, h.exponent), body, B, k,
                        (tail.start, tail.constant, float(tail.decay)))


def output_grid(source: StepFunction, params: ParamSet, ppd: int = DEFAULT_PPD) -> np.ndarray:
    """Log grid over ``[b_first^(1/r)/1e3, b_last^(1/r)*1e3]`` with ratio ``10^(1/ppd)`` plus kinks.

    The grid is anchored at its left end, so dilating the source by an exact
    power of the grid ratio dilates the grid accordingly.  The images
    ``b_i^(1/r)`` of all source breakpoints are inserted because the operator
    outputs have kinks there.
    """
    inv_r = 1.0 / float(params.r)
    b = source.breakpoints
    images = np.power(b, inv_r)
    lo = images[0] / GRID_MARGIN
    hi = images[-1] * GRID_MARGIN
    steps = max(1, math.ceil(ppd * math.log10(hi / lo) - 1e-9))
    base = lo * 10.0 ** (np.arange(steps + 1) / ppd)
    return np.union1d(base, images)


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def _build(name, source, params, F, nonincreasing, tail, ppd, grid=None, **meta):
    grid = output_grid(source, params, ppd) if grid is None else np.unique(np.asarray(grid, dtype=np.float64))
    left = np.concatenate(([0.0], grid[:-1]))
    samples = StepFunction(grid, np.atleast_1d(F(left)))
    head = None
    if not nonincreasing:
        # every non-monotone output is an exact power below the first kink
        inv_r = 1.0 / float(params.r)
        end = float(np.power(source.breakpoints[0], inv_r))
        e = float(params.r / params.p0 - Exponent(1) / params.p1)
        x = 0.5 * end
        head = PowerHead(end, float(F(x)) / x ** e, e)
        if tail is None:
            tail = PowerTail(float(np.power(source.breakpoints[-1], inv_r)), 0.0, Exponent(1) / params.p1)
    return OperatorOutput(name, grid, F, samples, nonincreasing, tail, ppd, dict(meta), head)


def _zero_output(name, ppd, grid=None):
    grid = np.array([1.0]) if grid is None else np.unique(np.asarray(grid, dtype=np.float64))

    def F(t):
        return _scalar(np.zeros_like(np.asarray(t, dtype=np.float64)))

    return OperatorOutput(name, grid, F, StepFunction(grid, np.zeros(grid.size)), True, None, ppd)


def _pos_power(t, e: float):
    """``t^e`` with ``0^e = 0`` for ``e > 0``."""
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return np.where(t > 0, np.power(np.where(t > 0, t, 1.0), e), 0.0 if e > 0 else np.inf)


def op_R(f: StepFunction, params: ParamSet, grid=None, ppd: int = DEFAULT_PPD) -> OperatorOutput:
    """``R f(t) = t^(-1/p1) (int_0^(t^r) s^(q0/p0-1) f*(s)^q0 ds)^(1/q0)``; sup form when ``q0 = inf``."""
    fs = rearrange(f)
    if fs.is_zero:
        return _zero_output("R", ppd, grid)
    r = float(params.r)
    inv_p1 = float(Exponent(1) / params.p1)
    if params.q0.infinite:
        sup = PowerSupremum(fs, float(Exponent(1) / params.p0))
        inner, total = sup, sup.total
    else:
        q0 = float(params.q0)
        prim = PowerPrimitive(power(fs, q0), float(params.q0 / params.p0))
        inner = lambda x: np.power(prim.head(x), 1.0 / q0)  # noqa: E731
        total = prim.total ** (1.0 / q0)

    def F(t):
        t = np.asarray(t, dtype=np.float64)
        safe = np.where(t > 0, t, 1.0)
        out = np.where(t > 0, np.power(safe, -inv_p1) * inner(np.power(safe, r)), 0.0)
        return _scalar(out)

    tail = PowerTail(float(np.power(fs.breakpoints[-1], 1.0 / r)), total, Exponent(1) / params.p1)
    return _build("R", fs, params, F, False, tail, ppd, grid)


def op_S1(f: StepFunction, params: ParamSet, grid=None, ppd: int = DEFAULT_PPD) -> OperatorOutput:
    """``S1 f(t) = int_(t^r)^inf s^(1/q-1) f(s) ds`` (no rearrangement); non-increasing in t."""
    if f.is_zero:
        return _zero_output("S1", ppd, grid)
    r = float(params.r)
    prim = PowerPrimitive(f, float(Exponent(1) / params.q))

    def F(t):
        t = np.asarray(t, dtype=np.float64)
        return _scalar(prim.tail(np.power(t, r)))

    return _build("S1", f, params, F, True, None, ppd, grid)


def op_S(f: StepFunction, params: ParamSet, grid=None, ppd: int = DEFAULT_PPD) -> OperatorOutput:
    """``S f = S1 f*``."""
    out = op_S1(rearrange(f), params, grid, ppd)
    return OperatorOutput("S", out.grid, out.evaluator, out.samples, True, None, out.ppd)


def op_recovery(f: StepFunction, params: ParamSet, grid=None, ppd: int = DEFAULT_PPD) -> OperatorOutput:
    """``t -> t^((r p1 - p0)/(p0 p1)) f**(t^r)``."""
    fs = rearrange(f)
    if fs.is_zero:
        return _zero_output("recovery", ppd, grid)
    r = float(params.r)
    e_exact = (params.r * params.p1 - params.p0) / (params.p0 * params.p1)
    e = float(e_exact)
    M = maximal(fs)

    def F(t):
        t = np.asarray(t, dtype=np.float64)
        return _scalar(_pos_power(t, e) * M(np.power(t, r)))

    tail = PowerTail(float(np.power(fs.breakpoints[-1], 1.0 / r)), M.total, params.r - e_exact)
    return _build("recovery", fs, params, F, False, tail, ppd, grid)


def op_Y(f: StepFunction, params: ParamSet, grid=None, ppd: int = DEFAULT_PPD) -> OperatorOutput:
    """``Y f(t) = (W(t^r)/r)^((q1-q0)/(q0 q1)) t^(r q0/(p0 q1) - 1/p1) f*(t^r)^(q0/q1)``.

    ``W(x) = int_0^x u^(q0/p0-1) f*(u)^q0 du``; the substitution ``u = s^r``
    turns the defining integral over ``(0, t)`` into ``W(t^r)/r``.  For
    ``q1 = inf`` the last factor is ``f*^0 = 1``.
    """
    p0, q0, p1, q1, r = params.p0, params.q0, params.p1, params.q1, params.r
    if not q0 < q1:
        raise ParameterError(f"Y needs q0 < q1 (got q0={q0}, q1={q1})")
    if q0.infinite:  # pragma: no cover - q0 < q1 <= inf excludes it
        raise ParameterError("Y needs q0 < inf")
    fs = rearrange(f)
    if fs.is_zero:
        return _zero_output("Y", ppd, grid)
    one = Exponent(1)
    outer = (one / q0 - one / q1)  # (q1 - q0)/(q0 q1), valid for q1 = inf too
    t_exp = float(r * q0 / (p0 * q1) - one / p1)
    last = float(q0 / q1)
    rf = float(r)
    prim = PowerPrimitive(power(fs, float(q0)), float(q0 / p0))
    outer_f = float(outer)

    def F(t):
        t = np.asarray(t, dtype=np.float64)
        safe = np.where(t > 0, t, 1.0)
        x = np.power(safe, rf)
        head = np.power(prim.head(x) / rf, outer_f)
        val = head * np.power(safe, t_exp)
        if last > 0:
            val = val * np.power(fs(x), last)
        return _scalar(np.where(t > 0, val, 0.0))

    if q1.infinite:
        tail = PowerTail(float(np.power(fs.breakpoints[-1], 1.0 / rf)), (prim.total / rf) ** outer_f, one / p1)
    else:
        tail = None
    return _build("Y", fs, params, F, False, tail, ppd, grid)


def op_Y_diagonal(f: StepFunction, params: ParamSet, grid=None, ppd: int = DEFAULT_PPD) -> OperatorOutput:
    """Formal ``q0 = q1`` limit of ``Y``: ``t^((r p1 - p0)/(p0 p1)) f*(t^r)``."""
    fs = rearrange(f)
    if fs.is_zero:
        return _zero_output("Y_diagonal", ppd, grid)
    r = float(params.r)
    e = float((params.r * params.p1 - params.p0) / (params.p0 * params.p1))

    def F(t):
        t = np.asarray(t, dtype=np.float64)
        return _scalar(_pos_power(t, e) * fs(np.power(t, r)))

    return _build("Y_diagonal", fs, params, F, False, None, ppd, grid)


OPERATORS = {
    "R": op_R,
    "S": op_S,
    "S1": op_S1,
    "recovery": op_recovery,
    "Y": op_Y,
}


def apply(op: str, f: StepFunction, params: ParamSet, grid=None, ppd: int = DEFAULT_PPD) -> OperatorOutput:
    try:
        fn = OPERATORS[op]
    except KeyError:
        raise ValueError(f"unknown operator {op!r}; choose from {sorted(OPERATORS)}") from None
    return fn(f, params, grid=grid, ppd=ppd)


# ---------------------------------------------------------------------------
# Norms of outputs
# ---------------------------------------------------------------------------

def _monotone_norm(out: OperatorOutput, p: Exponent, s: Exponent, T: float) -> float:
    F = out.evaluator
    f0 = float(F(0.0))
    if f0 == 0:
        return 0.0
    if p.infinite:
        return f0
    edges = out.grid[out.grid < T]
    if T < math.inf:
        edges = np.append(edges, T)
    rho = out.ratio
    inv_p = float(Exponent(1) / p)
    if s.infinite:
        pts = [edges]
        if edges.size > 1:
            pts.append(log_gauss(edges)[0])
        pts = np.concatenate(pts)
        return float(np.max(np.power(pts, inv_p) * F(pts)))
    sf = float(s)
    a = float(s / p)
    parts = []
    if edges.size > 1:
        nodes, w = log_gauss(edges)
        parts.extend((w * np.power(nodes, a - 1.0) * np.power(F(nodes), sf)).tolist())
    # below the grid: geometric cells down to where the remaining mass is negligible
    hi = float(edges[0])
    running = math.fsum(parts)
    for _ in range(4000):
        remainder = f0 ** sf * hi ** a / a
        if remainder <= 1e-18 * running:
            break
        lo_edges = hi * rho ** -np.arange(out.ppd, -1, -1, dtype=np.float64)
        nodes, w = log_gauss(lo_edges)
        chunk = (w * np.power(nodes, a - 1.0) * np.power(F(nodes), sf)).tolist()
        parts.extend(chunk)
        running += math.fsum(chunk)
        hi = float(lo_edges[0])
    parts.append(f0 ** sf * hi ** a / a)
    return math.fsum(parts) ** (1.0 / sf)


def output_norm(out: OperatorOutput, spec, T: float = math.inf) -> float:
    """``||out||_{L^{p,s}(0,T)}`` for an operator output (see module docstring).

    Truncation applies to the decreasing rearrangement: the result is the
    norm of ``(out)*`` restricted to ``(0, T)``.
    """
    spec = _spec(spec)
    T = float(T)
    p, s = spec.p, spec.s
    if out.nonincreasing:
        return _monotone_norm(out, p, s, T)
    if out.head is None:
        return 0.0
    return out.level_set.norm(float(p), float(s), T)


# ---------------------------------------------------------------------------
# Target-side functional and inequality statistics
# ---------------------------------------------------------------------------

def kint_target(g, params: ParamSet, t: float) -> float:
    """``t^(-1/p1) (int_0^t s^(q1/p1-1) g*(s)^q1 ds)^(1/q1)``, sup form at ``q1 = inf``.

    ``g`` may be a :class:`StepFunction` (exact) or an :class:`OperatorOutput`.
    """
    t = float(t)
    if not t > 0:
        raise ValueError("t must be positive")
    spec = (params.p1, params.q1)
    if isinstance(g, OperatorOutput):
        val = output_norm(g, spec, T=t)
    else:
        val = lorentz_norm(g, spec, T=t)
    return t ** -float(Exponent(1) / params.p1) * val


_KINT_OPS = {"recovery": op_recovery, "Y": op_Y, "S1": op_S1}


def _default_tgrid(f: StepFunction, params: ParamSet, ppd: int) -> np.ndarray:
    fs = rearrange(f)
    inv_r = 1.0 / float(params.r)
    lo = float(fs.breakpoints[0]) ** inv_r / 1e2
    hi = float(fs.breakpoints[-1]) ** inv_r * 1e2
    steps = max(1, math.ceil(ppd * math.log10(hi / lo) - 1e-9))
    return lo * 10.0 ** (np.arange(steps + 1) / ppd)


def kint_ratios(op: str, f: StepFunction, params: ParamSet, tgrid=None, ppd: int = DEFAULT_PPD) -> np.ndarray:
    """``kint_target(op f, t) / (R f*(t) + S f*(t))`` on ``tgrid``."""
    if f.is_zero:
        raise DegenerateInput("the ratio profile needs a nonzero function")
    try:
        fn = _KINT_OPS[op]
    except KeyError:
        raise ValueError(f"unknown operator {op!r}; choose from {sorted(_KINT_OPS)}") from None
    tgrid = _default_tgrid(f, params, 8) if tgrid is None else np.asarray(tgrid, dtype=np.float64)
    out = fn(f, params, ppd=ppd)
    R = op_R(f, params, ppd=ppd)
    S = op_S(f, params, ppd=ppd)
    denom = np.asarray(R(tgrid)) + np.asarray(S(tgrid))
    if np.any(denom <= 0):
        raise DegenerateInput("R f* + S f* vanishes on the t-grid")
    num = np.array([kint_target(out, params, t) for t in tgrid])
    return num / denom


def kint_ratio_profile(op: str, f: StepFunction, params: ParamSet, tgrid=None, ppd: int = DEFAULT_PPD) -> float:
    """Maximum over ``tgrid`` of :func:`kint_ratios`."""
    return float(np.max(kint_ratios(op, f, params, tgrid, ppd)))


def zmonot_profile(f: StepFunction, params: ParamSet, tgrid) -> np.ndarray:
    """``t -> t^(-r q0/p0) int_0^(t^r) s^(q0/p0-1) f*(s)^q0 ds`` (``q0 < inf``)."""
    fs = rearrange(f)
    q0 = float(params.q0)
    a = float(params.q0 / params.p0)
    prim = PowerPrimitive(power(fs, q0), a)
    t = np.asarray(tgrid, dtype=np.float64)
    r = float(params.r)
    return prim.head(np.power(t, r)) * np.power(t, -r * a)


def _reverse_cummax(g: StepFunction) -> StepFunction:
    """``s -> sup_{y >= s} g(y)`` for a step function."""
    return StepFunction(g.breakpoints, np.maximum.accumulate(g.values[::-1])[::-1])


def claim1_ratio(f: StepFunction, params: ParamSet, tgrid, ppd: int = DEFAULT_PPD) -> float:
    """Max over ``tgrid`` of
    ``int_0^t s^(q1/p1-1) (sup_{y>=s} Yf(y))^q1 ds / int_0^t s^(q1/p1-1) (Yf)*(s)^q1 ds``,
    both sides on the same midpoint resampling of ``Yf`` (``q1 < inf``)."""
    if params.q1.infinite:
        raise ParameterError("claim1 statistic needs q1 < inf")
    g = op_Y(f, params, ppd=ppd).resampled
    q1 = float(params.q1)
    a = float(params.q1 / params.p1)
    lhs_f = power(_reverse_cummax(g), q1)
    rhs_f = power(rearrange(g), q1)
    best = 0.0
    for t in np.asarray(tgrid, dtype=np.float64):
        rhs = integrate_power(rhs_f, a, 0.0, t)
        if rhs > 0:
            best = max(best, integrate_power(lhs_f, a, 0.0, t) / rhs)
    return best


def sup_hlp_ratio(h: StepFunction, params: ParamSet, tgrid, ppd: int = DEFAULT_PPD) -> float:
    """Max over ``tgrid`` of ``int_0^t sup_{y>=s} y^al h(y) ds / int_0^t (x^al h(x))*(s) ds``

    with ``al = (r p1 - p0)/(p0 p1)`` and ``h`` non-increasing; the weighted
    profile is resampled at geometric midpoints of a ``ppd`` grid over the
    support of ``h`` (refined to include its breakpoints).
    """
    if not h.is_nonincreasing():
        raise ValueError("h must be non-increasing")
    al = float((params.r * params.p1 - params.p0) / (params.p0 * params.p1))
    b1, bn = float(h.breakpoints[0]), float(h.support_end)
    lo = b1 / 1e3
    steps = max(1, math.ceil(ppd * math.log10(bn / lo) - 1e-9))
    edges = np.union1d(lo * 10.0 ** (np.arange(steps + 1) / ppd), h.breakpoints[h.breakpoints <= bn])
    mids = np.sqrt(edges[:-1] * edges[1:])
    vals = np.concatenate(([0.0], np.power(mids, al) * h(mids)))
    g = StepFunction(edges, vals)
    lhs_f = _reverse_cummax(g)
    rhs_f = rearrange(g)
    best = 0.0
    for t in np.asarray(tgrid, dtype=np.float64):
        rhs = integrate_power(rhs_f, 1.0, 0.0, t)
        if rhs > 0:
            best = max(best, integrate_power(lhs_f, 1.0, 0.0, t) / rhs)
    return best
