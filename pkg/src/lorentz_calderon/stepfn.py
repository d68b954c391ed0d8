"""Nonnegative step functions on (0, inf) with compact support.

A :class:`StepFunction` with breakpoints ``b_1 < ... < b_n`` and values
``v_1, ..., v_n`` equals ``v_i`` on ``[b_{i-1}, b_i)`` (``b_0 = 0``) and zero on
``[b_n, inf)``.  Power-weighted integrals and suprema are evaluated cell by
cell in closed form, so every Lorentz-type functional of a step function is
exact up to floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DivergentIntegral, GridError

__all__ = [
    "StepFunction",
    "GRID_CAP",
    "make_log_grid",
    "power_integrals",
    "integrate_power",
    "sup_power",
    "PowerPrimitive",
    "PowerSupremum",
    "dilate",
    "add",
    "scale",
    "multiply",
    "power",
    "split_level",
    "truncate_level",
    "excess",
    "pointwise_min",
    "pointwise_max",
    "accurate_cumsum",
]

GRID_CAP = 1_000_000
_LN2 = math.log(2.0)


def _as_float(a) -> float:
    return float(a)


@dataclass(frozen=True, eq=False)
class StepFunction:
    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.array(self.breakpoints, dtype=np.float64, copy=True).reshape(-1)
        v = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        if b.size == 0 or b.size != v.size:
            raise ValueError(f"need n >= 1 breakpoints and as many values (got {b.size}, {v.size})")
        if not (np.all(np.isfinite(b)) and b[0] > 0 and np.all(np.diff(b) > 0)):
            raise ValueError("breakpoints must be finite, positive and strictly increasing")
        if not (np.all(np.isfinite(v)) and np.all(v >= 0)):
            raise ValueError("values must be finite and nonnegative")
        v = v + 0.0  # drop negative zeros
        b.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> "StepFunction":
        return cls([1.0], [0.0])

    @classmethod
    def indicator(cls, a: float, b: float, height: float = 1.0) -> "StepFunction":
        """``height * chi_(a, b)``."""
        a, b = float(a), float(b)
        if not (0 <= a < b < math.inf):
            raise ValueError(f"need 0 <= a < b < inf (got {a}, {b})")
        if a == 0:
            return cls([b], [height])
        return cls([a, b], [0.0, height])

    @classmethod
    def from_edges(cls, edges: Sequence[float], values: Sequence[float]) -> "StepFunction":
        """Cells ``[edges[i], edges[i+1])`` with ``values[i]``; zero left of ``edges[0]``."""
        e = np.asarray(edges, dtype=np.float64)
        v = np.asarray(values, dtype=np.float64)
        if e.size != v.size + 1:
            raise ValueError("need len(edges) == len(values) + 1")
        if e[0] < 0:
            raise ValueError("edges must start at a nonnegative point")
        if e[0] == 0:
            return cls(e[1:], v)
        return cls(e, np.concatenate(([0.0], v)))

    # -- views ------------------------------------------------------------
    @property
    def n(self) -> int:
        return int(self.breakpoints.size)

    @property
    def left_endpoints(self) -> np.ndarray:
        return np.concatenate(([0.0], self.breakpoints[:-1]))

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(np.concatenate(([0.0], self.breakpoints)))

    @property
    def is_zero(self) -> bool:
        return not bool(np.any(self.values > 0))

    @property
    def sup(self) -> float:
        return float(self.values.max())

    @property
    def support_end(self) -> float:
        """Right end of the support (0 for the zero function)."""
        nz = np.nonzero(self.values > 0)[0]
        return float(self.breakpoints[nz[-1]]) if nz.size else 0.0

    @property
    def support_start(self) -> float:
        """Left end of the first nonzero cell."""
        nz = np.nonzero(self.values > 0)[0]
        if not nz.size:
            return 0.0
        return float(self.left_endpoints[nz[0]])

    def is_nonincreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0))

    def __call__(self, t):
        """Evaluate at ``t >= 0`` (``t = 0`` returns the right limit ``f(0+)``)."""
        t_arr = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(self.breakpoints, t_arr, side="right")
        padded = np.concatenate((self.values, [0.0]))
        out = padded[idx]
        return float(out) if out.ndim == 0 else out

    def normalize(self) -> "StepFunction":
        """Merge adjacent equal cells and drop trailing zero cells."""
        b, v = self.breakpoints, self.values
        keep = np.ones(b.size, dtype=bool)
        keep[:-1] = v[:-1] != v[1:]
        b, v = b[keep], v[keep]
        if v.size > 1 and v[-1] == 0:
            b, v = b[:-1], v[:-1]
        return StepFunction(b, v)

    def equals(self, other: "StepFunction") -> bool:
        """Bitwise equality as functions (invariant under merging cells)."""
        a, b = self.normalize(), other.normalize()
        if a.is_zero and b.is_zero:
            return True
        return bool(np.array_equal(a.breakpoints, b.breakpoints) and np.array_equal(a.values, b.values))

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __add__(self, other):
        return add(self, other)

    def __rmul__(self, c):
        return scale(c, self)

    def __repr__(self):
        if self.n <= 6:
            cells = ", ".join(f"{v:g}@<{b:g}" for b, v in zip(self.breakpoints, self.values))
        else:
            cells = f"{self.n} cells on (0, {self.breakpoints[-1]:g})"
        return f"StepFunction({cells})"

    def to_dict(self):
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

def make_log_grid(t_min: float, t_max: float, points_per_decade: int, cap: int = GRID_CAP) -> np.ndarray:
    """Geometric grid from ``t_min`` to ``t_max`` inclusive with at least the requested density.

    When ``log10(t_max / t_min)`` is a multiple of ``1/points_per_decade`` the
    ratio is exactly ``10**(1/points_per_decade)``.
    """
    t_min, t_max = float(t_min), float(t_max)
    if isinstance(points_per_decade, bool) or int(points_per_decade) != points_per_decade or points_per_decade < 1:
        raise GridError(f"points_per_decade must be a positive integer (got {points_per_decade!r})")
    if not (0 < t_min < t_max < math.inf):
        raise GridError(f"need 0 < t_min < t_max < inf (got {t_min}, {t_max})")
    span = t_max / t_min
    decades = math.log10(span) if math.isfinite(span) else math.log10(t_max) - math.log10(t_min)
    steps = max(1, math.ceil(decades * points_per_decade - 1e-9))
    if steps + 1 > cap:
        raise GridError(f"grid of {steps + 1} points exceeds the cap {cap}")
    exps = np.arange(steps + 1) / steps
    if math.isfinite(span):
        grid = t_min * np.power(span, exps)
    else:  # subnormal t_min
        grid = np.exp(math.log(t_min) + exps * (math.log(t_max) - math.log(t_min)))
    grid[0], grid[-1] = t_min, t_max
    grid = np.maximum.accumulate(grid)
    return np.unique(grid)


# ---------------------------------------------------------------------------
# Power-weighted integrals and suprema
# ---------------------------------------------------------------------------

def power_integrals(lo, hi, a: float) -> np.ndarray:
    """Elementwise ``int_lo^hi s^(a-1) ds`` for ``0 <= lo <= hi``.

    Uses ``lo^a * expm1(a*log1p((hi-lo)/lo))/a`` to avoid cancellation on short
    cells.  ``lo == 0`` requires ``a > 0`` (otherwise the result is ``inf``).
    """
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    lo, hi = np.broadcast_arrays(lo, hi)
    out = np.zeros(lo.shape, dtype=np.float64)
    pos = (lo > 0) & (hi > lo)
    if np.any(pos):
        l, h = lo[pos], hi[pos]
        with np.errstate(over="ignore"):
            ratio = (h - l) / l  # inf for subnormal l is harmless: that cell takes the difference branch
        if a == 0:
            out[pos] = np.log1p(ratio)
        else:
            x = a * np.log1p(ratio)
            short = np.abs(x) <= _LN2
            res = np.empty_like(l)
            # expm1 where hi^a and lo^a are close; a plain difference (at most 2x cancellation) elsewhere
            with np.errstate(over="ignore", under="ignore"):
                res[short] = np.power(l[short], a) * np.expm1(x[short]) / a
                res[~short] = (np.power(h[~short], a) - np.power(l[~short], a)) / a
            out[pos] = res
    origin = (lo == 0) & (hi > 0)
    if np.any(origin):
        out[origin] = np.power(hi[origin], a) / a if a > 0 else np.inf
    return out


def _clip_cells(f: StepFunction, u: float, v: float):
    lo = np.maximum(f.left_endpoints, u)
    hi = np.minimum(f.breakpoints, v)
    keep = (hi > lo) & (f.values > 0)
    return lo[keep], hi[keep], f.values[keep]


def integrate_power(f: StepFunction, a, u: float = 0.0, v: float = math.inf) -> float:
    """Exact ``int_u^v s^(a-1) f(s) ds``, summed with ``math.fsum``."""
    a = _as_float(a)
    u, v = float(u), float(v)
    if not (0 <= u) or v < u:
        raise ValueError(f"need 0 <= u <= v (got {u}, {v})")
    lo, hi, vals = _clip_cells(f, u, v)
    if lo.size == 0:
        return 0.0
    if a <= 0 and lo[0] == 0:
        raise DivergentIntegral(f"s^({a}-1) is not integrable at 0 against a function nonzero near 0")
    return math.fsum((vals * power_integrals(lo, hi, a)).tolist())


def sup_power(f: StepFunction, a, u: float = 0.0, v: float = math.inf) -> float:
    """Exact ``sup_{u<s<v} s^a f(s)``; on each cell the weight is monotone."""
    a = _as_float(a)
    lo, hi, vals = _clip_cells(f, float(u), float(v))
    if lo.size == 0:
        return 0.0
    if a > 0:
        ends = hi
    elif a == 0:
        return float(vals.max())
    else:
        if lo[0] == 0:
            return math.inf
        ends = lo
    return float(np.max(vals * np.power(ends, a)))


def accurate_cumsum(x: Iterable[float]) -> np.ndarray:
    """Running sums with Neumaier compensation (error independent of length)."""
    out = []
    s = 0.0
    c = 0.0
    for xi in x:
        xi = float(xi)
        t = s + xi
        if abs(s) >= abs(xi):
            c += (s - t) + xi
        else:
            c += (xi - t) + s
        s = t
        out.append(s + c)
    return np.asarray(out, dtype=np.float64)


class PowerPrimitive:
    """``x -> int_0^x s^(a-1) f(s) ds`` and the tail ``int_x^inf`` for a fixed step function.

    Prefix and suffix sums are precomputed with compensated summation, so both
    the head and the tail are accurate even when one of them is tiny.
    """

    def __init__(self, f: StepFunction, a):
        self.f = f
        self.a = _as_float(a)
        left = f.left_endpoints
        vals = f.values
        if self.a <= 0 and vals[0] > 0:
            raise DivergentIntegral(f"s^({self.a}-1) is not integrable at 0 against a function nonzero near 0")
        cell = np.where(vals > 0, vals * power_integrals(left, f.breakpoints, self.a), 0.0)
        self._cell = cell
        self._prefix = np.concatenate(([0.0], accurate_cumsum(cell)))
        self._suffix = np.concatenate((accurate_cumsum(cell[::-1])[::-1], [0.0]))
        self.total = float(math.fsum(cell.tolist()))

    def head(self, x):
        """``int_0^x``; vectorized."""
        f = self.f
        x = np.asarray(x, dtype=np.float64)
        k = np.searchsorted(f.breakpoints, x, side="right")
        inside = k < f.n
        kk = np.minimum(k, f.n - 1)
        left = f.left_endpoints[kk]
        partial = f.values[kk] * power_integrals(left, np.maximum(x, left), self.a)
        out = np.where(inside, self._prefix[kk] + np.where(f.values[kk] > 0, partial, 0.0), self.total)
        return float(out) if out.ndim == 0 else out

    def tail(self, x):
        """``int_x^inf``; vectorized, exactly zero beyond the support."""
        f = self.f
        x = np.asarray(x, dtype=np.float64)
        k = np.searchsorted(f.breakpoints, x, side="right")
        inside = k < f.n
        kk = np.minimum(k, f.n - 1)
        right = f.breakpoints[kk]
        partial = f.values[kk] * power_integrals(np.minimum(x, right), right, self.a)
        if self.a <= 0:
            partial = np.where(x > 0, partial, np.inf)
        out = np.where(inside, self._suffix[kk + 1] + np.where(f.values[kk] > 0, partial, 0.0), 0.0)
        return float(out) if out.ndim == 0 else out


class PowerSupremum:
    """``x -> sup_{0<s<x} s^a f(s)`` for ``a > 0``; vectorized."""

    def __init__(self, f: StepFunction, a):
        self.f = f
        self.a = _as_float(a)
        if self.a <= 0:
            raise ValueError("PowerSupremum needs a > 0")
        cell_sup = f.values * np.power(f.breakpoints, self.a)
        self._prefix = np.concatenate(([0.0], np.maximum.accumulate(cell_sup)))
        self.total = float(self._prefix[-1])

    def __call__(self, x):
        f = self.f
        x = np.asarray(x, dtype=np.float64)
        k = np.searchsorted(f.breakpoints, x, side="right")
        inside = k < f.n
        kk = np.minimum(k, f.n - 1)
        current = np.where(x > f.left_endpoints[kk], f.values[kk] * np.power(x, self.a), 0.0)
        out = np.where(inside, np.maximum(self._prefix[kk], current), self.total)
        return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Dilation and lattice algebra
# ---------------------------------------------------------------------------

def dilate(f: StepFunction, lam: float) -> StepFunction:
    """``t -> f(lam * t)``."""
    lam = float(lam)
    if not (0 < lam < math.inf):
        raise ValueError(f"dilation factor must be positive and finite (got {lam})")
    if lam == 1.0:
        return f
    return StepFunction(f.breakpoints / lam, f.values)


def _merged(f: StepFunction, g: StepFunction):
    b = np.union1d(f.breakpoints, g.breakpoints)
    left = np.concatenate(([0.0], b[:-1]))
    return b, f(left), g(left)


def add(f: StepFunction, g: StepFunction) -> StepFunction:
    b, fv, gv = _merged(f, g)
    return StepFunction(b, fv + gv)


def multiply(f: StepFunction, g: StepFunction) -> StepFunction:
    b, fv, gv = _merged(f, g)
    return StepFunction(b, fv * gv)


def pointwise_min(f: StepFunction, g: StepFunction) -> StepFunction:
    b, fv, gv = _merged(f, g)
    return StepFunction(b, np.minimum(fv, gv))


def pointwise_max(f: StepFunction, g: StepFunction) -> StepFunction:
    b, fv, gv = _merged(f, g)
    return StepFunction(b, np.maximum(fv, gv))


def scale(c: float, f: StepFunction) -> StepFunction:
    c = float(c)
    if not (0 <= c < math.inf):
        raise ValueError(f"scale factor must be finite and nonnegative (got {c})")
    return StepFunction(f.breakpoints, c * f.values)


def power(f: StepFunction, e: float) -> StepFunction:
    """``f ** e`` cellwise (``0 ** e = 0`` for ``e > 0``)."""
    e = float(e)
    if e <= 0:
        raise ValueError("exponent must be positive")
    return StepFunction(f.breakpoints, np.power(f.values, e))


def split_level(values: np.ndarray, c: float) -> float:
    """Level used by :func:`truncate_level` and :func:`excess`.

    Returns ``c`` itself whenever every value above it splits exactly as
    ``c + d``.  Otherwise (a round-to-even tie in both directions) ``c`` is
    moved down to a multiple of ``ulp(max f)``, which makes ``v - c`` exactly
    representable for every ``v > c``.
    """
    c = float(c)
    if c < 0:
        raise ValueError("level must be nonnegative")
    above = values[values > c]
    if above.size == 0 or _split_exact(above, c) is not None:
        return c
    u = float(np.spacing(above.max()))
    return math.floor(c / u) * u


def _split_exact(above: np.ndarray, c: float):
    d = above - c
    for _ in range(3):
        s = c + d
        if np.array_equal(s, above):
            return d
        d = np.where(s > above, np.nextafter(d, 0.0), np.where(s < above, np.nextafter(d, np.inf), d))
    return None


def truncate_level(f: StepFunction, c: float) -> StepFunction:
    """``min(f, c)`` (see :func:`split_level` for the rare ulp-level adjustment of ``c``)."""
    level = split_level(f.values, c)
    return StepFunction(f.breakpoints, np.minimum(f.values, level))


def excess(f: StepFunction, c: float) -> StepFunction:
    """``(f - c)_+`` such that ``truncate_level(f, c) + excess(f, c) == f`` bitwise."""
    level = split_level(f.values, c)
    v = f.values
    above = v > level
    d = np.zeros_like(v)
    if above.any():
        exact = _split_exact(v[above], level)
        if exact is None:  # pragma: no cover - split_level guarantees exactness
            raise ArithmeticError("could not split values exactly at the level")
        d[above] = exact
    return StepFunction(f.breakpoints, d)
