"""Lorentz quasinorms, the downgraded functional ``X<p0,q0>`` and fundamental functions."""

from __future__ import annotations

import math

import numpy as np

from ._quad import log_gauss
from .errors import TrivialSpace
from .params import Exponent, LorentzSpec, as_exponent, nontrivial_downgrade
from .rearrange import rearrange
from .stepfn import PowerPrimitive, PowerSupremum, StepFunction, integrate_power, make_log_grid, power, sup_power

__all__ = ["lorentz_norm", "downgrade_norm", "downgrade_profile", "fundamental", "DEFAULT_PPD"]

DEFAULT_PPD = 32


def _spec(spec) -> LorentzSpec:
    if isinstance(spec, LorentzSpec):
        return spec
    if isinstance(spec, str):
        return LorentzSpec.parse(spec)
    p, s = spec
    return LorentzSpec(as_exponent(p), as_exponent(s))


def lorentz_norm(f: StepFunction, spec, T: float = math.inf) -> float:
    """``||f||_{L^{p,s}(0,T)}`` computed exactly on ``f*``.

    ``s < inf``: ``(int_0^T t^(s/p-1) f*(t)^s dt)^(1/s)``;
    ``s = inf``: ``sup_{t<T} t^(1/p) f*(t)``, which is ``f*(0+)`` when ``p = inf``.
    """
    spec = _spec(spec)
    T = float(T)
    if not T > 0:
        raise ValueError(f"T must be positive (got {T})")
    fs = rearrange(f)
    if fs.is_zero:
        return 0.0
    p, s = spec.p, spec.s
    if s.infinite:
        if p.infinite:
            return float(fs.values[0])
        return sup_power(fs, float(Exponent(1) / p), 0.0, T)
    a = float(s / p)
    val = integrate_power(power(fs, float(s)), a, 0.0, T)
    return val ** (1.0 / float(s))


def fundamental(spec, t: float) -> float:
    """``||chi_(0,t)||`` in ``L^{p,s}``: ``(p/s)^(1/s) t^(1/p)``, or ``t^(1/p)`` when ``s = inf``."""
    spec = _spec(spec)
    t = float(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    p, s = spec.p, spec.s
    if t == 0:
        return 0.0
    if p.infinite:
        return 1.0 if s.infinite else math.inf
    tp = t ** float(Exponent(1) / p)
    if s.infinite:
        return tp
    return float(p / s) ** (1.0 / float(s)) * tp


def downgrade_profile(f: StepFunction, p0, q0):
    """Return ``(g, head_value, tail_constant, b_first, b_last)`` for the inner function

    ``g(t) = t^(-1/p0) (int_0^t s^(q0/p0-1) f*(s)^q0 ds)^(1/q0)``
    (``g(t) = t^(-1/p0) sup_{s<t} s^(1/p0) f*(s)`` when ``q0 = inf``).
    ``g`` is constant on ``(0, b_first]`` and equals ``tail_constant * t^(-1/p0)``
    on ``[b_last, inf)``.
    """
    p0, q0 = as_exponent(p0), as_exponent(q0)
    fs = rearrange(f)
    inv_p0 = float(Exponent(1) / p0)
    if q0.infinite:
        sup = PowerSupremum(fs, inv_p0)

        def g(t):
            t = np.asarray(t, dtype=np.float64)
            return sup(t) * np.power(t, -inv_p0)

        tail_c = sup.total
    else:
        prim = PowerPrimitive(power(fs, float(q0)), float(q0 / p0))
        inv_q0 = 1.0 / float(q0)

        def g(t):
            t = np.asarray(t, dtype=np.float64)
            return np.power(prim.head(t), inv_q0) * np.power(t, -inv_p0)

        tail_c = prim.total ** inv_q0
    b1, bn = float(fs.breakpoints[0]), float(fs.breakpoints[-1])
    head = float(g(b1))
    return g, head, tail_c, b1, bn


def downgrade_norm(f: StepFunction, X, p0, q0, ppd: int = DEFAULT_PPD) -> float:
    """``||f||_{X<p0,q0>} = || g ||_X`` for the non-increasing inner profile ``g``.

    ``g`` is exact at every evaluation point.  On ``(0, b_first]`` (constant)
    and ``[b_last, inf)`` (pure power) the X-norm contribution is summed in
    closed form; in between the profile is integrated with a composite
    Gauss-Legendre rule in ``log t`` on a grid of ``ppd`` points per decade
    that contains every breakpoint of ``f*``.
    """
    X = _spec(X)
    p0, q0 = as_exponent(p0), as_exponent(q0)
    if not nontrivial_downgrade(X, p0):
        raise TrivialSpace(f"{X}<{p0},{q0}> = {{0}}: min(1, t^(-1/p0)) is not in {X}")
    fs = rearrange(f)
    if fs.is_zero:
        return 0.0
    g, head, tail_c, b1, bn = downgrade_profile(fs, p0, q0)
    p, s = X.p, X.s
    if p.infinite:
        return head
    inv_p = float(Exponent(1) / p)
    inv_p0 = float(Exponent(1) / p0)
    if bn > b1:
        edges = np.union1d(make_log_grid(b1, bn, ppd), fs.breakpoints[(fs.breakpoints >= b1) & (fs.breakpoints <= bn)])
    else:
        edges = np.array([b1])
    if s.infinite:
        # head: t^(1/p) * const grows up to b1; tail: t^(1/p-1/p0) * C is non-increasing for p >= p0
        cand = [head * b1 ** inv_p, tail_c * bn ** (inv_p - inv_p0)]
        if p == p0:
            cand.append(tail_c)
        if edges.size > 1:
            nodes, _ = log_gauss(edges)
            pts = np.concatenate((edges, nodes))
            cand.append(float(np.max(np.power(pts, inv_p) * g(pts))))
        return max(cand)
    sf = float(s)
    a = float(s / p)
    tail_exp = sf * inv_p0 - a  # > 0 because p > p0 here
    parts = [head ** sf * b1 ** a / a, tail_c ** sf * bn ** (-tail_exp) / tail_exp]
    if edges.size > 1:
        nodes, w = log_gauss(edges)
        parts.extend((w * np.power(nodes, a - 1.0) * np.power(g(nodes), sf)).tolist())
    return math.fsum(parts) ** (1.0 / sf)
