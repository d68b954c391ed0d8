"""Distribution function and Lorentz norms of a piecewise power-law profile.

The profile is ``A_h t^k_h`` on ``(0, t_h]`` (``k_h > 0``), a power law
``B_i (t/m_i)^k_i`` on each body cell ``[t_{i-1}, t_i]`` with geometric
midpoint ``m_i``, and ``C t^-d`` on
``[t_s, inf)`` (``C = 0`` for a profile vanishing there).  The measure of
``{g > lam}`` is then closed form, and the norm follows from the layer-cake
formula ``||g||_{p,s}^s = p int_0^inf lam^(s-1) mu(lam)^(s/p) dlam``.
"""

from __future__ import annotations

import functools
import math

import numpy as np

_GL4_NODES, _GL4_WEIGHTS = np.polynomial.legendre.leggauss(4)
_GL2_NODES, _GL2_WEIGHTS = np.polynomial.legendre.leggauss(2)
_GEOM_PPD = 8
_MAX_DECADES = 400
_BATCH_DECADES = 10


def interior_power_fit(edges: np.ndarray, F):
    """Fit ``B (t/m)^k`` on each cell of ``edges`` (``m`` the geometric midpoint)
    through two interior log-Gauss nodes.

    Interior nodes keep the fit away from the cell ends, where the profile
    may jump; the fit is exact for pure powers and second order otherwise.
    Returns ``(B, k)``.
    """
    lo, hi = np.log(edges[:-1]), np.log(edges[1:])
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    x1 = np.exp(mid + half * _GL2_NODES[0])
    x2 = np.exp(mid + half * _GL2_NODES[1])
    y1 = np.asarray(F(x1), dtype=np.float64)
    y2 = np.asarray(F(x2), dtype=np.float64)
    pos = (y1 > 0) & (y2 > 0)
    k = np.zeros_like(y1)
    B = np.where(pos, np.sqrt(np.abs(y1 * y2)), 0.5 * (y1 + y2))  # zero at only one node: constant fallback
    with np.errstate(divide="ignore", invalid="ignore"):
        k[pos] = np.log(y2[pos] / y1[pos]) / (half[pos] * (_GL2_NODES[1] - _GL2_NODES[0]))
    return B, k


class LevelSet:
    def __init__(self, head, body_edges, body_B, body_k, tail):
        self.t_h, self.A_h, self.k_h = head
        self.edges = np.asarray(body_edges, dtype=np.float64)
        self.B = np.asarray(body_B, dtype=np.float64)
        self.k = np.asarray(body_k, dtype=np.float64)
        self.t_s, self.C, self.d = tail
        ta, tb = self.edges[:-1], self.edges[1:]
        self.mid = np.sqrt(ta * tb)
        with np.errstate(over="ignore", under="ignore"):
            ends = np.concatenate((self.B * np.power(ta / self.mid, self.k), self.B * np.power(tb / self.mid, self.k)))
        head_top = self.A_h * self.t_h ** self.k_h
        tail_top = self.C * self.t_s ** -self.d if self.C > 0 else 0.0
        levels = np.concatenate((ends, [head_top, tail_top]))
        self.levels = np.unique(levels[levels > 0])
        self.top = float(self.levels[-1]) if self.levels.size else 0.0

    def measure(self, lam) -> np.ndarray:
        """``|{g > lam}|`` for ``lam > 0``; vectorized."""
        lam = np.atleast_1d(np.asarray(lam, dtype=np.float64))
        out = np.zeros(lam.shape, dtype=np.float64)
        with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
            if self.A_h > 0:
                thr = np.power(lam / self.A_h, 1.0 / self.k_h)
                out += self.t_h - np.minimum(thr, self.t_h)
            if self.C > 0:
                thr = np.power(self.C / lam, 1.0 / self.d)
                out += np.maximum(thr - self.t_s, 0.0)
            if self.B.size:
                ta, tb = self.edges[:-1][None, :], self.edges[1:][None, :]
                B, k = self.B[None, :], self.k[None, :]
                L = lam[:, None]
                flat = k == 0
                safe_k = np.where(flat, 1.0, k)
                thr = self.mid[None, :] * np.power(L / np.where(B > 0, B, 1.0), 1.0 / safe_k)
                thr = np.clip(np.nan_to_num(thr, nan=0.0, posinf=np.inf), ta, tb)
                m = np.where(k > 0, tb - thr, thr - ta)
                m = np.where(flat, np.where(B > L, tb - ta, 0.0), m)
                m = np.where(B > 0, m, 0.0)
                out += m.sum(axis=1)
        return out

    @functools.cached_property
    def _mu_at_levels(self) -> np.ndarray:
        return self.measure(self.levels)

    def _level_at(self, T: float) -> float:
        """Largest ``lam`` with ``mu(lam) >= T``, or 0 if ``|{g > 0}| < T``."""
        mu = self._mu_at_levels
        # mu is non-increasing, so the levels with mu >= T form a prefix
        i = int(np.count_nonzero(mu >= T))
        if i == 0:
            lo = self.levels[0] * 1e-300
            if self.measure(lo)[0] < T:
                return 0.0
        else:
            lo = self.levels[i - 1]
        if i == self.levels.size:
            return float(lo)
        hi = self.levels[i]
        for _ in range(12):
            pts = np.geomspace(lo, hi, 65)
            j = int(np.count_nonzero(self.measure(pts) >= T))
            lo, hi = pts[max(j - 1, 0)], pts[min(j, 64)]
            if hi / lo - 1.0 < 1e-15:
                break
        return float(lo)

    def _segments(self, T: float):
        pts = self.levels
        if T < math.inf:
            lam_T = self._level_at(T)
            if lam_T > 0:
                pts = np.union1d(pts, [lam_T])
        return pts

    def _below(self, lam_low: float, h, tail_rate: float):
        """``int_0^lam_low h`` on geometric cells, stopped once the power-law remainder is negligible."""
        parts = []
        hi = lam_low
        n = _GEOM_PPD * _BATCH_DECADES
        ratio = 10.0 ** (1.0 / _GEOM_PPD)
        for _ in range(_MAX_DECADES // _BATCH_DECADES):
            edges = hi * ratio ** -np.arange(n, -1, -1, dtype=np.float64)
            lo_, hi_ = np.log(edges[:-1]), np.log(edges[1:])
            mid, half = 0.5 * (lo_ + hi_), 0.5 * (hi_ - lo_)
            u = np.exp(mid[:, None] + half[:, None] * _GL2_NODES[None, :])
            w = half[:, None] * _GL2_WEIGHTS[None, :] * u
            parts.extend(np.sum(w * h(u.ravel()).reshape(u.shape), axis=1).tolist())
            hi = float(edges[0])
            remainder = float(h(np.array([hi]))[0]) * hi / tail_rate
            if remainder <= 1e-17 * math.fsum(parts):
                break
        parts.append(float(h(np.array([hi]))[0]) * hi / tail_rate)
        return math.fsum(parts)

    def norm(self, p: float, s: float, T: float = math.inf) -> float:
        """``||g||_{L^{p,s}(0,T)}``; ``p = inf`` gives the supremum."""
        if self.top == 0:
            return 0.0
        if math.isinf(p):
            return self.top
        inv_p = 1.0 / p
        tail_live = self.C > 0 and T == math.inf
        if math.isinf(s):
            if tail_live and inv_p > self.d * (1 + 1e-15):
                return math.inf
            pts = self._segments(T)
            lo, hi = pts[:-1], pts[1:]
            inner = (0.5 * (lo + hi))[:, None] + (0.5 * (hi - lo))[:, None] * np.linspace(-1, 1, 9)[None, :]
            below = pts[0] * 10.0 ** (-np.arange(1, _GEOM_PPD * 40 + 1) / _GEOM_PPD)
            cand = np.concatenate((pts, inner.ravel(), below))
            vals = cand * np.power(np.minimum(self.measure(cand), T), inv_p)
            best = float(np.max(vals))
            if tail_live and abs(inv_p - self.d) <= 1e-15 * self.d:
                best = max(best, self.C)  # the limit lam -> 0 along the critical tail
            return best
        if tail_live and inv_p >= self.d:
            return math.inf

        def h(lam):
            return p * np.power(lam, s - 1.0) * np.power(np.minimum(self.measure(lam), T), s * inv_p)

        lam_T = self._level_at(T) if T < math.inf else 0.0
        pts = self.levels[self.levels > lam_T]
        if lam_T > 0:
            pts = np.concatenate(([lam_T], pts))
        lo, hi = pts[:-1], pts[1:]
        half = 0.5 * (hi - lo)
        nodes = (0.5 * (lo + hi))[:, None] + half[:, None] * _GL4_NODES[None, :]
        body = float(np.sum(half[:, None] * _GL4_WEIGHTS[None, :] * h(nodes.ravel()).reshape(nodes.shape)))
        if lam_T > 0:
            # mu >= T below lam_T, so the integrand is exactly p T^(s/p) lam^(s-1)
            below = p * T ** (s * inv_p) * lam_T ** s / s
        else:
            # below the lowest level the integrand is ~ lam^(rate - 1)
            rate = s - s * inv_p / self.d if tail_live else s
            below = self._below(float(pts[0]), h, rate)
        return (body + below) ** (1.0 / s)
