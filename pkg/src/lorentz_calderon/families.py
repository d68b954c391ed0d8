"""Deterministic test-function generators and operator-norm sweeps.

Function literals::

    char:a,b              indicator of (a, b)
    step:b1,v1;b2,v2;...  literal step function (v_i on [b_{i-1}, b_i))
    pow:a:M:B             min(M, t^-a) on (0, B), sampled at cell left endpoints
    logpow:r1,s2,B        min(1, t^(-1/r1) log(e-1+t)^(-1/s2)) on (0, B), sampled likewise
    randmono:seed         random non-increasing step function
    randstep:seed         random step function (not monotone)

Sampling smooth non-increasing profiles at left endpoints gives a step function
that dominates the profile on every cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .calderon import OPERATORS, output_norm
from .errors import NonNormable, SpecError
from .lorentz import DEFAULT_PPD, _spec, lorentz_norm
from .params import Exponent, LorentzSpec, ParamSet
from .stepfn import StepFunction, make_log_grid

__all__ = [
    "KINDS",
    "FamilySpec",
    "parse_function",
    "generate",
    "corpus",
    "SweepRow",
    "SweepReport",
    "sweep_ratio",
    "pow_profile",
    "logpow_profile",
    "randmono",
    "randstep",
    "CounterexampleRow",
    "counterexample_table",
]

KINDS = ("char", "pow", "logpow", "randmono", "randstep", "step")


def _floats(text: str, n: int, what: str) -> List[float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise SpecError(f"{what} expects {n} comma-separated numbers, got {text!r}")
    try:
        out = [float(p) for p in parts]
    except ValueError:
        raise SpecError(f"{what}: non-numeric parameter in {text!r}") from None
    if not all(math.isfinite(x) for x in out):
        raise SpecError(f"{what}: parameters must be finite ({text!r})")
    return out


def _exponent_float(text: str, what: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity"):
        return math.inf
    try:
        if "/" in t:
            num, den = t.split("/")
            return float(num) / float(den)
        return float(t)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"{what}: bad number {text!r}") from None


def pow_profile(a: float, M: float, B: float, ppd: int = DEFAULT_PPD) -> StepFunction:
    """``min(M, t^-a)`` on ``(0, B)``, value at the left endpoint of each log-grid cell."""
    if not (a > 0 and M > 0 and B > 0):
        raise SpecError(f"pow needs a, M, B > 0 (got {a}, {M}, {B})")
    knee = M ** (-1.0 / a)
    if knee >= B:
        return StepFunction([B], [M])
    grid = make_log_grid(knee, B, ppd)
    return StepFunction(grid, np.concatenate(([M], np.power(grid[:-1], -a))))


def logpow_profile(r1: float, s2: float, B: float, ppd: int = DEFAULT_PPD) -> StepFunction:
    """``min(1, t^(-1/r1) log(e-1+t)^(-1/s2))`` on ``(0, B)``; equals 1 on ``(0, 1]``."""
    if not (r1 > 0 and s2 > 0 and B > 0):
        raise SpecError(f"logpow needs r1, s2, B > 0 (got {r1}, {s2}, {B})")
    if B <= 1:
        return StepFunction([B], [1.0])
    grid = make_log_grid(1.0, B, ppd)
    left = grid[:-1]
    inv_s2 = 0.0 if math.isinf(s2) else 1.0 / s2
    vals = np.power(left, -1.0 / r1) * np.power(np.log(math.e - 1.0 + left), -inv_s2)
    vals = np.minimum(vals, 1.0)
    return StepFunction(grid, np.concatenate(([1.0], vals)))


def randmono(seed: int) -> StepFunction:
    """Non-increasing step function with 2-24 cells, lengths and drops log-uniform."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 25))
    lengths = 10.0 ** rng.uniform(-2.0, 1.0, size=n)
    drops = 10.0 ** rng.uniform(-2.0, 0.5, size=n)
    values = np.cumsum(drops[::-1])[::-1]
    return StepFunction(np.cumsum(lengths), values)


def randstep(seed: int) -> StepFunction:
    """Step function with 2-24 cells, random order of values, some zero cells."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 25))
    lengths = 10.0 ** rng.uniform(-2.0, 1.0, size=n)
    values = 10.0 ** rng.uniform(-2.0, 1.0, size=n)
    values[rng.random(n) < 0.2] = 0.0
    if not np.any(values > 0):
        values[0] = 1.0
    return StepFunction(np.cumsum(lengths), values)


def parse_function(text: str, ppd: int = DEFAULT_PPD) -> StepFunction:
    """Build a step function from a literal (see module docstring)."""
    kind, sep, rest = str(text).strip().partition(":")
    if not sep:
        raise SpecError(f"function literal must look like kind:params, got {text!r}")
    if kind == "char":
        a, b = _floats(rest, 2, "char")
        try:
            return StepFunction.indicator(a, b)
        except ValueError as exc:
            raise SpecError(f"char: {exc}") from None
    if kind == "step":
        bps, vals = [], []
        for cell in rest.split(";"):
            if cell.strip():
                b, v = _floats(cell, 2, "step cell")
                bps.append(b)
                vals.append(v)
        try:
            return StepFunction(bps, vals)
        except ValueError as exc:
            raise SpecError(f"step: {exc}") from None
    if kind == "pow":
        parts = rest.split(":")
        if len(parts) != 3:
            raise SpecError(f"pow expects pow:a:M:B, got {text!r}")
        a, M, B = (_exponent_float(p, "pow") for p in parts)
        return pow_profile(a, M, B, ppd)
    if kind == "logpow":
        parts = rest.split(",")
        if len(parts) != 3:
            raise SpecError(f"logpow expects logpow:r1,s2,B, got {text!r}")
        r1, s2, B = (_exponent_float(p, "logpow") for p in parts)
        return logpow_profile(r1, s2, B, ppd)
    if kind in ("randmono", "randstep"):
        try:
            seed = int(rest)
        except ValueError:
            raise SpecError(f"{kind} expects an integer seed, got {rest!r}") from None
        return randmono(seed) if kind == "randmono" else randstep(seed)
    raise SpecError(f"unknown function kind {kind!r}; expected one of {', '.join(KINDS)}")


@dataclass(frozen=True)
class FamilySpec:
    """A one-parameter family of test functions.

    Members ``k = 0..count-1`` vary the growth parameter: ``char`` doubles the
    right end, ``pow`` multiplies ``B`` by 100, ``logpow`` squares ``B``, and
    ``randmono``/``randstep`` use seeds ``seed + k``.  ``step`` has one member.
    """

    kind: str
    params: Tuple = ()
    count: int = 4
    seed: int = 0
    ppd: int = DEFAULT_PPD

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown family kind {self.kind!r}")
        if self.count < 1:
            raise SpecError("family count must be >= 1")

    @classmethod
    def parse(cls, text: str, count: int = 4, seed: int = 0, ppd: int = DEFAULT_PPD) -> "FamilySpec":
        kind, sep, rest = str(text).strip().partition(":")
        if kind not in KINDS:
            raise SpecError(f"unknown family kind {kind!r}; expected one of {', '.join(KINDS)}")
        if kind in ("randmono", "randstep"):
            if sep and rest.strip():
                try:
                    seed = int(rest)
                except ValueError:
                    raise SpecError(f"{kind} expects an integer seed, got {rest!r}") from None
            return cls(kind, (), count, seed, ppd)
        if not sep:
            raise SpecError(f"family {kind} needs parameters")
        if kind == "char":
            params = tuple(_floats(rest, 2, "char"))
        elif kind == "pow":
            params = tuple(_exponent_float(p, "pow") for p in rest.split(":"))
            if len(params) != 3:
                raise SpecError(f"pow expects pow:a:M:B, got {text!r}")
        elif kind == "logpow":
            params = tuple(_exponent_float(p, "logpow") for p in rest.split(","))
            if len(params) != 3:
                raise SpecError(f"logpow expects logpow:r1,s2,B, got {text!r}")
        else:
            parse_function(text)  # validate
            params = (rest,)
            count = 1
        return cls(kind, params, count, seed, ppd)

    def member_params(self) -> List[float]:
        k = np.arange(self.count)
        if self.kind == "char":
            return (self.params[1] * 2.0 ** k).tolist()
        if self.kind == "pow":
            return (self.params[2] * 100.0 ** k).tolist()
        if self.kind == "logpow":
            return [self.params[2] ** (2 ** int(i)) for i in k]
        if self.kind in ("randmono", "randstep"):
            return [float(self.seed + int(i)) for i in k]
        return [0.0]

    def member(self, growth: float) -> StepFunction:
        if self.kind == "char":
            return StepFunction.indicator(self.params[0], growth)
        if self.kind == "pow":
            a, M, _ = self.params
            return pow_profile(a, M, growth, self.ppd)
        if self.kind == "logpow":
            r1, s2, _ = self.params
            return logpow_profile(r1, s2, growth, self.ppd)
        if self.kind == "randmono":
            return randmono(int(growth))
        if self.kind == "randstep":
            return randstep(int(growth))
        return parse_function(f"step:{self.params[0]}", self.ppd)


def generate(spec: FamilySpec) -> List[StepFunction]:
    return [spec.member(g) for g in spec.member_params()]


def corpus(seed: int = 0, size: int = 24, monotone_only: bool = False) -> List[StepFunction]:
    """Mixed deterministic corpus: indicators, power and log-power profiles, random steps."""
    fixed = [
        StepFunction.indicator(0, 1),
        StepFunction.indicator(0, 0.01, 30.0),
        StepFunction.indicator(2, 7),
        StepFunction([1, 2, 3], [1, 3, 2]),
        pow_profile(0.25, 10.0, 100.0, 8),
        pow_profile(0.7, 3.0, 50.0, 8),
        logpow_profile(3.0, 1.0, 1e4, 8),
    ]
    if monotone_only:
        fixed = [f for f in fixed if f.is_nonincreasing()]
    out = list(fixed)
    k = 0
    while len(out) < size:
        if monotone_only or k % 3 != 2:
            out.append(randmono(seed * 1000 + k))
        else:
            out.append(randstep(seed * 1000 + k))
        k += 1
    return out[:size]


@dataclass(frozen=True)
class SweepRow:
    index: int
    family_param: float
    norm_domain: float
    norm_target: float
    ratio: float


@dataclass(frozen=True)
class SweepReport:
    op: str
    domain: LorentzSpec
    target: LorentzSpec
    rows: Tuple[SweepRow, ...]
    max_ratio: float
    argmax: int
    increasing: bool
    label: str = field(default="")


def sweep_ratio(op: str, X, Y, family: FamilySpec, params: ParamSet, ppd: Optional[int] = None) -> SweepReport:
    """``||op f||_Y / ||f||_X`` for every member of the family, in member order."""
    X, Y = _spec(X), _spec(Y)
    if not X.normable:
        raise NonNormable(f"domain {X} is not normable")
    if op not in OPERATORS:
        raise SpecError(f"unknown operator {op!r}; choose from {sorted(OPERATORS)}")
    ppd = family.ppd if ppd is None else ppd
    rows = []
    for i, (g, f) in enumerate(zip(family.member_params(), generate(family))):
        nd = lorentz_norm(f, X)
        nt = output_norm(OPERATORS[op](f, params, ppd=ppd), Y)
        rows.append(SweepRow(i, float(g), nd, nt, nt / nd if nd > 0 else math.nan))
    ratios = np.array([r.ratio for r in rows])
    argmax = int(np.nanargmax(ratios))
    increasing = bool(len(rows) > 1 and np.all(np.diff(ratios) > 0))
    if increasing:
        label = "ratios strictly increase along the family: growth witness (evidence of unboundedness)"
    else:
        label = "no growth along the family: consistent with boundedness (not a certificate)"
    return SweepReport(op, X, Y, tuple(rows), float(ratios[argmax]), argmax, increasing, label)


@dataclass(frozen=True)
class CounterexampleRow:
    T: float
    norm_f0: float
    truncated_S_norm: float
    loglog_ratio: float


def counterexample_table(params: ParamSet, tmax_list, r1=3, s1=2, s2=1, ppd: int = DEFAULT_PPD,
                         overshoot: float = 1e24) -> List[CounterexampleRow]:
    """Growth experiment for the log-power profile when ``s2 < s1``.

    For each ``T``: ``||f0||_{r1,s1}`` with ``f0`` truncated at ``B = T``, and
    ``||S f0||_{L^{r2,s2}(0,T)}`` with ``f0`` truncated at ``B = T^r * overshoot``
    so that the truncation barely affects ``S f0`` on ``(0, T)``.
    """
    from .params import as_exponent, r1r2_solve

    r1e, s1e, s2e = as_exponent(r1), as_exponent(s1), as_exponent(s2)
    r2 = r1r2_solve(params, r1=r1e)
    rows = []
    for T in tmax_list:
        T = float(T)
        if not T > math.e:
            raise SpecError(f"counterexample needs T > e (got {T})")
        f_small = logpow_profile(float(r1e), float(s2e), T, ppd)
        nf = lorentz_norm(f_small, LorentzSpec(r1e, s1e))
        f_big = logpow_profile(float(r1e), float(s2e), T ** float(params.r) * overshoot, ppd)
        ns = output_norm(OPERATORS["S"](f_big, params, ppd=ppd), LorentzSpec(r2, s2e), T=T)
        rows.append(CounterexampleRow(T, nf, ns, ns / math.log(math.log(T))))
    return rows
