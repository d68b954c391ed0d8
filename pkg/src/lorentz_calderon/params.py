"""Exact exponent arithmetic, parameter validation and the boundedness verdicts.

Every space parameter is an :class:`Exponent`: a rational number in lowest
terms, or ``+inf``.  Arithmetic is exact; the undefined cases ``inf - inf``,
``0 * inf`` and division by zero raise :class:`ExponentError`, so call sites
have to branch on infinity explicitly.

The verdict functions decide, symbolically, whether the Calderon operators
``R_q0`` and ``S`` map ``L^{r1,s1}(0, inf)`` boundedly into ``L^{r2,s2}(0, inf)``.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import ExponentError, NonNormable, NoSolution, ParameterError, SpecError

__all__ = [
    "Exponent",
    "INF",
    "as_exponent",
    "ParamSet",
    "LorentzSpec",
    "Verdict",
    "CLAUSES",
    "derive",
    "r1r2_solve",
    "scaling_holds",
    "verdict_R",
    "verdict_S",
    "verdict_combined",
    "nontrivial_downgrade",
]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")
_INF_WORDS = {"inf", "+inf", "infinity", "+infinity", "oo", "∞"}


@functools.total_ordering
class Exponent:
    """Exact rational number extended with ``+inf``.

    Stored in lowest terms with a positive denominator (delegated to
    :class:`fractions.Fraction`).  Instances are immutable and hashable.

    >>> Exponent(6, 4)
    Exponent('3/2')
    >>> (Exponent(1) / INF) == 0
    True
    """

    __slots__ = ("_frac",)

    def __init__(self, value: Union[int, Fraction, "Exponent"] = 0, denominator: Optional[int] = None):
        if isinstance(value, Exponent):
            if denominator is not None:
                raise TypeError("denominator not allowed with an Exponent value")
            frac = value._frac
        elif isinstance(value, bool):
            raise TypeError("bool is not an exponent")
        elif isinstance(value, (int, Fraction)):
            frac = Fraction(value) if denominator is None else Fraction(value, denominator)
        else:
            raise TypeError(f"cannot build an exact Exponent from {type(value).__name__}")
        object.__setattr__(self, "_frac", frac)

    def __setattr__(self, name, value):
        raise AttributeError("Exponent is immutable")

    @classmethod
    def infinity(cls) -> "Exponent":
        e = cls.__new__(cls)
        object.__setattr__(e, "_frac", None)
        return e

    @classmethod
    def parse(cls, text: str) -> "Exponent":
        """Parse ``"3"``, ``"3/2"`` or ``"inf"``.  Decimal literals are rejected."""
        t = str(text).strip().lower()
        if t in _INF_WORDS:
            return INF
        m = _RATIONAL_RE.match(t)
        if not m:
            raise SpecError(f"not an exact rational or 'inf': {text!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise ExponentError(f"zero denominator in {text!r}")
        return cls(num, den)

    # -- fields -----------------------------------------------------------
    @property
    def infinite(self) -> bool:
        return self._frac is None

    @property
    def is_finite(self) -> bool:
        return self._frac is not None

    @property
    def numerator(self) -> int:
        if self._frac is None:
            raise ExponentError("infinite exponent has no numerator")
        return self._frac.numerator

    @property
    def denominator(self) -> int:
        if self._frac is None:
            raise ExponentError("infinite exponent has no denominator")
        return self._frac.denominator

    def as_fraction(self) -> Fraction:
        if self._frac is None:
            raise ExponentError("infinite exponent is not a Fraction")
        return self._frac

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.infinite or o.infinite:
            return INF
        return Exponent(self._frac + o._frac)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.infinite:
            raise ExponentError("inf - inf and x - inf are undefined for +inf-extended rationals")
        if self.infinite:
            return INF
        return Exponent(self._frac - o._frac)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self):
        if self.infinite:
            raise ExponentError("-inf is not representable")
        return Exponent(-self._frac)

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.infinite or o.infinite:
            finite = o if self.infinite else self
            if finite.infinite:
                return INF
            if finite._frac == 0:
                raise ExponentError("0 * inf is undefined")
            if finite._frac < 0:
                raise ExponentError("negative * inf is not representable")
            return INF
        return Exponent(self._frac * o._frac)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.infinite:
            if self.infinite:
                raise ExponentError("inf / inf is undefined")
            return Exponent(0)
        if o._frac == 0:
            raise ExponentError("division by zero")
        if self.infinite:
            if o._frac < 0:
                raise ExponentError("inf / negative is not representable")
            return INF
        return Exponent(self._frac / o._frac)

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def reciprocal(self) -> "Exponent":
        return Exponent(1) / self

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._frac == o._frac

    def __lt__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.infinite:
            return False
        if o.infinite:
            return True
        return self._frac < o._frac

    def __hash__(self):
        return hash(("Exponent", self._frac))

    # -- conversion -------------------------------------------------------
    def __float__(self):
        return math.inf if self.infinite else float(self._frac)

    def __str__(self):
        if self.infinite:
            return "inf"
        f = self._frac
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"

    def __repr__(self):
        return f"Exponent({str(self)!r})"

    def __reduce__(self):
        return (Exponent.parse, (str(self),))


INF = Exponent.infinity()


def _coerce(x):
    if isinstance(x, Exponent):
        return x
    if isinstance(x, bool):
        return NotImplemented
    if isinstance(x, (int, Fraction)):
        return Exponent(x)
    if isinstance(x, float) and math.isinf(x) and x > 0:
        return INF
    return NotImplemented


def as_exponent(x) -> Exponent:
    """Coerce ints, Fractions, ``"a/b"``/``"inf"`` strings and ``math.inf``.

    Finite floats are rejected: space parameters stay exact.
    """
    if isinstance(x, str):
        return Exponent.parse(x)
    e = _coerce(x)
    if e is NotImplemented:
        raise SpecError(f"exponent must be exact (int, Fraction, 'a/b' or inf), got {x!r}")
    return e


# ---------------------------------------------------------------------------
# Parameter sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParamSet:
    """Validated ``(p0, q0, p1, q1, q)`` plus derived exponents.

    ``r = p0 q / (p1 (q - p0))``, ``alpha = p0 q / (q - p0)`` (so that
    ``1/alpha = 1/p0 - 1/q`` and ``alpha = r p1``), and
    ``r1_min = q p0 / (p1 (q - p0) + p0)``.
    """

    p0: Exponent
    q0: Exponent
    p1: Exponent
    q1: Exponent
    q: Exponent
    r: Exponent = field(compare=False)
    alpha: Exponent = field(compare=False)
    r1_min: Exponent = field(compare=False)
    regime_a: bool = field(compare=False)

    def as_tuple(self):
        return (self.p0, self.q0, self.p1, self.q1, self.q)

    def with_q(self, q0=None, q1=None) -> "ParamSet":
        """Same parameters with ``q0`` and/or ``q1`` replaced (revalidated)."""
        return derive(self.p0, self.q0 if q0 is None else q0, self.p1, self.q1 if q1 is None else q1, self.q)

    def __str__(self):
        return "({})".format(", ".join(str(x) for x in self.as_tuple()))


def derive(p0, q0, p1, q1, q) -> ParamSet:
    """Validate the raw exponents and compute ``r``, ``alpha``, ``r1_min`` and the regime."""
    p0, q0, p1, q1, q = (as_exponent(x) for x in (p0, q0, p1, q1, q))
    checks = [
        (p0.is_finite and p0 > 1, f"p0 > 1 (got p0={p0})"),
        (q.is_finite, f"q < inf (got q={q})"),
        (p0 < q, f"p0 < q (got p0={p0}, q={q})"),
        (p1.is_finite and p1 > 1, f"1 < p1 < inf (got p1={p1})"),
        (q0 >= 1, f"q0 >= 1 (got q0={q0})"),
        (q0 <= q1, f"q0 <= q1 (got q0={q0}, q1={q1})"),
    ]
    for ok, msg in checks:
        if not ok:
            raise ParameterError(f"parameter constraint violated: {msg}")
    r = p0 * q / (p1 * (q - p0))
    alpha = p0 * q / (q - p0)
    if alpha != r * p1 or Exponent(1) / alpha != Exponent(1) / p0 - Exponent(1) / q:
        raise AssertionError("alpha = r * p1 identity broken")  # pragma: no cover
    r1_min = q * p0 / (p1 * (q - p0) + p0)
    regime_a = p1 <= p0 * (q - 1) / (q - p0)
    if regime_a != (r1_min >= 1):
        raise AssertionError("regime characterisations disagree")  # pragma: no cover
    return ParamSet(p0, q0, p1, q1, q, r, alpha, r1_min, regime_a)


def scaling_holds(params: ParamSet, r1, r2) -> bool:
    """Exact check of ``1/q + 1/(r r2) = 1/r1``."""
    r1, r2 = as_exponent(r1), as_exponent(r2)
    one = Exponent(1)
    return one / params.q + one / (params.r * r2) == one / r1


def r1r2_solve(params: ParamSet, r1=None, r2=None) -> Exponent:
    """Return the partner exponent of ``r1`` (or ``r2``) under the scaling relation."""
    if (r1 is None) == (r2 is None):
        raise TypeError("give exactly one of r1, r2")
    one = Exponent(1)
    if r1 is not None:
        r1 = as_exponent(r1)
        if r1 <= 0:
            raise NoSolution(f"r1 must be positive (got {r1})")
        gap = one / r1 - one / params.q if r1.is_finite else None
        if gap is None or gap < 0:
            raise NoSolution(f"r1={r1} exceeds q={params.q}: partner r2 would be negative")
        if gap == 0:
            return INF
        return one / (params.r * gap)
    r2 = as_exponent(r2)
    if r2 <= 0:
        raise NoSolution(f"r2 must be positive (got {r2})")
    return one / (one / params.q + one / (params.r * r2))


# ---------------------------------------------------------------------------
# Lorentz pairs and verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LorentzSpec:
    """The pair ``(p, s)`` naming ``L^{p,s}(0, inf)``, ``p in (0, inf]``, ``s in [1, inf]``."""

    p: Exponent
    s: Exponent

    def __post_init__(self):
        p, s = as_exponent(self.p), as_exponent(self.s)
        if not p > 0:
            raise SpecError(f"Lorentz exponent p must be positive (got {p})")
        if s < 1:
            raise SpecError(f"Lorentz exponent s must be >= 1 (got {s})")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "s", s)

    @classmethod
    def parse(cls, text: str) -> "LorentzSpec":
        parts = [x for x in str(text).split(",")]
        if len(parts) != 2:
            raise SpecError(f"Lorentz spec must be 'p,s' (got {text!r})")
        return cls(Exponent.parse(parts[0]), Exponent.parse(parts[1]))

    @property
    def normable(self) -> bool:
        p, s = self.p, self.s
        if p == 1 and s == 1:
            return True
        if p.is_finite and p > 1:
            return True
        return p.infinite and s.infinite

    def __str__(self):
        return f"L^{{{self.p},{self.s}}}"


CLAUSES = {
    "R-i": "R_q0: r1 = p0, s1 <= q0 and s2 = inf",
    "R-ii": "R_q0: r1 in (p0, q] and 1 <= s1 <= s2 <= inf",
    "R-r1r2": "R_q0: scaling relation 1/q + 1/(r r2) = 1/r1",
    "R-nontrivial": "R_q0: r1 >= p0, else (L^{r1,s2})<p0,q0> is trivial",
    "S-A-i": "S, regime A: r1 = q p0/(p1(q-p0)+p0) and s1 = s2 = 1",
    "S-A-ii": "S, regime A: r1 in (q p0/(p1(q-p0)+p0), q) and 1 <= s1 <= s2 <= inf",
    "S-A-iii": "S, regime A: r1 = q and s1 = 1 (s2 = inf)",
    "S-B-i": "S, regime B: r1 = 1 and s1 = 1 <= s2 <= inf",
    "S-B-ii": "S, regime B: r1 in (1, q) and 1 <= s1 <= s2 <= inf",
    "S-B-iii": "S, regime B: r1 = q and s1 = 1 (s2 = inf)",
    "S-r1r2": "S: scaling relation 1/q + 1/(r r2) = 1/r1",
    "C-i": "R_q0 and S: r1 = p0, s1 <= q0 and s2 = inf",
    "C-ii": "R_q0 and S: r1 in (p0, q) and 1 <= s1 <= s2 <= inf",
    "C-iii": "R_q0 and S: r1 = q and s1 = 1",
    "C-r1r2": "R_q0 and S: scaling relation 1/q + 1/(r r2) = 1/r1",
    "C-nontrivial": "R_q0 and S: r1 >= p0, else R_q0 is unbounded",
}


@dataclass(frozen=True)
class Verdict:
    bounded: bool
    clause: str
    witness_family: Optional[str] = None
    detail: str = ""

    def __post_init__(self):
        if self.clause not in CLAUSES:
            raise ValueError(f"unknown clause {self.clause!r}")
        if self.bounded and self.witness_family is not None:
            raise ValueError("bounded verdicts carry no witness")

    def to_dict(self):
        return {
            "bounded": self.bounded,
            "clause": self.clause,
            "condition": CLAUSES[self.clause],
            "witness_family": self.witness_family,
            "detail": self.detail,
        }


def _require_normable(p, s, role):
    spec = LorentzSpec(p, s)
    if not spec.normable:
        raise NonNormable(f"{role} space {spec} is not equivalent to a rearrangement-invariant space")
    return spec


def _prepare(params, r1, s1, r2, s2):
    """Normalize the four exponents; ``r2=None`` means "derive from r1".

    Returns ``(r1, s1, r2, s2, partner_ok)``; ``partner_ok`` is False when
    ``r2`` was derived and no normable target satisfies the scaling relation.
    """
    if s2 is None:
        raise TypeError("s2 is required")
    r1, s1, s2 = as_exponent(r1), as_exponent(s1), as_exponent(s2)
    _require_normable(r1, s1, "domain")
    if r2 is not None:
        r2 = as_exponent(r2)
        _require_normable(r2, s2, "target")
        return r1, s1, r2, s2, True
    try:
        r2 = r1r2_solve(params, r1=r1)
    except NoSolution:
        return r1, s1, None, s2, False
    if not LorentzSpec(r2, s2).normable:
        return r1, s1, r2, s2, False
    return r1, s1, r2, s2, True


def verdict_R(params: ParamSet, r1, s1, r2=None, s2=None) -> Verdict:
    """Boundedness of ``R_q0: L^{r1,s1} -> L^{r2,s2}``.

    Condition (ii) is read as a constraint on ``r1``, i.e. ``r1 in (p0, q]``.
    """
    r1, s1, r2, s2, ok = _prepare(params, r1, s1, r2, s2)
    p0, q0, q = params.p0, params.q0, params.q
    if r1 < p0:
        return Verdict(False, "R-nontrivial", "char", f"r1={r1} < p0={p0}")
    if not ok or not scaling_holds(params, r1, r2):
        return Verdict(False, "R-r1r2", "dilation", f"r1={r1}, r2={r2}")
    if r1 == p0:
        if s1 <= q0 and s2.infinite:
            return Verdict(True, "R-i")
        witness = "char" if not s2.infinite else "logpow"
        return Verdict(False, "R-i", witness, f"needs s1={s1} <= q0={q0} and s2={s2} = inf")
    # scaling forces r1 <= q here
    if s1 <= s2:
        return Verdict(True, "R-ii")
    return Verdict(False, "R-ii", "logpow", f"s1={s1} > s2={s2}")


def verdict_S(params: ParamSet, r1, s1, r2=None, s2=None) -> Verdict:
    """Boundedness of ``S: L^{r1,s1} -> L^{r2,s2}``, split by the parameter regime."""
    r1, s1, r2, s2, ok = _prepare(params, r1, s1, r2, s2)
    q = params.q
    if not ok or not scaling_holds(params, r1, r2):
        return Verdict(False, "S-r1r2", "dilation", f"r1={r1}, r2={r2}")
    tag = "S-A" if params.regime_a else "S-B"
    low = params.r1_min if params.regime_a else Exponent(1)
    if r1 == q:
        if s1 == 1 and s2.infinite:
            return Verdict(True, f"{tag}-iii")
        return Verdict(False, f"{tag}-iii", "logpow", f"needs s1={s1} = 1")
    if r1 == low:
        good = s1 == 1 and (s2 == 1 if params.regime_a else True)
        if good:
            return Verdict(True, f"{tag}-i")
        return Verdict(False, f"{tag}-i", "logpow", f"s1={s1}, s2={s2}")
    if low < r1 < q:
        if s1 <= s2:
            return Verdict(True, f"{tag}-ii")
        return Verdict(False, f"{tag}-ii", "logpow", f"s1={s1} > s2={s2}")
    # below the normable range: the partner r2 < 1 cannot be normable
    return Verdict(False, "S-r1r2", "dilation", f"r1={r1} below {low}")  # pragma: no cover


def verdict_combined(params: ParamSet, r1, s1, r2=None, s2=None) -> Verdict:
    """Joint boundedness of ``R_q0`` and ``S`` from ``L^{r1,s1}`` to ``L^{r2,s2}``."""
    r1, s1, r2, s2, ok = _prepare(params, r1, s1, r2, s2)
    p0, q0, q = params.p0, params.q0, params.q
    if r1 < p0:
        return Verdict(False, "C-nontrivial", "char", f"r1={r1} < p0={p0}")
    if not ok or not scaling_holds(params, r1, r2):
        return Verdict(False, "C-r1r2", "dilation", f"r1={r1}, r2={r2}")
    if r1 == p0:
        if s1 <= q0 and s2.infinite:
            return Verdict(True, "C-i")
        witness = "char" if not s2.infinite else "logpow"
        return Verdict(False, "C-i", witness, f"needs s1={s1} <= q0={q0} and s2={s2} = inf")
    if r1 < q:
        if s1 <= s2:
            return Verdict(True, "C-ii")
        return Verdict(False, "C-ii", "logpow", f"s1={s1} > s2={s2}")
    if s1 == 1:
        return Verdict(True, "C-iii")
    return Verdict(False, "C-iii", "logpow", f"needs s1={s1} = 1")


def nontrivial_downgrade(X: LorentzSpec, p0) -> bool:
    """Whether ``min{1, t^{-1/p0}}`` has finite ``X``-quasinorm, i.e. ``X<p0,q0> != {0}``."""
    p0 = as_exponent(p0)
    if not X.normable:
        raise NonNormable(f"{X} is not normable")
    if X.p.infinite:
        return True
    if X.p > p0:
        return True
    return X.p == p0 and X.s.infinite
